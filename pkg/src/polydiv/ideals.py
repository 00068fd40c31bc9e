"""Integral closure and normality of invariant ideals.

Monomial ideals are governed by their Newton polyhedron; homogeneous
ideals on a complexity-one section algebra are encoded by a Rees pair: the
Newton polyhedron of the degrees together with an augmented polyhedral
divisor in one rank higher whose level-e pieces are the closures of the
ideal powers.  A brute-force integral-dependence oracle covers the
monomial layer independently.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import Iterable, Sequence

from .convex import (
    Cone,
    GeometryError,
    Polyhedron,
    cone_dual,
    dilate,
    hilbert_basis,
    is_polyhedron_normal,
    lattice_points_in_box,
    minimal_lattice_points,
    polyhedron_from_halfspaces,
    project_out_last,
    reachability_box,
    support_value,
)
from .curves import (
    PROJECTIVE_LINE,
    BaseCurve,
    BasePoint,
    Divisor,
    RationalFunction,
    SectionModule,
    WrongCurve,
    principal_divisor,
    sections,
)
from .divisors import (
    GradedPiece,
    HomogeneousElement,
    PolyhedralDivisor,
    evaluate,
    graded_piece,
    member,
)
from .linalg import IVec, dot, is_zero_vector, primitive, vadd, vsub


class IdealError(ValueError):
    pass


class NonMemberGenerator(IdealError):
    pass


class DegreeOutsideDilate(IdealError):
    pass


@dataclass(frozen=True)
class MonomialIdeal:
    """Monomial ideal of the monoid algebra of a full-dimensional weight cone."""

    weight_cone: Cone
    exponents: tuple[IVec, ...]

    @staticmethod
    def of(weight_cone: Cone, exponents: Iterable[Sequence]) -> "MonomialIdeal":
        if not weight_cone.is_full_dimensional or not weight_cone.is_pointed:
            raise GeometryError("weight cone must be full-dimensional and pointed")
        exps = tuple(sorted({tuple(int(a) for a in m) for m in exponents}))
        if not exps:
            raise IdealError("a monomial ideal needs at least one exponent")
        for m in exps:
            if not weight_cone.contains(m):
                raise IdealError(f"exponent {m} outside the weight cone")
        return MonomialIdeal(weight_cone, exps)

    @property
    def rank(self) -> int:
        return self.weight_cone.ambient_rank


def newton_polyhedron(ideal: MonomialIdeal) -> Polyhedron:
    return Polyhedron.from_vertices_and_tail(ideal.exponents, ideal.weight_cone)


def monomial_closure_generators(ideal: MonomialIdeal) -> tuple[IVec, ...]:
    """Minimal monomial generating set of the integral closure."""
    return minimal_lattice_points(newton_polyhedron(ideal))


def monomial_is_normal(ideal: MonomialIdeal) -> tuple[bool, dict | None]:
    """Normality of the (closure of the) ideal; witness on failure.

    Checks e-fold splitting of the Newton polyhedron for e up to rank - 1,
    which suffices in the orthant case and for every polyhedron in rank 2.
    """
    p = newton_polyhedron(ideal)
    for e in range(1, ideal.rank):
        ok, witness = is_polyhedron_normal(p, e)
        if not ok:
            return False, {"exponent": e, "point": witness}
    return True, None


def closure_member_oracle(m: Sequence, ideal: MonomialIdeal, d_max: int = 12) -> bool:
    """Brute-force integral dependence: chi^m integral over the ideal iff some
    d-fold exponent sum s has d*m - s in the weight cone, d <= d_max.

    One-sided: False only means "no witness found up to d_max".
    """
    if d_max < 1:
        raise IdealError("d_max must be >= 1")
    m = tuple(int(a) for a in m)
    cone = ideal.weight_cone
    for d in range(1, d_max + 1):
        target = tuple(d * a for a in m)
        for combo in itertools.combinations_with_replacement(ideal.exponents, d):
            s = tuple(map(sum, zip(*combo)))
            if cone.contains(vsub(target, s)):
                return True
    return False


@dataclass(frozen=True)
class GradedIdealPresentation:
    """Homogeneous ideal generators inside a fixed ambient section algebra."""

    weight_cone: Cone
    divisor: PolyhedralDivisor
    generators: tuple[HomogeneousElement, ...]

    @staticmethod
    def of(weight_cone: Cone, divisor: PolyhedralDivisor,
           generators: Iterable[HomogeneousElement]) -> "GradedIdealPresentation":
        gens = tuple(generators)
        if not gens:
            raise IdealError("an ideal presentation needs generators")
        for g in gens:
            if not member(g, divisor):
                raise NonMemberGenerator(f"{g} is not in the ambient algebra")
        return GradedIdealPresentation(weight_cone, divisor, gens)


@dataclass(frozen=True)
class ReesPair:
    """Newton polyhedron plus the augmented divisor of the Rees normalization."""

    presentation: GradedIdealPresentation
    newton: Polyhedron          # in M_Q, tail the weight cone
    rees_divisor: PolyhedralDivisor  # rank n+1, tail the augmented cone

    @property
    def augmented_tail(self) -> Cone:
        return self.rees_divisor.tail

    @property
    def weight_cone_augmented(self) -> Cone:
        """The cone with level-e slices e * Newton polyhedron."""
        return cone_dual(self.rees_divisor.tail)


def rees_pair(pres: GradedIdealPresentation) -> ReesPair:
    """Augmented divisor with coefficients cut out by <m_i, v> + p >= -ord_z f_i
    inside coefficient x Q, computed in ambient rank n + 1."""
    d = pres.divisor
    n = d.rank
    weight_cone = cone_dual(d.tail)
    newton = Polyhedron.from_vertices_and_tail(
        [g.degree for g in pres.generators], weight_cone)
    # dual of the cone over (Newton polyhedron, level 1)
    augmented_tail = cone_dual(Cone.from_rays(
        [tuple(g.degree) + (1,) for g in pres.generators] +
        [tuple(r) + (0,) for r in weight_cone.rays], n + 1))
    points: set[BasePoint] = set(d.support)
    for g in pres.generators:
        points.update(principal_divisor(g.function, d.curve).support)
    coeffs = []
    for z in sorted(points):
        ineqs = [(tuple(g.degree) + (1,), -g.function.ord_at(z)) for g in pres.generators]
        for normal, offset in d.coefficient(z).halfspaces:
            ineqs.append((tuple(normal) + (0,), offset))
        coeffs.append((z, polyhedron_from_halfspaces(ineqs, n + 1,
                                                     tail_hint=augmented_tail)))
    rd = PolyhedralDivisor.of(d.curve, augmented_tail, coeffs)
    pair = ReesPair(pres, newton, rd)
    _check_rees_invariants(pair)
    return pair


def _check_rees_invariants(pair: ReesPair) -> None:
    d = pair.presentation.divisor
    for z, poly in pair.rees_divisor.coefficients:
        if project_out_last(poly) != d.coefficient(z):
            raise IdealError(f"projection of the augmented coefficient at {z} "
                             "does not recover the ambient coefficient")
        if any(v[-1] > 0 for v in poly.vertices):
            raise IdealError(f"augmented coefficient at {z} has a vertex above level 0")


def closure_power_piece(pair: ReesPair, m: Sequence, e: int) -> GradedPiece:
    """Graded piece of the closure of the e-th ideal power at degree m."""
    if e < 0:
        raise DegreeOutsideDilate("power must be >= 0")
    scaled = dilate(pair.newton, e)
    if not scaled.contains(m):
        raise DegreeOutsideDilate(f"{tuple(m)} is not in the {e}-fold Newton polyhedron")
    ev = evaluate(pair.rees_divisor, tuple(m) + (e,))
    return GradedPiece(tuple(m), sections(ev))


def _augmented_slice_points(pair: ReesPair, e: int, box) -> set[IVec]:
    cone = pair.weight_cone_augmented
    pts = set()
    for m in itertools.product(*[range(lo, hi + 1) for lo, hi in box]):
        if cone.contains(tuple(m) + (e,)):
            pts.add(tuple(m))
    return pts


@dataclass(frozen=True)
class ConditionReport:
    results: tuple[tuple[str, bool, str], ...]

    @property
    def all_pass(self) -> bool:
        return all(ok for _, ok, _ in self.results)

    def outcome(self, name: str) -> tuple[bool, str]:
        for n, ok, note in self.results:
            if n == name:
                return ok, note
        raise KeyError(name)

    def __repr__(self) -> str:
        return "\n".join(f"[{'PASS' if ok else 'FAIL'}] {n}: {note}"
                         for n, ok, note in self.results)


def pair_conditions(pair: ReesPair, slice_box_halfwidth: int = 6,
                    max_level: int = 4) -> ConditionReport:
    """Check the Rees-pair axioms with witnesses.

    (i)  Newton polyhedron has integral vertices inside the weight cone;
    (ii) the augmented weight cone slices to the dilated Newton polyhedra
         (sampled levels, lattice points in a box);
    (iii) projecting out the level recovers the coefficients and all
         augmented vertices sit at level <= 0;
    (iv) every level-carrying facet is of the form <m, v> + p >= e with
         m an integral point of the Newton polyhedron; on a projective
         base the sections of the level-1 evaluation must attain the
         facet's order at the point.
    """
    results = []
    d = pair.presentation.divisor
    wc = cone_dual(d.tail)

    ok = pair.newton.has_integral_vertices and \
        all(wc.contains(v) for v in pair.newton.vertices)
    results.append(("newton_in_weight_monoid", ok,
                    f"vertices {_fmt_vertices(pair.newton)}"))

    n = d.rank
    box = tuple((-slice_box_halfwidth, slice_box_halfwidth) for _ in range(n))
    slice_ok, note = True, "levels 0..%d agree on the sampled box" % max_level
    for e in range(max_level + 1):
        want = {tuple(m) for m in itertools.product(
            *[range(lo, hi + 1) for lo, hi in box])
            if dilate(pair.newton, e).contains(m)}
        got = _augmented_slice_points(pair, e, box)
        if want != got:
            slice_ok = False
            diff = (want - got) | (got - want)
            note = f"level {e} mismatch at {sorted(diff)[:3]}"
            break
    results.append(("augmented_cone_slices", slice_ok, note))

    proj_ok, note = True, "projection and vertex levels verified"
    try:
        _check_rees_invariants(pair)
    except IdealError as err:
        proj_ok, note = False, str(err)
    results.append(("projection_and_vertex_levels", proj_ok, note))

    facet_ok, note = True, "all level-facets carried by Newton lattice points"
    for z, poly in pair.rees_divisor.coefficients:
        for normal, offset in poly.halfspaces:
            level = normal[-1]
            if level == 0:
                continue
            if level < 0:
                facet_ok, note = False, f"facet {normal} at {z} has negative level"
                break
            mvec = tuple(Fraction(a, level) for a in normal[:-1])
            evec = Fraction(offset, level)
            if any(a.denominator != 1 for a in mvec) or evec.denominator != 1:
                facet_ok, note = False, f"facet {normal} at {z} not integral after scaling"
                break
            mvec = tuple(int(a) for a in mvec)
            if not pair.newton.contains(mvec):
                facet_ok = False
                note = f"facet direction {mvec} at {z} outside the Newton polyhedron"
                break
            if d.curve is PROJECTIVE_LINE:
                if not _sections_attain_order(pair, mvec, z):
                    facet_ok = False
                    note = f"sections of the level-1 sheaf do not generate at {z}"
                    break
        if not facet_ok:
            break
    results.append(("facets_from_newton_points", facet_ok, note))
    return ConditionReport(tuple(results))


def _sections_attain_order(pair: ReesPair, mvec: IVec, z: BasePoint) -> bool:
    ev = evaluate(pair.rees_divisor, tuple(mvec) + (1,)).floor()
    mod = sections(ev)
    if mod.is_zero:
        return False
    best = min(f.ord_at(z) for f in mod.generators)
    return best == -ev.coefficient(z)


def primitive_or_zero(v):
    return tuple(int(a) for a in v) if all(Fraction(a).denominator == 1 for a in v) \
        else tuple(v)


def _in_cone_q(cone: Cone, v) -> bool:
    return all(dot(h, v) >= 0 for h in cone.halfspaces)


def _fmt_vertices(p: Polyhedron) -> str:
    return "[" + ", ".join("(" + ",".join(map(str, v)) + ")" for v in p.vertices) + "]"


def ptilde(pair: ReesPair, z: BasePoint) -> Polyhedron:
    """Integral polyhedron of lattice pairs (m, i) with h_z(m, 1) >= -i.

    The recession cone is {(w, j) : w in the weight cone, j >= -h_z(w, 0)};
    vertices are found among the lifted lattice points of the Newton
    polyhedron inside its Hilbert-reachability region.
    """
    if pair.presentation.divisor.curve is PROJECTIVE_LINE:
        raise WrongCurve("the lifted Newton polyhedron is an affine-base construction")
    poly = pair.rees_divisor.coefficient(z)
    newton = pair.newton
    n = newton.ambient_rank
    wc = newton.tail
    # recession: j >= -h_{Delta_z}(w) for w in the weight cone
    amb = pair.presentation.divisor.coefficient(z)
    tail_normals = [tuple(h) + (0,) for h in wc.halfspaces]
    tail_normals += [tuple(v) + (1,) for v in amb.vertices]
    tail = Cone.from_halfspaces(tail_normals, n + 1)

    def lift(m):
        return tuple(m) + (ceil(-support_value(poly, tuple(m) + (1,))),)

    denom = max(pair.rees_divisor.denominator(), 1)
    hb = [tuple(denom * a for a in h) for h in hilbert_basis(wc)]
    scale = 1
    while True:
        lo, hi = reachability_box(newton, [tuple(scale * a for a in h) for h in hb])
        out = Polyhedron.from_vertices_and_tail(
            [lift(m) for m in lattice_points_in_box(newton, lo, hi)], tail)
        # certificate: every lifted lattice pair in the doubled region is in the hull
        lo2, hi2 = reachability_box(newton, [tuple(2 * scale * a for a in h) for h in hb])
        if all(out.contains(lift(m)) for m in lattice_points_in_box(newton, lo2, hi2)):
            return out
        scale *= 2
        if scale > 16:
            raise IdealError(f"lifted Newton polyhedron at {z} did not stabilize")


def normality_sufficient(pair: ReesPair) -> tuple[bool, dict | None]:
    """Sufficient normality criterion: all lifted Newton polyhedra over the
    support split e-fold for e up to the base lattice rank."""
    d = pair.presentation.divisor
    if d.curve is PROJECTIVE_LINE:
        raise WrongCurve("normality criterion needs an affine base")
    n = d.rank
    for z in pair.rees_divisor.support:
        p = ptilde(pair, z)
        for e in range(1, n + 1):
            ok, wit = is_polyhedron_normal(p, e)
            if not ok:
                return False, {"point": z, "exponent": e, "witness": wit}
    return True, None
