"""Normalized additive-group actions on complexity-one torus varieties.

Demazure roots index the normalized actions on affine toric varieties; on
a complexity-one section algebra the actions split into vertical type
(fixing the invariant function field; a root plus an admissible section)
and horizontal type (classified by colored divisors and coherent
assemblages).  All exponential evaluation is characteristic zero; a prime
exponent characteristic enters the horizontal classification only through
integer arithmetic in the admissibility conditions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, floor, lcm
from typing import Callable, Iterable, Sequence

from .convex import Cone, GeometryError, Polyhedron, cone_dual, hilbert_basis
from .curves import (
    AFFINE_LINE,
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
    HomogeneousElement,
    PolyhedralDivisor,
    degree_polyhedron,
    evaluate,
    is_proper,
    member,
    quasifan,
)
from .ideals import ConditionReport
from .linalg import IVec, dot, hnf, integer_kernel_basis, primitive, vadd, vsub


class ActionError(ValueError):
    pass


class RayNotInCone(ActionError):
    pass


class OutsideWeightCone(ActionError):
    pass


class PhiNotAdmissible(ActionError):
    pass


class NonMember(ActionError):
    pass


class ConditionsFail(ActionError):
    pass


@dataclass(frozen=True)
class DemazureRoot:
    """Lattice vector pairing to -1 with one ray of the cone, >= 0 elsewhere."""

    vector: IVec
    distinguished_ray: IVec


def is_demazure_root(cone: Cone, e: Sequence) -> DemazureRoot | None:
    if not cone.is_pointed or not cone.rays:
        raise GeometryError("roots are defined for nonzero pointed cones")
    e = tuple(int(a) for a in e)
    distinguished = None
    for ray in cone.rays:
        pairing = dot(e, ray)
        if pairing == -1:
            if distinguished is not None:
                return None
            distinguished = ray
        elif pairing < 0:
            return None
    if distinguished is None:
        return None
    return DemazureRoot(vector=e, distinguished_ray=distinguished)


def roots_with_ray(cone: Cone, ray: Sequence, box: Sequence[tuple[int, int]]
                   ) -> tuple[DemazureRoot, ...]:
    ray = primitive(ray)
    if ray not in cone.rays:
        raise RayNotInCone(f"{ray} is not an extreme ray of the cone")
    out = []
    for e in itertools.product(*[range(lo, hi + 1) for lo, hi in box]):
        root = is_demazure_root(cone, e)
        if root is not None and root.distinguished_ray == ray:
            out.append(root)
    return tuple(out)


@dataclass(frozen=True)
class ExponentialExpansion:
    """Finite expansion sum_i term_i x^i of e^{x d} applied to one element."""

    terms: tuple[tuple[int, HomogeneousElement], ...]

    @property
    def input(self) -> HomogeneousElement:
        return self.terms[0][1]

    def term(self, i: int) -> HomogeneousElement | None:
        for j, el in self.terms:
            if j == i:
                return el
        return None

    def __mul__(self, other: "ExponentialExpansion") -> "ExponentialExpansion":
        acc: dict[int, HomogeneousElement] = {}
        for i, a in self.terms:
            for j, b in other.terms:
                prod = a * b
                if i + j in acc:
                    summed = acc[i + j].function.add(prod.function)
                    if summed is None:
                        del acc[i + j]
                    else:
                        acc[i + j] = HomogeneousElement(summed, prod.degree)
                else:
                    acc[i + j] = prod
        return ExponentialExpansion(tuple(sorted(acc.items())))

    def same_as(self, other: "ExponentialExpansion") -> bool:
        mine = {i: el for i, el in self.terms}
        theirs = {i: el for i, el in other.terms}
        if set(mine) != set(theirs):
            return False
        return all(mine[i].same_as(theirs[i]) for i in mine)

    def __repr__(self) -> str:
        return " + ".join(f"({el})x^{i}" if i else f"{el}" for i, el in self.terms)


def toric_exponential(cone: Cone, root: DemazureRoot, lam,
                      m: Sequence) -> ExponentialExpansion:
    """Exponential of the homogeneous derivation of a Demazure root on chi^m."""
    lam = Fraction(lam)
    e, rho = root.vector, root.distinguished_ray
    weight = cone_dual(cone)
    m = tuple(int(a) for a in m)
    if not weight.contains(m):
        raise OutsideWeightCone(f"{m} is outside the weight cone")
    height = dot(m, rho)
    terms = []
    for i in range(height + 1):
        coeff = comb(height, i) * lam ** i
        deg = vadd(m, tuple(i * a for a in e))
        assert weight.contains(deg)
        terms.append((i, HomogeneousElement(
            RationalFunction.from_factored(coeff), deg)))
    return ExponentialExpansion(tuple(terms))


def vertical_min_divisor(d: PolyhedralDivisor, e: Sequence) -> Divisor:
    """Vertex-minimum evaluation at e (defined even for e outside the weight cone)."""
    coeffs = []
    for z, poly in d.coefficients:
        coeffs.append((z, min(dot(e, v) for v in poly.vertices)))
    return Divisor.of(d.curve, coeffs)


def vertical_phi(d: PolyhedralDivisor, root: DemazureRoot) -> SectionModule:
    """Admissible multiplier sections for the vertical action of a root."""
    ok, cert = is_proper(d)
    if not ok:
        raise ActionError(f"divisor is not proper: {cert}")
    return sections(vertical_min_divisor(d, root.vector))


def vertical_exists(d: PolyhedralDivisor, ray: Sequence) -> bool:
    """Is there a vertical action with the given distinguished ray?

    Affine bases always admit one; on the projective line the criterion is
    that the ray misses the degree polyhedron (exact one-variable
    feasibility over the halfspace description).
    """
    ok, cert = is_proper(d)
    if not ok:
        raise ActionError(f"divisor is not proper: {cert}")
    if d.curve.is_affine:
        return True
    ray = primitive(ray)
    if ray not in d.tail.rays:
        raise RayNotInCone(f"{ray} is not an extreme ray of the tail cone")
    deg = degree_polyhedron(d)
    # does t*ray satisfy all halfspaces for some t >= 0?
    lo, hi = Fraction(0), None
    for normal, offset in deg.halfspaces:
        slope = dot(normal, ray)
        if slope > 0:
            lo = max(lo, Fraction(offset, slope))
        elif slope < 0:
            bound = Fraction(offset, slope)
            hi = bound if hi is None else min(hi, bound)
        elif offset > 0:
            return True  # constraint unsatisfiable along the ray
    return hi is not None and lo > hi


def vertical_exponential(d: PolyhedralDivisor, root: DemazureRoot,
                         phi: RationalFunction,
                         el: HomogeneousElement) -> ExponentialExpansion:
    """Expansion of the vertical action phi * root-derivation on a member."""
    admissible = principal_divisor(phi, d.curve) + \
        vertical_min_divisor(d, root.vector).floor()
    if not admissible.is_effective:
        raise PhiNotAdmissible(f"{phi} is not a section of the multiplier module")
    if not member(el, d):
        raise NonMember(f"{el} is not in the section algebra")
    e, rho = root.vector, root.distinguished_ray
    height = dot(el.degree, rho)
    terms = []
    for i in range(height + 1):
        coeff = comb(height, i)
        func = el.function.scaled(coeff) * phi ** i if i else el.function.scaled(coeff)
        term = HomogeneousElement(func, vadd(el.degree, tuple(i * a for a in e)))
        if not member(term, d):
            raise NonMember(f"term {term} left the section algebra")
        terms.append((i, term))
    return ExponentialExpansion(tuple(terms))


@dataclass(frozen=True)
class ColoredDivisor:
    """Proper divisor with a chosen vertex per coefficient, a rational base
    point carrying the only possibly non-integral color and, on a projective
    base, a rational point at infinity."""

    divisor: PolyhedralDivisor
    base_point: BasePoint
    infinity_point: BasePoint | None
    colors: tuple[tuple[BasePoint, tuple[Fraction, ...]], ...]

    @staticmethod
    def of(divisor: PolyhedralDivisor, base_point: BasePoint,
           colors, infinity_point: BasePoint | None = None) -> "ColoredDivisor":
        items = colors.items() if hasattr(colors, "items") else colors
        canon = tuple(sorted((z, tuple(Fraction(a) for a in v)) for z, v in items))
        return ColoredDivisor(divisor, base_point, infinity_point, canon)

    def color(self, z: BasePoint) -> tuple[Fraction, ...]:
        for zz, v in self.colors:
            if zz == z:
                return v
        return tuple(Fraction(0) for _ in range(self.divisor.rank))

    @property
    def marked_points(self) -> tuple[BasePoint, ...]:
        pts = set(self.divisor.support) | {z for z, _ in self.colors}
        if self.infinity_point is not None:
            pts.discard(self.infinity_point)
        return tuple(sorted(pts))

    @property
    def color_denominator(self) -> int:
        d = 1
        for a in self.color(self.base_point):
            d = lcm(d, a.denominator)
        return d

    def degree_vertex(self) -> tuple[Fraction, ...]:
        total = tuple(Fraction(0) for _ in range(self.divisor.rank))
        for z in self.marked_points:
            total = vadd(total, tuple(z.degree * a for a in self.color(z)))
        return total

    def restricted_degree_polyhedron(self) -> Polyhedron:
        d = self.divisor
        if d.curve is PROJECTIVE_LINE:
            restricted = PolyhedralDivisor.of(
                d.curve, d.tail,
                [(z, p) for z, p in d.coefficients if z != self.infinity_point])
            return degree_polyhedron(restricted)
        total = Polyhedron.cone_as_polyhedron(d.tail)
        from .convex import dilate, minkowski_sum
        for z, poly in d.coefficients:
            total = minkowski_sum(total, dilate(poly, z.degree))
        return total


def validate_coloring(cd: ColoredDivisor) -> ConditionReport:
    """Checks the colored-divisor axioms; reports the color denominator."""
    results = []
    d = cd.divisor
    ok, cert = is_proper(d)
    note = cert
    if d.curve is PROJECTIVE_LINE:
        if cd.infinity_point is None:
            ok, note = False, "projective base needs a point at infinity"
        elif not cd.infinity_point.is_rational:
            ok, note = False, "point at infinity must be rational"
    elif cd.infinity_point is not None:
        ok, note = False, "affine base has no point at infinity"
    if ok and not cd.base_point.is_rational:
        ok, note = False, "base point must be rational"
    results.append(("divisor_and_points", ok, note))

    ok, note = True, "every color is a vertex of its coefficient"
    for z in cd.marked_points:
        poly = d.coefficient(z)
        if cd.color(z) not in poly.vertices:
            ok, note = False, f"color {cd.color(z)} at {z} is not a vertex"
            break
    results.append(("colors_are_vertices", ok, note))

    vdeg = cd.degree_vertex()
    degp = cd.restricted_degree_polyhedron()
    ok = vdeg in degp.vertices
    results.append(("degree_vertex", ok,
                    f"v_deg = ({', '.join(map(str, vdeg))})"))

    ok, note = True, f"color denominator d = {cd.color_denominator}"
    for z in cd.marked_points:
        if z == cd.base_point:
            continue
        if any(a.denominator != 1 for a in cd.color(z)):
            ok, note = False, f"non-integral color away from the base point at {z}"
            break
    results.append(("integrality_away_from_base", ok, note))
    return ConditionReport(tuple(results))


def associated_cones(cd: ColoredDivisor) -> tuple[Cone, Cone]:
    """(kernel weight cone omega, augmented cone in one rank higher).

    omega's dual is spanned by the restricted degree polyhedron minus its
    chosen vertex; the augmented cone is spanned by that dual at level 0,
    the base color at level 1 and, on a projective base, the polyhedron
    at infinity shifted by the degree-vertex defect at level -1.
    """
    report = validate_coloring(cd)
    if not report.all_pass:
        raise ActionError(f"invalid coloring:\n{report}")
    d = cd.divisor
    n = d.rank
    vdeg = cd.degree_vertex()
    degp = cd.restricted_degree_polyhedron()
    gens = [vsub(v, vdeg) for v in degp.vertices] + list(degp.tail.rays)
    omega_dual = Cone.from_rays(gens, n)
    omega = cone_dual(omega_dual)
    v0 = cd.color(cd.base_point)
    aug = [tuple(r) + (0,) for r in omega_dual.rays] + [tuple(v0) + (Fraction(1),)]
    if d.curve is PROJECTIVE_LINE:
        dinf = d.coefficient(cd.infinity_point)
        shift = vsub(vdeg, v0)
        for w in dinf.vertices:
            aug.append(tuple(vadd(w, shift)) + (Fraction(-1),))
    augmented = Cone.from_rays(aug, n + 1)
    return omega, augmented


@dataclass(frozen=True)
class CoherentAssemblage:
    """Colored divisor with a degree vector, exponent sequence and scalars.

    ``char_exponent`` is 1 in characteristic zero, otherwise the prime p;
    the exponent sequence feeds pure integer arithmetic only.
    """

    colored: ColoredDivisor
    degree: IVec
    exponents: tuple[int, ...]
    scalars: tuple[Fraction, ...]
    char_exponent: int

    @staticmethod
    def of(colored: ColoredDivisor, degree: Sequence, exponents: Sequence[int],
           scalars: Sequence, char_exponent: int = 1) -> "CoherentAssemblage":
        exps = tuple(int(s) for s in exponents)
        if list(exps) != sorted(set(exps)):
            raise ActionError("exponent sequence must be strictly increasing")
        lams = tuple(Fraction(l) for l in scalars)
        if len(lams) != len(exps) or not lams or any(l == 0 for l in lams):
            raise ActionError("scalars must be nonzero, one per exponent")
        p = int(char_exponent)
        if p != 1 and (p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1))):
            raise ActionError("characteristic exponent must be 1 or a prime")
        if p == 1 and len(exps) != 1:
            raise ActionError("characteristic zero admits a single exponent")
        return CoherentAssemblage(colored, tuple(int(a) for a in degree),
                                  exps, lams, p)

    @property
    def p_power_part(self) -> int:
        """k with d = l * p^k, gcd(l, p) = 1."""
        d, p, k = self.colored.color_denominator, self.char_exponent, 0
        if p == 1:
            return 0
        while d % p == 0:
            d //= p
            k += 1
        return k


def assemblage_check(ca: CoherentAssemblage) -> ConditionReport:
    """The coherence axioms: root condition on the augmented cone, and the
    floor inequalities at colored points, the base point and infinity."""
    results = []
    cd = ca.colored
    d = cd.divisor
    p = ca.char_exponent
    dd = cd.color_denominator
    k = ca.p_power_part
    pk = p ** k
    v0 = cd.color(cd.base_point)
    try:
        omega, augmented = associated_cones(cd)
    except ActionError as err:
        return ConditionReport((("coloring", False, str(err)),))

    rho_tilde = primitive(tuple(dd * a for a in v0) + (dd,))
    ok, note = True, ""
    details = []
    for s_i in ca.exponents:
        scaled_e = tuple(p ** s_i * a for a in ca.degree)
        u_i = -Fraction(1, dd) - dot(scaled_e, v0)
        if u_i.denominator != 1:
            ok, note = False, f"u_{s_i} = {u_i} is not an integer"
            break
        root = is_demazure_root(augmented, scaled_e + (int(u_i),))
        if root is None or root.distinguished_ray != rho_tilde:
            ok = False
            note = f"({scaled_e}, {u_i}) is not a root with distinguished ray {rho_tilde}"
            break
        details.append(f"u = {u_i}")
    if ok:
        note = f"rho~ = {rho_tilde}, " + ", ".join(details)
    results.append(("root_condition", ok, note))

    s1 = ca.exponents[0]
    e1 = tuple(p ** s1 * a for a in ca.degree)

    ok, note = True, "no uncolored vertices away from the base point"
    for z in cd.marked_points:
        if z == cd.base_point:
            continue
        vz = cd.color(z)
        for v in d.coefficient(z).vertices:
            if v == vz:
                continue
            lhs = pk * dot(e1, v)
            rhs = 1 + pk * dot(e1, vz)
            note = f"at {z}: {lhs} >= {rhs}"
            if lhs < rhs:
                ok, note = False, f"at {z}, vertex {v}: {lhs} < {rhs}"
                break
        if not ok:
            break
    results.append(("uncolored_vertices", ok, note))

    ok, note = True, "no other vertices at the base point"
    for v in d.coefficient(cd.base_point).vertices:
        if v == tuple(v0):
            continue
        lhs = dd * dot(e1, v)
        rhs = 1 + dd * dot(e1, v0)
        note = f"{lhs} >= {rhs}"
        if lhs < rhs:
            ok, note = False, f"vertex {v}: {lhs} < {rhs}"
            break
    results.append(("base_point_vertices", ok, note))

    if d.curve is PROJECTIVE_LINE:
        ok, note = True, ""
        vdeg = cd.degree_vertex()
        rhs = -1 - dd * dot(e1, vdeg)
        for v in d.coefficient(cd.infinity_point).vertices:
            lhs = dd * dot(e1, v)
            note = f"{lhs} >= {rhs}"
            if lhs < rhs:
                ok, note = False, f"vertex {v}: {lhs} < {rhs}"
                break
        results.append(("infinity_vertices", ok, note))
    return ConditionReport(tuple(results))


def _support_function_on(poly: Polyhedron, m) -> Fraction:
    return min(dot(m, v) for v in poly.vertices)


@dataclass(frozen=True)
class PointNormalization:
    """Recorded degree-one parameter change moving the marked points to 0/inf."""

    shift: Fraction           # t -> t - shift first
    invert: bool              # then t -> 1/t

    @property
    def is_identity(self) -> bool:
        return self.shift == 0 and not self.invert


def _normalize_points(d: PolyhedralDivisor, z0: BasePoint,
                      zinf: BasePoint | None
                      ) -> tuple[PolyhedralDivisor, PointNormalization]:
    """Move the base point to 0 (and the infinity point to infinity)."""
    origin = BasePoint.rational(0)
    inf = BasePoint.infinity()
    if z0 == origin and (zinf is None or zinf == inf):
        return d, PointNormalization(Fraction(0), False)
    if zinf is not None and zinf != inf:
        raise ActionError("only shifts are implemented: the point at infinity "
                          "must already be the place at infinity")
    if z0.kind != "finite" or not z0.is_rational:
        raise ActionError("base point must be a finite rational point")
    c = -z0.poly[0]  # z0 is the place t - c

    def move(z: BasePoint) -> BasePoint:
        if z.kind != "finite":
            return z
        from . import polynomials as up
        shifted = up.substitute(z.poly, (c, Fraction(1)))  # q(t + c)
        return BasePoint.finite(shifted)

    moved = PolyhedralDivisor.of(d.curve, d.tail,
                                 [(move(z), poly) for z, poly in d.coefficients])
    return moved, PointNormalization(shift=c, invert=False)


def horizontal_conditions(d: PolyhedralDivisor, omega: Cone, e: Sequence,
                          char_exponent: int, s1: int,
                          base_point: BasePoint | None = None,
                          infinity_point: BasePoint | None = None,
                          exhaustive_box: int | None = None) -> ConditionReport:
    """Existence conditions for a horizontal action with the given data.

    Structural parts: admissible curve, the kernel cone maximal in the
    quasi-fan (restricted away from infinity on a projective base), the
    support function integral on it away from one rational point.  The
    floor inequalities are verified on the finite surrogate sample (Hilbert
    bases of the weight cone and of each quasi-fan cone scaled by the
    divisor denominator, plus pairwise sums), or exhaustively on a lattice
    box when ``exhaustive_box`` is given.
    """
    results = []
    e = tuple(int(a) for a in e)
    p = int(char_exponent)
    if not d.curve.function_field_is_rational:
        raise WrongCurve("horizontal actions live over the affine or projective line")
    ok, cert = is_proper(d)
    if not ok:
        return ConditionReport((("proper", False, cert),))
    results.append(("curve", True, d.curve.value))

    z0 = base_point if base_point is not None else BasePoint.rational(0)
    zinf = infinity_point
    if d.curve is PROJECTIVE_LINE and zinf is None:
        zinf = BasePoint.infinity()
    normalized, change = _normalize_points(d, z0, zinf)
    restricted = normalized if d.curve is AFFINE_LINE else \
        normalized.restrict([BasePoint.infinity()])
    note = "already normalized" if change.is_identity else \
        f"recorded parameter change t -> t - ({change.shift})"
    results.append(("normalization", True, note))

    fan = quasifan(restricted)
    ok = omega in fan
    results.append(("kernel_cone_maximal", ok,
                    "omega is a maximal quasi-fan cone" if ok else
                    f"omega not among {len(fan)} maximal cones"))
    if not ok:
        return ConditionReport(tuple(results))

    origin = BasePoint.rational(0)
    # support function on omega is linear, given by the minimizing vertex
    def omega_vertex(z: BasePoint):
        poly = normalized.coefficient(z)
        interior = tuple(sum(col) for col in zip(*omega.rays))
        best = min(poly.vertices, key=lambda v: dot(interior, v))
        assert all(dot(m, best) == _support_function_on(poly, m) for m in omega.rays)
        return best

    ok, note = True, "support functions integral away from the base point"
    for z, poly in restricted.coefficients:
        if z == origin:
            continue
        vz = omega_vertex(z)
        if any(Fraction(a).denominator != 1 for a in vz):
            ok, note = False, f"support function at {z} is not integral on omega"
            break
    results.append(("integral_away_from_base", ok, note))
    if not ok:
        return ConditionReport(tuple(results))

    v0 = omega_vertex(origin)
    dd = 1
    for a in v0:
        dd = lcm(dd, Fraction(a).denominator)
    k = 0
    l = dd
    if p != 1:
        while l % p == 0:
            l //= p
            k += 1
    pk = p ** k

    u = -Fraction(1, dd) - dot(tuple(p ** s1 * a for a in e), v0)
    ok = u.denominator == 1
    results.append(("degree_integrality", ok, f"u = {u}, d = {dd}"))
    if not ok:
        return ConditionReport(tuple(results))

    e1 = tuple(p ** s1 * a for a in e)
    weight = cone_dual(normalized.tail)
    if exhaustive_box is not None:
        sample = [m for m in itertools.product(
            range(-exhaustive_box, exhaustive_box + 1), repeat=d.rank)
            if weight.contains(m)]
    else:
        denom = normalized.denominator()
        probes = set(hilbert_basis(weight))
        for cone in quasifan(restricted):
            for r in cone.rays:
                probes.add(tuple(denom * a for a in r))
        sample = set(probes)
        sample.update(vadd(a, b) for a in probes for b in probes)
        sample = sorted(sample)

    def h_lin(m):
        return dot(m, v0)

    def h_at(z, m):
        return _support_function_on(normalized.coefficient(z), m)

    cond3, w3 = True, "vanishing-order inequality holds on the sample"
    cond4, w4 = True, "base-point inequality holds on the sample"
    cond5, w5 = True, "infinity inequality holds on the sample"
    for m in sample:
        shifted = vadd(m, e1)
        if not weight.contains(shifted):
            continue
        for z, poly in restricted.coefficients:
            if z == origin:
                continue
            if h_at(z, shifted) != 0:
                lhs = floor(pk * h_at(z, shifted)) - floor(pk * h_at(z, m))
                if lhs < 1:
                    cond3, w3 = False, f"at {z}, m = {m}: {lhs} < 1"
        if h_at(origin, shifted) != h_lin(shifted):
            lhs = floor(dd * h_at(origin, shifted)) - floor(dd * h_at(origin, m))
            rhs = 1 - dd * h_lin(e1)
            if lhs < rhs:
                cond4, w4 = False, f"m = {m}: {lhs} < {rhs}"
        if d.curve is PROJECTIVE_LINE:
            hinf = normalized.coefficient(BasePoint.infinity())
            lhs = floor(dd * _support_function_on(hinf, shifted)) - \
                floor(dd * _support_function_on(hinf, m))
            rhs = -1 - dd * h_lin(e1)
            if lhs < rhs:
                cond5, w5 = False, f"m = {m}: {lhs} < {rhs}"
    results.append(("order_jump_away_from_base", cond3, w3))
    results.append(("base_point_floor_inequality", cond4, w4))
    if d.curve is PROJECTIVE_LINE:
        results.append(("infinity_floor_inequality", cond5, w5))
    return ConditionReport(tuple(results))


@dataclass(frozen=True)
class KernelDescription:
    sublattice_basis: tuple[IVec, ...]
    monoid_generators: tuple[IVec, ...]
    functions: tuple[tuple[IVec, RationalFunction], ...]


def horizontal_kernel(ca: CoherentAssemblage) -> KernelDescription:
    """Kernel of the horizontal action: the sublattice where the base color
    pairs integrally, the monoid generators of the kernel cone inside it,
    and the kernel functions (vanishing prescribed by the evaluation away
    from infinity)."""
    cd = ca.colored
    d = cd.divisor
    n = d.rank
    v0 = cd.color(cd.base_point)
    dd = cd.color_denominator
    omega, _ = associated_cones(cd)
    # L = {m : <m, v0> in Z} = kernel of m -> d*<m, v0> mod d
    row = tuple(int(dd * a) for a in v0)
    lattice = _pairing_kernel_basis(row, dd, n)
    # Hilbert basis of omega within the sublattice
    base_change = list(lattice)
    cone_in_l = Cone.from_halfspaces(
        [[sum(h[j] * b[j] for j in range(n)) for b in base_change]
         for h in omega.halfspaces], n)
    gens_in_l = hilbert_basis(cone_in_l)
    monoid = tuple(sorted(
        tuple(sum(c * b[j] for c, b in zip(g, base_change)) for j in range(n))
        for g in gens_in_l))
    exclude = [cd.infinity_point] if cd.infinity_point is not None else []
    funcs = []
    for m in monoid:
        ev = evaluate(d, m).restrict(exclude)
        assert ev.is_integral, (m, ev)
        if d.curve.function_field_is_rational:
            fac = {z.poly: -int(a) for z, a in ev.coefficients if z.kind == "finite"}
            funcs.append((m, RationalFunction.from_factored(1, fac)))
        else:
            raise WrongCurve("horizontal kernels live over function fields")
    return KernelDescription(tuple(lattice), monoid, tuple(funcs))


def _pairing_kernel_basis(row: IVec, modulus: int, n: int) -> tuple[IVec, ...]:
    """Canonical basis of {m in Z^n : <m, row> = 0 mod modulus}."""
    candidates = [tuple(modulus if i == j else 0 for j in range(n)) for i in range(n)]
    # augmented HNF trick: solutions are projections of the kernel of
    # (row | -modulus) in Z^{n+1}
    rows = [row + (-modulus,)]
    full = integer_kernel_basis(rows, n + 1)
    vecs = [v[:n] for v in full]
    return tuple(hnf([v for v in vecs if any(v)] + candidates))


def horizontal_exponential(ca: CoherentAssemblage, el: HomogeneousElement,
                           ) -> ExponentialExpansion:
    """Characteristic-zero expansion of the horizontal action on t^l chi^m.

    Works in the degree-d root cover of the parameter: the i-th term is
    binom(d(h(m) + l), i) lambda^i t^{l + i u} chi^{m + i e}, every term
    checked to land back in the section algebra.
    """
    cd = ca.colored
    d = cd.divisor
    if ca.char_exponent != 1:
        raise ActionError("exponential evaluation is characteristic zero only")
    omega, _ = associated_cones(cd)
    report = assemblage_check(ca)
    if not report.all_pass:
        raise ConditionsFail(f"assemblage is not coherent:\n{report}")
    if not member(el, d):
        raise NonMember(f"{el} is not in the section algebra")
    normalized, change = _normalize_points(d, cd.base_point, cd.infinity_point)
    if not change.is_identity:
        raise ActionError("exponentials expect normalized marked points")
    func = el.function
    ell = func.ord_at(BasePoint.rational(0))
    quot = func / RationalFunction.variable(ell) if ell else func
    if quot.factors:
        raise ActionError("exponentials expect elements of the form c * t^l chi^m")
    scale0 = quot.constant
    v0 = cd.color(cd.base_point)
    dd = cd.color_denominator
    lam = ca.scalars[0]
    u = -Fraction(1, dd) - dot(ca.degree, v0)
    assert u.denominator == 1
    u = int(u)
    h_m = dot(el.degree, v0)
    a = dd * (h_m + ell)
    assert a == int(a) and a >= 0, a
    a = int(a)
    terms = []
    for i in range(a + 1):
        coeff = scale0 * comb(a, i) * lam ** i
        if coeff == 0:
            continue
        func_i = RationalFunction.variable(ell + i * u).scaled(coeff) \
            if ell + i * u else RationalFunction.from_factored(coeff)
        term = HomogeneousElement(func_i, vadd(el.degree,
                                               tuple(i * c for c in ca.degree)))
        if not member(term, d):
            raise NonMember(f"term {term} left the section algebra")
        terms.append((i, term))
    return ExponentialExpansion(tuple(terms))


def axiom_check(expansion_of: Callable[[HomogeneousElement], ExponentialExpansion],
                samples: Sequence[tuple[HomogeneousElement, HomogeneousElement]],
                ) -> ConditionReport:
    """Iterative higher-derivation axioms on sample pairs.

    Checks the identity term, local finiteness (expansions are finite by
    construction), the Leibniz rule via multiplicativity of exponentials,
    and iterativity binom(i+j, i) * term_{i+j} = expansion-of-term_i at j.
    """
    identity_ok, id_note = True, "zeroth term is the input"
    leibniz_ok, leib_note = True, "exponential is multiplicative on all samples"
    iter_ok, iter_note = True, "iterative rule holds on all samples"
    for a, b in samples:
        ea, eb = expansion_of(a), expansion_of(b)
        for ex in (ea, eb):
            if ex.terms[0][0] != 0 or not ex.terms[0][1].same_as(ex.input):
                identity_ok, id_note = False, f"zeroth term mismatch for {ex.input}"
        eab = expansion_of(a * b)
        if not eab.same_as(ea * eb):
            leibniz_ok, leib_note = False, f"e(ab) != e(a)e(b) for {a}, {b}"
        for i, term in ea.terms:
            if i > 3:
                break
            sub = expansion_of(term)
            for j, got in sub.terms:
                if j > 3:
                    break
                expected = ea.term(i + j)
                if expected is None:
                    iter_ok = False
                    iter_note = f"term ({i},{j}) of {a} should vanish"
                elif not got.same_as(expected.scaled(comb(i + j, i))):
                    iter_ok = False
                    iter_note = f"iterativity fails at ({i},{j}) on {a}"
    return ConditionReport((
        ("identity", identity_ok, id_note),
        ("local_finiteness", True, "every expansion is a finite sum"),
        ("leibniz_multiplicativity", leibniz_ok, leib_note),
        ("iterativity", iter_ok, iter_note),
    ))
