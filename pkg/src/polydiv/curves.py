"""One-dimensional bases: the affine and projective lines over Q, and Spec Z.

Rational functions are kept in factored form over a gcd-free basis of monic
squarefree polynomials (or of primes, over Spec Z); every algorithm
downstream consumes only vanishing orders and residue degrees, so a basis
factor that secretly splits further changes nothing (all its points would
receive identical coefficients everywhere).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping

from . import polynomials as up
from .polynomials import Poly


class CurveError(ValueError):
    pass


class WrongCurve(CurveError):
    pass


class BaseCurve(enum.Enum):
    AFFINE_LINE = "A1"
    PROJECTIVE_LINE = "P1"
    SPEC_Z = "SpecZ"

    @property
    def is_affine(self) -> bool:
        return self is not BaseCurve.PROJECTIVE_LINE

    @property
    def function_field_is_rational(self) -> bool:
        return self is not BaseCurve.SPEC_Z


AFFINE_LINE = BaseCurve.AFFINE_LINE
PROJECTIVE_LINE = BaseCurve.PROJECTIVE_LINE
SPEC_Z = BaseCurve.SPEC_Z


@dataclass(frozen=True, order=True)
class BasePoint:
    """A closed point: monic polynomial place, the place at infinity, or a prime."""

    kind: str  # "finite" | "infinity" | "prime"
    poly: Poly = ()
    prime: int = 0

    @staticmethod
    def finite(coeffs: Iterable) -> "BasePoint":
        p = up.monic(up.poly(coeffs))
        if up.degree(p) < 1:
            raise CurveError("a finite place needs a nonconstant polynomial")
        if up.degree(up.gcd(p, up.derivative(p))) > 0:
            raise CurveError(f"place polynomial {up.to_string(p)} is not squarefree")
        if 2 <= up.degree(p) <= 3 and _has_rational_root(p):
            raise CurveError(f"place polynomial {up.to_string(p)} splits over Q")
        return BasePoint(kind="finite", poly=p)

    @staticmethod
    def rational(value) -> "BasePoint":
        return BasePoint.finite([-Fraction(value), 1])

    @staticmethod
    def infinity() -> "BasePoint":
        return BasePoint(kind="infinity")

    @staticmethod
    def of_prime(p: int) -> "BasePoint":
        if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
            raise CurveError(f"{p} is not prime")
        return BasePoint(kind="prime", prime=p)

    @property
    def degree(self) -> int:
        if self.kind == "finite":
            return up.degree(self.poly)
        return 1

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    def on_curve(self, curve: BaseCurve) -> bool:
        if self.kind == "prime":
            return curve is SPEC_Z
        if self.kind == "infinity":
            return curve is PROJECTIVE_LINE
        return curve is not SPEC_Z

    def __repr__(self) -> str:
        if self.kind == "infinity":
            return "[inf]"
        if self.kind == "prime":
            return f"({self.prime})"
        return f"[{up.to_string(self.poly)}]"


def _has_rational_root(p: Poly) -> bool:
    """Exact rational-root test (clears denominators, scans p/q candidates)."""
    denom = 1
    for a in p:
        denom = lcm(denom, a.denominator)
    ints = [int(a * denom) for a in p]
    if ints[0] == 0:
        return True
    lead, const = abs(ints[-1]), abs(ints[0])
    num_divs = [d for d in range(1, const + 1) if const % d == 0]
    den_divs = [d for d in range(1, lead + 1) if lead % d == 0]
    for pn in num_divs:
        for qd in den_divs:
            for cand in (Fraction(pn, qd), Fraction(-pn, qd)):
                if up.evaluate(p, cand) == 0:
                    return True
    return False


def _factor_integer(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    n = abs(n)
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _refine_factor(basis: list[Poly], f: Poly) -> dict[Poly, int]:
    """Express the squarefree monic f over a growing pairwise-coprime basis."""
    exps: dict[Poly, int] = {}
    queue = [f]
    while queue:
        g = queue.pop()
        if up.degree(g) < 1:
            continue
        for b in list(basis):
            d = up.gcd(g, b)
            if up.degree(d) < 1:
                continue
            if d == b:
                exps[b] = exps.get(b, 0) + 1
                queue.append(up.monic(up.exact_div(g, b)))
                break
            # split the basis element itself
            basis.remove(b)
            basis.append(d)
            basis.append(up.monic(up.exact_div(b, d)))
            queue.append(g)
            break
        else:
            basis.append(g)
            exps[g] = exps.get(g, 0) + 1
    return exps


@dataclass(frozen=True)
class RationalFunction:
    """Nonzero element of Q(t) (or Q*, over Spec Z) in factored form.

    ``factors`` maps monic squarefree pairwise-coprime polynomials to
    integer exponents; over Spec Z it maps primes to exponents and the
    constant is +/-1.
    """

    curve_kind: str  # "function_field" | "spec_z"
    constant: Fraction
    factors: tuple[tuple, ...]  # sorted ((poly or prime, exponent), ...)

    @staticmethod
    def from_factored(constant, factored: Mapping[Poly, int] | None = None) -> "RationalFunction":
        c = Fraction(constant)
        if c == 0:
            raise CurveError("rational functions are nonzero")
        basis: list[Poly] = []
        exps: dict[Poly, int] = {}
        for f, e in (factored or {}).items():
            f = up.monic(up.poly(f))
            if up.degree(f) < 1:
                raise CurveError("factors must be nonconstant")
            for sf, mult in up.squarefree_decomposition(f):
                for b, k in _refine_factor(basis, sf).items():
                    exps[b] = exps.get(b, 0) + k * mult * e
        # re-express everything over the final refined basis
        final: dict[Poly, int] = {}
        for b, e in exps.items():
            if e == 0:
                continue
            rem = b
            for bb in basis:
                m = up.multiplicity(rem, bb)
                if m:
                    final[bb] = final.get(bb, 0) + m * e
                    for _ in range(m):
                        rem = up.exact_div(rem, bb)
        items = tuple(sorted((b, e) for b, e in final.items() if e != 0))
        return RationalFunction("function_field", c, items)

    @staticmethod
    def rational_number(value) -> "RationalFunction":
        v = Fraction(value)
        if v == 0:
            raise CurveError("rational functions are nonzero")
        fac: dict[int, int] = {}
        for p, e in _factor_integer(v.numerator).items():
            fac[p] = fac.get(p, 0) + e
        for p, e in _factor_integer(v.denominator).items():
            fac[p] = fac.get(p, 0) - e
        sign = Fraction(1 if v > 0 else -1)
        items = tuple(sorted((p, e) for p, e in fac.items() if e != 0))
        return RationalFunction("spec_z", sign, items)

    @staticmethod
    def one(curve: BaseCurve) -> "RationalFunction":
        if curve is SPEC_Z:
            return RationalFunction.rational_number(1)
        return RationalFunction.from_factored(1)

    @staticmethod
    def variable(exponent: int = 1) -> "RationalFunction":
        return RationalFunction.from_factored(1, {up.X: exponent})

    @staticmethod
    def _build(kind: str, constant: Fraction, factors: Mapping) -> "RationalFunction":
        # trusted constructor: factors already canonical for this kind
        items = tuple(sorted((b, e) for b, e in factors.items() if e != 0))
        return RationalFunction(kind, constant, items)

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        if self.curve_kind != other.curve_kind:
            raise CurveError("cannot mix function fields")
        merged: dict = {}
        for b, e in self.factors + other.factors:
            merged[b] = merged.get(b, 0) + e
        if self.curve_kind == "spec_z":
            return RationalFunction._build("spec_z", self.constant * other.constant,
                                           merged)
        # both operands are internally refined; only cross-basis overlaps can
        # force a new refinement
        mine = {b for b, _ in self.factors}
        theirs = {b for b, _ in other.factors}
        compatible = all(
            up.degree(up.gcd(a, b)) == 0
            for a in mine - theirs for b in theirs - mine)
        if compatible:
            return RationalFunction._build("function_field",
                                           self.constant * other.constant, merged)
        return RationalFunction.from_factored(self.constant * other.constant, merged)

    def inverse(self) -> "RationalFunction":
        return RationalFunction._build(
            self.curve_kind, 1 / self.constant, {b: -e for b, e in self.factors})

    def __truediv__(self, other: "RationalFunction") -> "RationalFunction":
        return self * other.inverse()

    def __pow__(self, n: int) -> "RationalFunction":
        if n == 0:
            return RationalFunction._build(self.curve_kind, Fraction(1), {})
        return RationalFunction._build(
            self.curve_kind, self.constant ** n, {b: n * e for b, e in self.factors})

    def scaled(self, c) -> "RationalFunction":
        c = Fraction(c)
        if c == 0:
            raise CurveError("rational functions are nonzero")
        if self.curve_kind == "spec_z":
            return RationalFunction.rational_number(self.value() * c)
        return RationalFunction._build("function_field", self.constant * c,
                                       dict(self.factors))

    def value(self) -> Fraction:
        """The rational number this represents (Spec Z functions only)."""
        if self.curve_kind != "spec_z":
            raise CurveError("value() is for Spec Z elements")
        v = self.constant
        for p, e in self.factors:
            v *= Fraction(p) ** e
        return v

    def as_quotient(self) -> tuple[Poly, Poly]:
        """(numerator, denominator) polynomials, exact."""
        if self.curve_kind != "function_field":
            raise CurveError("as_quotient() is for function-field elements")
        num = up.poly([self.constant])
        den = up.ONE
        for b, e in self.factors:
            for _ in range(abs(e)):
                if e > 0:
                    num = up.mul(num, b)
                else:
                    den = up.mul(den, b)
        return num, den

    def add(self, other: "RationalFunction") -> "RationalFunction | None":
        """Exact sum; None encodes zero (which is not a RationalFunction)."""
        if self.curve_kind != other.curve_kind:
            raise CurveError("cannot mix function fields")
        if self.curve_kind == "spec_z":
            s = self.value() + other.value()
            return None if s == 0 else RationalFunction.rational_number(s)
        n1, d1 = self.as_quotient()
        n2, d2 = other.as_quotient()
        num = up.add(up.mul(n1, d2), up.mul(n2, d1))
        if up.is_zero(num):
            return None
        den = up.mul(d1, d2)
        c = up.leading(num) / up.leading(den)
        fac: dict[Poly, int] = {}
        for poly, exp in ((up.monic(num), 1), (up.monic(den), -1)):
            if up.degree(poly) > 0:
                fac[poly] = fac.get(poly, 0) + exp
        return RationalFunction.from_factored(c, fac)

    def ord_at(self, z: BasePoint) -> int:
        if self.curve_kind == "spec_z":
            if z.kind != "prime":
                raise WrongCurve("Spec Z elements have orders at primes")
            return dict(self.factors).get(z.prime, 0)
        if z.kind == "prime":
            raise WrongCurve("function-field elements have no prime places")
        if z.kind == "infinity":
            return -sum(e * up.degree(b) for b, e in self.factors)
        total = 0
        for b, e in self.factors:
            total += e * up.multiplicity(b, z.poly)
        return total

    def is_one(self) -> bool:
        return self.constant == 1 and not self.factors

    def same_as(self, other: "RationalFunction") -> bool:
        """Semantic equality: division refines both onto a common basis."""
        if self.curve_kind == other.curve_kind and self.factors == other.factors:
            return self.constant == other.constant
        return (self / other).is_one()

    def __repr__(self) -> str:
        if self.curve_kind == "spec_z":
            return str(self.value())
        parts = [] if self.constant == 1 and self.factors else [str(self.constant)]
        for b, e in self.factors:
            s = f"({up.to_string(b)})"
            parts.append(s if e == 1 else f"{s}^{e}")
        return "*".join(parts) if parts else "1"


def ord_at(f: RationalFunction, z: BasePoint) -> int:
    return f.ord_at(z)


@dataclass(frozen=True)
class Divisor:
    """Rational Weil divisor: finite map point -> coefficient, no zeros stored."""

    curve: BaseCurve
    coefficients: tuple[tuple[BasePoint, Fraction], ...]

    @staticmethod
    def of(curve: BaseCurve, coeffs: Mapping[BasePoint, object] | Iterable) -> "Divisor":
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        acc: dict[BasePoint, Fraction] = {}
        for z, a in items:
            if not z.on_curve(curve):
                raise WrongCurve(f"{z} does not lie on {curve.value}")
            acc[z] = acc.get(z, Fraction(0)) + Fraction(a)
        return Divisor(curve, tuple(sorted((z, a) for z, a in acc.items() if a != 0)))

    @staticmethod
    def zero(curve: BaseCurve) -> "Divisor":
        return Divisor(curve, ())

    def coefficient(self, z: BasePoint) -> Fraction:
        return dict(self.coefficients).get(z, Fraction(0))

    @property
    def support(self) -> tuple[BasePoint, ...]:
        return tuple(z for z, _ in self.coefficients)

    def __add__(self, other: "Divisor") -> "Divisor":
        if self.curve != other.curve:
            raise WrongCurve("divisors on different curves")
        return Divisor.of(self.curve, list(self.coefficients) + list(other.coefficients))

    def __neg__(self) -> "Divisor":
        return Divisor(self.curve, tuple((z, -a) for z, a in self.coefficients))

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def scaled(self, c) -> "Divisor":
        return Divisor.of(self.curve, [(z, Fraction(c) * a) for z, a in self.coefficients])

    def floor(self) -> "Divisor":
        from math import floor as _floor
        return Divisor.of(self.curve, [(z, _floor(a)) for z, a in self.coefficients])

    @property
    def is_integral(self) -> bool:
        return all(a.denominator == 1 for _, a in self.coefficients)

    @property
    def is_effective(self) -> bool:
        return all(a >= 0 for _, a in self.coefficients)

    def degree(self) -> Fraction:
        return sum((Fraction(z.degree) * a for z, a in self.coefficients), Fraction(0))

    def restrict(self, excluded: Iterable[BasePoint]) -> "Divisor":
        cut = set(excluded)
        return Divisor(self.curve, tuple((z, a) for z, a in self.coefficients
                                         if z not in cut))

    def denominator(self) -> int:
        d = 1
        for _, a in self.coefficients:
            d = lcm(d, a.denominator)
        return d

    def __repr__(self) -> str:
        if not self.coefficients:
            return "0"
        return " + ".join(f"{a}*{z}" for z, a in self.coefficients)


def principal_divisor(f: RationalFunction, curve: BaseCurve) -> Divisor:
    if curve is SPEC_Z:
        return Divisor.of(curve, [(BasePoint.of_prime(p), e) for p, e in f.factors])
    coeffs = [(BasePoint(kind="finite", poly=b), e) for b, e in f.factors]
    if curve is PROJECTIVE_LINE:
        coeffs.append((BasePoint.infinity(), f.ord_at(BasePoint.infinity())))
    return Divisor.of(curve, coeffs)


def floor_divisor(d: Divisor) -> Divisor:
    return d.floor()


def divisor_degree(d: Divisor) -> Fraction:
    return d.degree()


def is_principal(d: Divisor) -> bool:
    if d.curve is not PROJECTIVE_LINE:
        raise WrongCurve("principality test is for the projective line")
    return d.degree() == 0


@dataclass(frozen=True)
class SectionModule:
    """Global sections of O(floor(D)) in one of three shapes.

    kind "free": rank-1 free module with the stored generator;
    kind "space": finite-dimensional Q-vector space with the stored basis;
    kind "zero": the zero module.
    """

    kind: str
    generators: tuple[RationalFunction, ...]

    @staticmethod
    def free(gen: RationalFunction) -> "SectionModule":
        return SectionModule("free", (gen,))

    @staticmethod
    def space(basis: Iterable[RationalFunction]) -> "SectionModule":
        basis = tuple(basis)
        return SectionModule("space", basis) if basis else SectionModule.zero()

    @staticmethod
    def zero() -> "SectionModule":
        return SectionModule("zero", ())

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero"

    @property
    def generator(self) -> RationalFunction:
        assert self.kind == "free"
        return self.generators[0]

    def dimension(self) -> int | None:
        """Q-dimension for vector spaces, None for free modules."""
        if self.kind == "zero":
            return 0
        if self.kind == "space":
            return len(self.generators)
        return None

    def __repr__(self) -> str:
        if self.kind == "zero":
            return "0"
        if self.kind == "free":
            return f"<{self.generators[0]}> (free rank 1)"
        return "span{" + ", ".join(map(str, self.generators)) + "}"


def sections(d: Divisor) -> SectionModule:
    """H^0 of O(floor(D)): free over Q[t] or Z on affine bases, a Q-space on P1."""
    dd = d.floor()
    if d.curve is SPEC_Z:
        gen = Fraction(1)
        for z, a in dd.coefficients:
            gen *= Fraction(z.prime) ** (-int(a))
        return SectionModule.free(RationalFunction.rational_number(gen))
    gen_factors = {z.poly: -int(a) for z, a in dd.coefficients if z.kind == "finite"}
    gen = RationalFunction.from_factored(1, gen_factors)
    if d.curve is AFFINE_LINE:
        return SectionModule.free(gen)
    deg = int(dd.degree())
    if deg < 0:
        return SectionModule.zero()
    return SectionModule.space(
        gen * RationalFunction.variable(j) if j else gen for j in range(deg + 1))
