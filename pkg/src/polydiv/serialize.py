"""Canonical JSON serialization for problem files and results.

Rationals travel as "p/q" strings, polynomials as ascending coefficient
arrays, points as {"poly": [...]}, "infinity" or {"prime": p}.  Parsing is
strict: unknown fields are rejected, and every error carries the path of
the offending field.  Serialization is deterministic (sorted keys,
canonical rational strings), so fixtures can be compared byte for byte.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Mapping

from .convex import Cone, Polyhedron
from .curves import (
    AFFINE_LINE,
    PROJECTIVE_LINE,
    SPEC_Z,
    BaseCurve,
    BasePoint,
    Divisor,
    RationalFunction,
    SectionModule,
)
from .divisors import HomogeneousElement, PolyhedralDivisor
from .gaactions import CoherentAssemblage, ColoredDivisor
from .ideals import GradedIdealPresentation, MonomialIdeal


class SchemaError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def parse_rational(value, path: str = "$") -> Fraction:
    if isinstance(value, bool):
        raise SchemaError(path, "expected a rational, got a boolean")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as err:
            raise SchemaError(path, f"malformed rational {value!r}: {err}") from None
    raise SchemaError(path, f"expected a rational, got {type(value).__name__}")


def rational_str(value) -> str | int:
    f = Fraction(value)
    return int(f) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _expect_keys(obj: Mapping, path: str, required: set[str], optional: set[str] = set()):
    if not isinstance(obj, Mapping):
        raise SchemaError(path, f"expected an object, got {type(obj).__name__}")
    missing = required - set(obj)
    if missing:
        raise SchemaError(path, f"missing fields {sorted(missing)}")
    unknown = set(obj) - required - optional
    if unknown:
        raise SchemaError(path, f"unknown fields {sorted(unknown)}")


def parse_vector(value, path: str) -> tuple[Fraction, ...]:
    if not isinstance(value, list):
        raise SchemaError(path, "expected an array of rationals")
    return tuple(parse_rational(a, f"{path}[{i}]") for i, a in enumerate(value))


def parse_integer_vector(value, path: str) -> tuple[int, ...]:
    vec = parse_vector(value, path)
    for i, a in enumerate(vec):
        if a.denominator != 1:
            raise SchemaError(f"{path}[{i}]", f"expected an integer, got {a}")
    return tuple(int(a) for a in vec)


def parse_curve(value, path: str = "$.curve") -> BaseCurve:
    names = {"A1": AFFINE_LINE, "P1": PROJECTIVE_LINE, "SpecZ": SPEC_Z}
    if value not in names:
        raise SchemaError(path, f"curve must be one of {sorted(names)}")
    return names[value]


def parse_point(value, curve: BaseCurve, path: str) -> BasePoint:
    if value == "infinity":
        return BasePoint.infinity()
    _expect_keys(value, path, set(), {"poly", "prime"})
    if "poly" in value and "prime" in value:
        raise SchemaError(path, "point has both poly and prime")
    if "prime" in value:
        if not isinstance(value["prime"], int):
            raise SchemaError(f"{path}.prime", "expected an integer prime")
        return BasePoint.of_prime(value["prime"])
    if "poly" in value:
        return BasePoint.finite(parse_vector(value["poly"], f"{path}.poly"))
    raise SchemaError(path, "point needs poly, prime or \"infinity\"")


def point_doc(z: BasePoint):
    if z.kind == "infinity":
        return "infinity"
    if z.kind == "prime":
        return {"prime": z.prime}
    return {"poly": [rational_str(a) for a in z.poly]}


def parse_function(value, curve: BaseCurve, path: str) -> RationalFunction:
    _expect_keys(value, path, {"constant"}, {"factors"})
    const = parse_rational(value["constant"], f"{path}.constant")
    factors = value.get("factors", [])
    if not isinstance(factors, list):
        raise SchemaError(f"{path}.factors", "expected an array")
    if curve is SPEC_Z:
        out = RationalFunction.rational_number(const)
        for i, fac in enumerate(factors):
            _expect_keys(fac, f"{path}.factors[{i}]", {"prime", "exp"})
            out = out * RationalFunction.rational_number(
                Fraction(fac["prime"]) ** fac["exp"])
        return out
    fmap: dict = {}
    for i, fac in enumerate(factors):
        _expect_keys(fac, f"{path}.factors[{i}]", {"poly", "exp"})
        if not isinstance(fac["exp"], int):
            raise SchemaError(f"{path}.factors[{i}].exp", "expected an integer")
        poly = parse_vector(fac["poly"], f"{path}.factors[{i}].poly")
        fmap[poly] = fmap.get(poly, 0) + fac["exp"]
    return RationalFunction.from_factored(const, fmap)


def function_doc(f: RationalFunction):
    if f.curve_kind == "spec_z":
        return {"constant": rational_str(f.value())}
    return {
        "constant": rational_str(f.constant),
        "factors": [{"poly": [rational_str(a) for a in b], "exp": e}
                    for b, e in f.factors],
    }


def parse_element(value, curve: BaseCurve, path: str) -> HomogeneousElement:
    _expect_keys(value, path, {"function", "degree"})
    return HomogeneousElement(
        parse_function(value["function"], curve, f"{path}.function"),
        parse_integer_vector(value["degree"], f"{path}.degree"))


def element_doc(el: HomogeneousElement):
    return {"function": function_doc(el.function), "degree": list(el.degree)}


def parse_cone(value, rank: int, path: str) -> Cone:
    _expect_keys(value, path, {"rays"})
    rays = [parse_vector(r, f"{path}.rays[{i}]") for i, r in enumerate(value["rays"])]
    return Cone.from_rays(rays, rank)


def cone_doc(c: Cone):
    return {"rays": [list(r) for r in c.rays]}


def polyhedron_doc(p: Polyhedron):
    return {
        "vertices": [[rational_str(a) for a in v] for v in p.vertices],
        "tail_rays": [list(r) for r in p.tail.rays],
    }


def parse_divisor(value, curve: BaseCurve, rank: int, path: str) -> PolyhedralDivisor:
    _expect_keys(value, path, {"tail", "coefficients"}, {"type", "curve"})
    if "curve" in value and value["curve"] != curve.value:
        raise SchemaError(f"{path}.curve",
                          f"divisor curve {value['curve']!r} differs from the "
                          f"problem curve {curve.value!r}")
    tail = parse_cone(value["tail"], rank, f"{path}.tail")
    coeffs = []
    for i, item in enumerate(value["coefficients"]):
        ipath = f"{path}.coefficients[{i}]"
        _expect_keys(item, ipath, {"point", "vertices"}, {"tail_rays"})
        z = parse_point(item["point"], curve, f"{ipath}.point")
        verts = [parse_vector(v, f"{ipath}.vertices[{j}]")
                 for j, v in enumerate(item["vertices"])]
        coeffs.append((z, Polyhedron.from_vertices_and_tail(verts, tail)))
    return PolyhedralDivisor.of(curve, tail, coeffs)


def divisor_doc(d: PolyhedralDivisor):
    return {
        "type": "divisor",
        "curve": d.curve.value,
        "tail": cone_doc(d.tail),
        "coefficients": [
            {"point": point_doc(z), **polyhedron_doc(p)}
            for z, p in d.coefficients
        ],
    }


def weil_divisor_doc(d: Divisor):
    return {
        "curve": d.curve.value,
        "coefficients": [{"point": point_doc(z), "value": rational_str(a)}
                         for z, a in d.coefficients],
    }


def module_doc(mod: SectionModule):
    return {"kind": mod.kind,
            "generators": [function_doc(f) for f in mod.generators]}


class ProblemFile:
    """Parsed problem file: curve, lattice rank and a named object table."""

    def __init__(self, curve: BaseCurve, rank: int, objects: dict[str, Any]):
        self.curve = curve
        self.rank = rank
        self.objects = objects

    def get(self, name: str, expected_type: str):
        if name not in self.objects:
            raise SchemaError(f"$.objects.{name}", "no such object")
        kind, obj = self.objects[name]
        if kind != expected_type:
            raise SchemaError(f"$.objects.{name}",
                              f"expected a {expected_type}, found a {kind}")
        return obj


def parse_problem(doc) -> ProblemFile:
    _expect_keys(doc, "$", {"version", "curve", "lattice_rank", "objects"})
    if doc["version"] != "1":
        raise SchemaError("$.version", f"unsupported version {doc['version']!r}")
    curve = parse_curve(doc["curve"])
    rank = doc["lattice_rank"]
    if not isinstance(rank, int) or rank < 1 or rank > 6:
        raise SchemaError("$.lattice_rank", "expected an integer between 1 and 6")
    raw = doc["objects"]
    if not isinstance(raw, Mapping):
        raise SchemaError("$.objects", "expected an object table")
    problem = ProblemFile(curve, rank, {})
    # two passes: divisors and ideals may reference earlier objects by name
    pending = dict(raw)
    progress = True
    while pending and progress:
        progress = False
        for name in list(pending):
            value = pending[name]
            path = f"$.objects.{name}"
            try:
                parsed = _parse_object(value, problem, path)
            except _Unresolved:
                continue
            problem.objects[name] = parsed
            del pending[name]
            progress = True
    if pending:
        raise SchemaError(f"$.objects.{sorted(pending)[0]}",
                          "unresolved reference cycle or missing target")
    return problem


class _Unresolved(Exception):
    pass


def _deref(problem: ProblemFile, name, expected: str, path: str):
    if not isinstance(name, str):
        raise SchemaError(path, "expected an object name")
    if name not in problem.objects:
        raise _Unresolved()
    kind, obj = problem.objects[name]
    if kind != expected:
        raise SchemaError(path, f"expected a {expected}, found a {kind}")
    return obj


def _parse_object(value, problem: ProblemFile, path: str):
    if not isinstance(value, Mapping) or "type" not in value:
        raise SchemaError(path, "object needs a type field")
    kind = value["type"]
    curve, rank = problem.curve, problem.rank
    if kind == "divisor":
        return ("divisor", parse_divisor(value, curve, rank, path))
    if kind == "generators":
        _expect_keys(value, path, {"type", "elements"})
        els = [parse_element(e, curve, f"{path}.elements[{i}]")
               for i, e in enumerate(value["elements"])]
        return ("generators", tuple(els))
    if kind == "monomial_ideal":
        _expect_keys(value, path, {"type", "weight_cone", "exponents"})
        cone = parse_cone(value["weight_cone"], rank, f"{path}.weight_cone")
        exps = [parse_integer_vector(m, f"{path}.exponents[{i}]")
                for i, m in enumerate(value["exponents"])]
        return ("monomial_ideal", MonomialIdeal.of(cone, exps))
    if kind == "ideal":
        _expect_keys(value, path, {"type", "ambient", "generators"})
        divisor = _deref(problem, value["ambient"], "divisor", f"{path}.ambient")
        els = [parse_element(e, curve, f"{path}.generators[{i}]")
               for i, e in enumerate(value["generators"])]
        from .convex import cone_dual
        pres = GradedIdealPresentation.of(cone_dual(divisor.tail), divisor, els)
        return ("ideal", pres)
    if kind == "coloring":
        _expect_keys(value, path, {"type", "divisor", "base_point", "colors"},
                     {"infinity_point"})
        divisor = _deref(problem, value["divisor"], "divisor", f"{path}.divisor")
        base = parse_point(value["base_point"], curve, f"{path}.base_point")
        infinity = None
        if "infinity_point" in value:
            infinity = parse_point(value["infinity_point"], curve,
                                   f"{path}.infinity_point")
        colors = []
        for i, item in enumerate(value["colors"]):
            ipath = f"{path}.colors[{i}]"
            _expect_keys(item, ipath, {"point", "vertex"})
            colors.append((parse_point(item["point"], curve, f"{ipath}.point"),
                           parse_vector(item["vertex"], f"{ipath}.vertex")))
        return ("coloring", ColoredDivisor.of(divisor, base, colors, infinity))
    if kind == "assemblage":
        _expect_keys(value, path, {"type", "coloring", "e", "s", "lambda"}, {"p"})
        colored = _deref(problem, value["coloring"], "coloring", f"{path}.coloring")
        e = parse_integer_vector(value["e"], f"{path}.e")
        s = value["s"]
        if not isinstance(s, list) or not all(isinstance(x, int) for x in s):
            raise SchemaError(f"{path}.s", "expected an array of integers")
        lams = [parse_rational(x, f"{path}.lambda[{i}]")
                for i, x in enumerate(value["lambda"])]
        p = value.get("p", 1)
        if not isinstance(p, int):
            raise SchemaError(f"{path}.p", "expected an integer")
        return ("assemblage",
                CoherentAssemblage.of(colored, e, s, lams, p))
    raise SchemaError(f"{path}.type", f"unknown object type {kind!r}")


def load_problem(path: str) -> ProblemFile:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as err:
            raise SchemaError(f"{path}:{err.lineno}:{err.colno}", err.msg) from None
    return parse_problem(doc)


def dump_canonical(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"
