"""Command-line front end: problem files in, canonical JSON or tables out.

Exit codes: 0 success, 1 schema/usage error, 2 mathematical precondition
failure (the error class name is reported).
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction

from . import serialize as ser
from .convex import Cone, GeometryError, cone_dual, hilbert_basis
from .curves import BasePoint, CurveError, RationalFunction, sections
from .divisors import (
    DivisorError,
    HomogeneousElement,
    bounded_generators,
    degree_polyhedron,
    divisor_from_generators,
    dpd_presentation,
    evaluate,
    graded_piece,
    is_proper,
    member,
)
from .gaactions import (
    ActionError,
    CoherentAssemblage,
    ExponentialExpansion,
    assemblage_check,
    associated_cones,
    axiom_check,
    horizontal_conditions,
    horizontal_exponential,
    horizontal_kernel,
    is_demazure_root,
    roots_with_ray,
    toric_exponential,
    validate_coloring,
    vertical_exists,
    vertical_exponential,
    vertical_phi,
)
from .ideals import (
    IdealError,
    MonomialIdeal,
    closure_member_oracle,
    closure_power_piece,
    monomial_closure_generators,
    monomial_is_normal,
    newton_polyhedron,
    normality_sufficient,
    pair_conditions,
    ptilde,
    rees_pair,
)

MATH_ERRORS = (GeometryError, CurveError, DivisorError, IdealError, ActionError)


def _vector(text: str) -> tuple[int, ...]:
    return tuple(int(a) for a in text.replace("(", "").replace(")", "").split(","))


def _box(text: str) -> list[tuple[int, int]]:
    out = []
    for part in text.split(","):
        lo, _, hi = part.partition(":")
        out.append((int(lo), int(hi)))
    return out


def _report_doc(report) -> dict:
    return {"all_pass": report.all_pass,
            "conditions": [{"name": n, "pass": ok, "note": note}
                           for n, ok, note in report.results]}


def _expansion_doc(exp: ExponentialExpansion) -> dict:
    return {"terms": [{"x_power": i, "element": ser.element_doc(el)}
                      for i, el in exp.terms]}


def _fixture_path(name: str) -> str:
    root = os.environ.get("POLYDIV_FIXTURES",
                          os.path.join(os.path.dirname(__file__), "..", "..",
                                       "fixtures"))
    return os.path.join(root, name)


def _load(args) -> ser.ProblemFile:
    path = args.input
    if not os.path.exists(path) and not os.path.isabs(path):
        candidate = _fixture_path(path)
        if os.path.exists(candidate):
            path = candidate
    return ser.load_problem(path)


def _element_arg(args, problem) -> HomogeneousElement:
    doc = json.loads(args.element)
    return ser.parse_element(doc, problem.curve, "$.element")


def cmd_normalize(args, problem):
    gens = problem.get(args.object, "generators")
    weight_cone, divisor = divisor_from_generators(list(gens), problem.curve)
    return {"weight_cone": ser.cone_doc(weight_cone),
            "divisor": ser.divisor_doc(divisor)}


def _divisor_arg(args, problem):
    kind, obj = problem.objects.get(args.object, (None, None))
    if kind == "divisor":
        return obj
    if kind == "generators":
        return divisor_from_generators(list(obj), problem.curve)[1]
    raise ser.SchemaError(f"$.objects.{args.object}", "expected a divisor")


def cmd_eval(args, problem):
    d = _divisor_arg(args, problem)
    ev = evaluate(d, _vector(args.m))
    return {"m": list(_vector(args.m)), "evaluation": ser.weil_divisor_doc(ev)}


def cmd_degree(args, problem):
    d = _divisor_arg(args, problem)
    return {"degree_polyhedron": ser.polyhedron_doc(degree_polyhedron(d))}


def cmd_proper(args, problem):
    d = _divisor_arg(args, problem)
    ok, certificate = is_proper(d)
    return {"proper": ok, "certificate": certificate}


def cmd_sections(args, problem):
    d = _divisor_arg(args, problem)
    piece = graded_piece(d, _vector(args.m))
    return {"m": list(piece.degree), "module": ser.module_doc(piece.module)}


def cmd_member(args, problem):
    d = _divisor_arg(args, problem)
    el = _element_arg(args, problem)
    return {"element": ser.element_doc(el), "member": member(el, d)}


def cmd_generators(args, problem):
    d = _divisor_arg(args, problem)
    box = _box(args.box) if args.box else None
    report = bounded_generators(d, box)
    return {
        "generators": [ser.element_doc(g) for g in report.generators],
        "box": [list(b) for b in report.box],
        "saturated_in_doubled_box": report.saturated_in_doubled_box,
        "unsaturated_degrees": [list(m) for m in report.unsaturated_degrees],
    }


def cmd_dpd(args, problem):
    gens = problem.get(args.object, "generators")
    return {"divisor": ser.weil_divisor_doc(dpd_presentation(list(gens), problem.curve))}


def cmd_mono_closure(args, problem):
    ideal = problem.get(args.object, "monomial_ideal")
    gens = monomial_closure_generators(ideal)
    return {"newton_polyhedron": ser.polyhedron_doc(newton_polyhedron(ideal)),
            "closure_generators": [list(m) for m in gens]}


def cmd_mono_normal(args, problem):
    ideal = problem.get(args.object, "monomial_ideal")
    closed = MonomialIdeal.of(ideal.weight_cone, monomial_closure_generators(ideal))
    ok, witness = monomial_is_normal(closed)
    doc = {"normal": ok}
    if witness:
        doc["witness"] = {"exponent": witness["exponent"],
                          "point": list(witness["point"])}
    return doc


def cmd_rees(args, problem):
    pres = problem.get(args.object, "ideal")
    pair = rees_pair(pres)
    return {"newton_polyhedron": ser.polyhedron_doc(pair.newton),
            "rees_divisor": ser.divisor_doc(pair.rees_divisor)}


def cmd_closure_piece(args, problem):
    pair = rees_pair(problem.get(args.object, "ideal"))
    piece = closure_power_piece(pair, _vector(args.m), args.e)
    return {"m": list(piece.degree), "e": args.e,
            "module": ser.module_doc(piece.module)}


def cmd_pair_check(args, problem):
    pair = rees_pair(problem.get(args.object, "ideal"))
    return _report_doc(pair_conditions(pair))


def cmd_normal_sufficient(args, problem):
    pair = rees_pair(problem.get(args.object, "ideal"))
    ok, witness = normality_sufficient(pair)
    doc = {"normal_sufficient": ok}
    if witness:
        doc["witness"] = {"point": str(witness["point"]),
                          "exponent": witness["exponent"],
                          "lattice_point": list(witness["witness"])}
    return doc


def cmd_oracle(args, problem):
    ideal = problem.get(args.object, "monomial_ideal")
    found = closure_member_oracle(_vector(args.m), ideal, args.dmax)
    return {"m": list(_vector(args.m)), "d_max": args.dmax,
            "integral_over_ideal": found,
            "note": "" if found else f"no witness up to d_max = {args.dmax}"}


def cmd_roots(args, problem):
    d = _divisor_arg(args, problem)
    roots = roots_with_ray(d.tail, _vector(args.ray), _box(args.box))
    return {"ray": list(_vector(args.ray)),
            "roots": [list(r.vector) for r in roots]}


def cmd_root_check(args, problem):
    d = _divisor_arg(args, problem)
    root = is_demazure_root(d.tail, _vector(args.e))
    doc = {"e": list(_vector(args.e)), "is_root": root is not None}
    if root:
        doc["distinguished_ray"] = list(root.distinguished_ray)
    return doc


def cmd_toric_exp(args, problem):
    d = _divisor_arg(args, problem)
    root = is_demazure_root(d.tail, _vector(args.e))
    if root is None:
        raise ActionError(f"{args.e} is not a Demazure root of the tail cone")
    exp = toric_exponential(d.tail, root, Fraction(args.scalar), _vector(args.m))
    return _expansion_doc(exp)


def cmd_vertical_exists(args, problem):
    d = _divisor_arg(args, problem)
    return {"ray": list(_vector(args.ray)),
            "exists": vertical_exists(d, _vector(args.ray))}


def cmd_vertical_exp(args, problem):
    d = _divisor_arg(args, problem)
    root = is_demazure_root(d.tail, _vector(args.e))
    if root is None:
        raise ActionError(f"{args.e} is not a Demazure root of the tail cone")
    phi = ser.parse_function(json.loads(args.phi), problem.curve, "$.phi")
    exp = vertical_exponential(d, root, phi, _element_arg(args, problem))
    return _expansion_doc(exp)


def cmd_coloring_check(args, problem):
    colored = problem.get(args.object, "coloring")
    doc = _report_doc(validate_coloring(colored))
    doc["color_denominator"] = colored.color_denominator
    doc["degree_vertex"] = [ser.rational_str(a) for a in colored.degree_vertex()]
    return doc


def cmd_assemblage_check(args, problem):
    ca = problem.get(args.object, "assemblage")
    doc = _report_doc(assemblage_check(ca))
    omega, augmented = associated_cones(ca.colored)
    doc["kernel_weight_cone"] = ser.cone_doc(omega)
    doc["augmented_cone"] = ser.cone_doc(augmented)
    return doc


def cmd_horizontal_check(args, problem):
    ca = problem.get(args.object, "assemblage")
    omega, _ = associated_cones(ca.colored)
    report = horizontal_conditions(
        ca.colored.divisor, omega, ca.degree, ca.char_exponent, ca.exponents[0],
        base_point=ca.colored.base_point,
        infinity_point=ca.colored.infinity_point,
        exhaustive_box=args.exhaustive_box)
    return _report_doc(report)


def cmd_horizontal_exp(args, problem):
    ca = problem.get(args.object, "assemblage")
    exp = horizontal_exponential(ca, _element_arg(args, problem))
    return _expansion_doc(exp)


def cmd_kernel(args, problem):
    ca = problem.get(args.object, "assemblage")
    kd = horizontal_kernel(ca)
    return {
        "sublattice_basis": [list(b) for b in kd.sublattice_basis],
        "monoid_generators": [list(m) for m in kd.monoid_generators],
        "functions": [{"degree": list(m), "function": ser.function_doc(f)}
                      for m, f in kd.functions],
    }


def cmd_axiom_check(args, problem):
    rng = random.Random(args.seed)
    kind, obj = problem.objects.get(args.object, (None, None))
    if kind == "assemblage":
        ca = obj
        d = ca.colored.divisor
        weight = cone_dual(d.tail)
        basis = hilbert_basis(weight)

        def sample() -> HomogeneousElement:
            m = tuple(sum(rng.randint(0, 2) * b[j] for b in basis)
                      for j in range(d.rank))
            ev = evaluate(d, m).floor()
            mod = sections(ev)
            f = mod.generators[0] * RationalFunction.variable(rng.randint(0, 2))
            return HomogeneousElement(f, m)

        def expand(el):
            return horizontal_exponential(ca, el)
    elif kind in ("divisor", "generators"):
        d = obj if kind == "divisor" else \
            divisor_from_generators(list(obj), problem.curve)[1]
        root = is_demazure_root(d.tail, _vector(args.e))
        if root is None:
            raise ActionError(f"{args.e} is not a Demazure root")
        lam = Fraction(args.scalar)

        def sample() -> HomogeneousElement:
            weight = cone_dual(d.tail)
            basis = hilbert_basis(weight)
            m = tuple(sum(rng.randint(0, 2) * b[j] for b in basis)
                      for j in range(d.rank))
            return HomogeneousElement(RationalFunction.from_factored(
                Fraction(rng.randint(1, 3))), m)

        def expand(el):
            base = toric_exponential(d.tail, root, lam, el.degree)
            c = el.function.constant
            return ExponentialExpansion(
                tuple((i, x.scaled(c)) for i, x in base.terms))
    else:
        raise ser.SchemaError(f"$.objects.{args.object}",
                              "axiom-check needs an assemblage, divisor or generators")
    samples = [(sample(), sample()) for _ in range(args.samples)]
    return _report_doc(axiom_check(expand, samples))


COMMANDS = {
    "normalize": (cmd_normalize, "divisor of the normalization from generators"),
    "eval": (cmd_eval, "evaluate a polyhedral divisor at a weight vector"),
    "degree": (cmd_degree, "degree polyhedron over a projective base"),
    "proper": (cmd_proper, "properness with certificate"),
    "sections": (cmd_sections, "graded piece (sections of the floored evaluation)"),
    "member": (cmd_member, "membership of a homogeneous element"),
    "generators": (cmd_generators, "box-certified generator extraction"),
    "dpd": (cmd_dpd, "rank-one presentation divisor"),
    "mono-closure": (cmd_mono_closure, "integral closure of a monomial ideal"),
    "mono-normal": (cmd_mono_normal, "normality of a monomial ideal"),
    "rees": (cmd_rees, "Newton polyhedron and Rees divisor of a homogeneous ideal"),
    "closure-piece": (cmd_closure_piece, "graded piece of a closed ideal power"),
    "pair-check": (cmd_pair_check, "Rees-pair axioms with witnesses"),
    "normal-sufficient": (cmd_normal_sufficient, "sufficient normality criterion"),
    "oracle": (cmd_oracle, "brute-force integral dependence for monomials"),
    "roots": (cmd_roots, "Demazure roots with a given distinguished ray in a box"),
    "root-check": (cmd_root_check, "test a vector for being a Demazure root"),
    "toric-exp": (cmd_toric_exp, "toric exponential expansion"),
    "vertical-exists": (cmd_vertical_exists, "existence of a vertical action"),
    "vertical-exp": (cmd_vertical_exp, "vertical exponential expansion"),
    "coloring-check": (cmd_coloring_check, "colored-divisor axioms"),
    "assemblage-check": (cmd_assemblage_check, "coherent-assemblage axioms"),
    "horizontal-check": (cmd_horizontal_check, "horizontal existence conditions"),
    "horizontal-exp": (cmd_horizontal_exp, "characteristic-zero horizontal expansion"),
    "kernel": (cmd_kernel, "kernel of a horizontal action"),
    "axiom-check": (cmd_axiom_check, "iterative higher-derivation axioms on samples"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polydiv",
        description="exact computations with polyhedral divisors")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--input", required=True, help="problem file (JSON)")
        p.add_argument("--object", default=None, help="object name in the problem file")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        if name in ("eval", "sections", "closure-piece", "oracle", "toric-exp"):
            p.add_argument("--m", required=True, help="lattice vector, e.g. 1,2")
        if name == "closure-piece":
            p.add_argument("--e", type=int, required=True, help="ideal power")
        if name == "oracle":
            p.add_argument("--dmax", type=int, default=12)
        if name == "generators":
            p.add_argument("--box", default=None, help="box lo:hi,lo:hi")
        if name == "roots":
            p.add_argument("--ray", required=True)
            p.add_argument("--box", required=True, help="box lo:hi,lo:hi")
        if name in ("root-check", "toric-exp", "vertical-exp", "axiom-check"):
            p.add_argument("--e", default=None, help="lattice vector, e.g. -1,0")
        if name in ("toric-exp", "vertical-exp", "axiom-check"):
            p.add_argument("--scalar", default="1", help="rational scalar")
        if name in ("vertical-exists",):
            p.add_argument("--ray", required=True)
        if name in ("member", "vertical-exp", "horizontal-exp"):
            p.add_argument("--element", required=True,
                           help="homogeneous element as inline JSON")
        if name == "vertical-exp":
            p.add_argument("--phi", required=True, help="multiplier as inline JSON")
        if name == "horizontal-check":
            p.add_argument("--exhaustive-box", type=int, default=None)
        if name == "axiom-check":
            p.add_argument("--samples", type=int, default=20)
            p.add_argument("--seed", type=int, default=0)
    return parser


def _is_flat(value) -> bool:
    return isinstance(value, list) and all(
        not isinstance(x, (dict, list)) for x in value)


def _print_human(doc, indent=0):
    pad = "  " * indent
    if isinstance(doc, dict):
        for key, value in doc.items():
            if isinstance(value, dict) or (isinstance(value, list) and not _is_flat(value)):
                print(f"{pad}{key}:")
                _print_human(value, indent + 1)
            else:
                print(f"{pad}{key}: {value}")
    elif isinstance(doc, list):
        for item in doc:
            if isinstance(item, dict) or (isinstance(item, list) and not _is_flat(item)):
                _print_human(item, indent)
            else:
                print(f"{pad}- {item}")
    else:
        print(f"{pad}{doc}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler, _ = COMMANDS[args.command]
    try:
        problem = _load(args)
        result = handler(args, problem)
    except ser.SchemaError as err:
        print(f"schema error: {err}", file=sys.stderr)
        return 1
    except (json.JSONDecodeError, OSError) as err:
        print(f"input error: {err}", file=sys.stderr)
        return 1
    except MATH_ERRORS as err:
        print(f"{type(err).__name__}: {err}", file=sys.stderr)
        return 2
    document = {"command": args.command,
                "object": args.object,
                "result": result}
    if args.json:
        sys.stdout.write(ser.dump_canonical(document))
    else:
        _print_human(document)
    return 0


if __name__ == "__main__":
    sys.exit(main())
