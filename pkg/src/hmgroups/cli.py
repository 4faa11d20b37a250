"""Command-line front end.

Exit codes: 0 success, 2 malformed input, 3 domain error (the input parsed
but violates a precondition: not a unit, unfaithful action, model too
large, ...).  Output is a JSON document (``--format json``) or ``key: value``
lines, with the same keys either way.
"""
from __future__ import annotations

import argparse
import json
import random
import re
import sys
from typing import Sequence

from . import groups as grp
from . import invariants as inv
from . import lab
from .errors import DomainError, HMGroupsError, InputError, MalformedText
from .padic import PAdicInt, format_padic, invert
from .units import decompose, layer, teichmuller

DEFAULT_PRECISION = 64
MIN_GROUP_PRECISION = 4
HOMOMORPHISM_SAMPLES = 20

NEGATIVE_NOTE = "negative integers are read modulo p^N, e.g. --u -5 is p^N - 5"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _Usage(f"{self.prog}: error: {message}")


class _Usage(Exception):
    pass


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--precision", type=_int, default=DEFAULT_PRECISION,
                        help="p-adic digits carried (default 64)")
    common.add_argument("--seed", type=_int, default=0, help="seed for randomized checks")

    parser = _Parser(prog="hmgroups", description=__doc__.splitlines()[0],
                     epilog=NEGATIVE_NOTE)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", parents=[common], epilog=NEGATIVE_NOTE,
                       help="identify Z_p x|_u Z_p as M(p, n) or T(n)")
    p.add_argument("--p", type=_int, required=True)
    p.add_argument("--u", type=_int, required=True, help="the unit f(1)")

    p = sub.add_parser("classify-finite", parents=[common], epilog=NEGATIVE_NOTE,
                       help="identify Z_p x| Z/d as K(p, d)")
    p.add_argument("--p", type=_int, required=True)
    p.add_argument("--t", type=_int, required=True, help="torsion unit acting as the generator")
    p.add_argument("--d", type=_int, required=True)

    p = sub.add_parser("invariants", parents=[common], help="derived subgroup and abelianization")
    p.add_argument("--group", required=True)

    for name in ("mul", "commutator"):
        p = sub.add_parser(name, parents=[common], help=f"{name} of two elements")
        p.add_argument("--group", required=True)
        p.add_argument("elements", nargs=2, metavar="ELT")

    p = sub.add_parser("order", parents=[common], help="element order")
    p.add_argument("--group", required=True)
    p.add_argument("element", metavar="ELT")

    p = sub.add_parser("unit", parents=[common], epilog=NEGATIVE_NOTE, help="unit group utilities")
    p.add_argument("action", choices=("teichmuller", "decompose", "layer"))
    p.add_argument("--p", type=_int, required=True)
    p.add_argument("--a", type=_int, required=True)

    p = sub.add_parser("lab", parents=[common], help="finite quotient models")
    p.add_argument("action", choices=("build", "enumerate", "analyze", "essential"))
    p.add_argument("--group", required=True)
    p.add_argument("--level", type=_int, required=True)
    p.add_argument("--subgroup", action="append", default=[], metavar="(X,J)",
                   help="generator of the subgroup, in model coordinates; repeatable")

    p = sub.add_parser("distinguish", parents=[common], help="isomorphism verdict with certificate")
    p.add_argument("descriptors", nargs=2, metavar="DESC")
    return parser


# ------------------------------------------------------------------ commands


def _element_text(g: grp.Element) -> str:
    return grp.format_element(g)


def _sampled_homomorphism_check(result: inv.ClassificationResult, precision: int, seed: int) -> dict:
    rng = random.Random(seed)
    src = result.source
    p = src.prime
    prec = max(precision - 8, 2)
    passed = 0
    for _ in range(HOMOMORPHISM_SAMPLES):
        g, h = (grp.Element(src, PAdicInt.of(rng.randrange(p ** prec), p, prec),
                            PAdicInt.of(rng.randrange(p ** prec), p, prec)) for _ in range(2))
        if result.iso(grp.mul(g, h)) == grp.mul(result.iso(g), result.iso(h)):
            passed += 1
    return {"pairs": HOMOMORPHISM_SAMPLES, "passed": passed, "precision": prec}


def cmd_classify(args) -> dict:
    _need_group_precision(args)
    u = PAdicInt.of(args.u, args.p, args.precision)
    result = inv.classify_action(args.p, u)
    out = result.to_dict()
    out["homomorphism_check"] = _sampled_homomorphism_check(result, args.precision, args.seed)
    return out


def cmd_classify_finite(args) -> dict:
    _need_group_precision(args)
    t = PAdicInt.of(args.t, args.p, args.precision)
    return inv.classify_finite_action(args.p, t, args.d).to_dict()


def cmd_invariants(args) -> dict:
    d = grp.parse_descriptor(args.group, args.precision)
    out = {"group": d.text(), "canonical": inv.canonical(d).text()}
    out.update(inv.derived_subgroup(d).to_dict())
    out.update(inv.abelianization(d).to_dict())
    return out


def cmd_mul(args) -> dict:
    d = grp.parse_descriptor(args.group, args.precision)
    g, h = (grp.parse_element(d, e) for e in args.elements)
    r = grp.mul(g, h) if args.command == "mul" else grp.commutator(g, h)
    return {"group": d.text(), "result": _element_text(r)}


def cmd_order(args) -> dict:
    d = grp.parse_descriptor(args.group, args.precision)
    g = grp.parse_element(d, args.element)
    o = grp.element_order(g)
    return {"group": d.text(), "element": _element_text(g),
            "order": o if isinstance(o, int) else str(o)}


def cmd_unit(args) -> dict:
    a = PAdicInt.of(args.a, args.p, args.precision)
    if args.action == "teichmuller":
        return {"result": str(teichmuller(a)), "digits": format_padic(teichmuller(a))}
    if args.action == "decompose":
        dec = decompose(a)
        n = layer(dec.principal_part)
        return {"torsion_part": str(dec.torsion_part),
                "principal_part": str(dec.principal_part),
                "principal_layer": n if n != float("inf") else "Infinity",
                "torsion_inverse": str(invert(dec.torsion_part))}
    n = layer(a)
    return {"layer": n if n != float("inf") else "Infinity"}


_COORD_RE = re.compile(r"^\s*\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)\s*$")


def cmd_lab(args) -> dict:
    d = grp.parse_descriptor(args.group, args.precision)
    m = lab.build_model(d, args.level)
    if args.action == "build":
        return m.to_dict()
    if args.action == "enumerate":
        subs = lab.enumerate_subgroups(m)
        hist: dict[str, int] = {}
        for h in subs:
            hist[str(h.order)] = hist.get(str(h.order), 0) + 1
        return {"order": m.order, "subgroups": len(subs), "subgroup_orders": hist}
    if args.action == "analyze":
        return lab.analyze(m).to_dict(m)
    gens = []
    for text in args.subgroup:
        mt = _COORD_RE.match(text)
        if not mt:
            raise MalformedText(f"subgroup generator must look like '(x, j)', got {text!r}")
        gens.append(m.index(int(mt.group(1)), int(mt.group(2))))
    if not gens:
        raise MalformedText("lab essential needs at least one --subgroup generator")
    h = m.handle(m.closure(gens), gens)
    return {"order": m.order, "subgroup_order": h.order, "essential": lab.is_essential(m, h)}


def cmd_distinguish(args) -> dict:
    d1, d2 = (grp.parse_descriptor(t, args.precision) for t in args.descriptors)
    out = inv.distinguish(d1, d2).to_dict()
    out["groups"] = [inv.canonical(d1).text(), inv.canonical(d2).text()]
    return out


COMMANDS = {
    "classify": cmd_classify,
    "classify-finite": cmd_classify_finite,
    "invariants": cmd_invariants,
    "mul": cmd_mul,
    "commutator": cmd_mul,
    "order": cmd_order,
    "unit": cmd_unit,
    "lab": cmd_lab,
    "distinguish": cmd_distinguish,
}


def _need_group_precision(args) -> None:
    if args.precision < MIN_GROUP_PRECISION:
        raise InputError(f"--precision must be >= {MIN_GROUP_PRECISION} for {args.command}")


def _render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, sort_keys=True)
    lines = []
    for key in sorted(doc):
        value = doc[key]
        if isinstance(value, (dict, list)):
            value = json.dumps(value, sort_keys=True)
        lines.append(f"{key}: {value}")
    return "\n".join(lines)


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _Usage as exc:
        print(exc, file=stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if args.precision < 1:
        print("error: --precision must be >= 1", file=stderr)
        return 2
    try:
        doc = COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return 2
    except DomainError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return 3
    except HMGroupsError as exc:  # pragma: no cover
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return 3
    print(_render(doc, args.format), file=stdout)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
