"""Command-line front end.

Exit codes: 0 success / property holds, 1 operational error, 2 no
solution exists, 3 verification refuted.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

from . import verifier
from .export import to_dot, to_promela
from .graphs import InTree, locality_graph
from .protocol import ProtocolFormatError, load_protocol, parse_protocol
from .spec_model import DomainError, ExprError, OverlapError, SpecSyntaxError, load_spec, parse_spec, validate_spec
from .synthesis import DEFAULT_SELFCHECK_N, NoSolution, syn_leadsto

EXIT_OK, EXIT_ERROR, EXIT_NO_SOLUTION, EXIT_REFUTED = 0, 1, 2, 3


class CLIError(Exception):
    pass


def _pairs(text: str, flag: str) -> dict[int, int]:
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        try:
            k, v = item.split(":")
            out[int(k)] = int(v)
        except ValueError:
            raise CLIError(f"{flag} expects child:parent pairs like 3:2,0:3, got {item!r}") from None
    return out


def _sizes(text: str) -> list[int]:
    try:
        sizes = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise CLIError(f"--n expects a comma-separated list of ring sizes, got {text!r}") from None
    if not sizes:
        raise CLIError("--n needs at least one ring size")
    return sizes


def _load_validated(path):
    spec = load_spec(path)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        validate_spec(spec)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return spec


def cmd_synth(args) -> int:
    spec = _load_validated(args.spec)
    tree = InTree(args.gamma, _pairs(args.tree, "--tree")) if args.tree else None
    attach = _pairs(args.attach, "--attach") if args.attach else None
    if (tree is not None or attach) and args.gamma is None:
        raise CLIError("--tree and --attach need --gamma")
    try:
        outcome = syn_leadsto(spec, gamma=args.gamma, tree=tree, attach=attach, selfcheck_n=args.selfcheck_n)
    except ValueError as exc:
        raise CLIError(str(exc)) from None
    if isinstance(outcome, NoSolution):
        print("no solution exists", file=sys.stderr)
        print(outcome.trace(), file=sys.stderr)
        return EXIT_NO_SOLUTION
    for failure in outcome.failures:
        print(f"skipped {failure}", file=sys.stderr)
    if args.explain:
        print(outcome.skeleton.explain(), file=sys.stderr)
    if args.selfcheck_n >= 2:
        print(f"self-check: pass (N=2..{args.selfcheck_n})", file=sys.stderr)
    print(outcome.protocol.to_json())
    return EXIT_OK


def cmd_verify(args) -> int:
    spec = _load_validated(args.spec)
    protocol = load_protocol(args.protocol)
    if protocol.m != spec.m:
        raise CLIError("protocol and spec disagree on the domain size")
    report = verifier.well_formed(protocol)
    if not report.ok:
        bad = report.determinism + report.self_disabling
        raise CLIError(f"protocol is not well formed: {[(tuple(x), tuple(y)) for x, y in bad]}")
    refuted = False
    for n in _sizes(args.n):
        verdict = verifier.check_leadsto(protocol, spec, n, budget=args.budget)
        print(verifier.verdict_json(verdict))
        refuted |= not verdict.holds
    return EXIT_REFUTED if refuted else EXIT_OK


def cmd_exists(args) -> int:
    spec = _load_validated(args.spec)
    found = not isinstance(syn_leadsto(spec, selfcheck_n=args.selfcheck_n), NoSolution)
    print(json.dumps({"exists": found}))
    return EXIT_OK if found else EXIT_NO_SOLUTION


def cmd_export_dot(args) -> int:
    with open(args.input, encoding="utf-8") as fh:
        text = fh.read()
    obj = json.loads(text)
    if args.kind == "action":
        if "actions" not in obj:
            raise CLIError("--kind action needs a protocol file")
        sys.stdout.write(to_dot(parse_protocol(text).action_graph(), "action"))
    else:
        if "actions" in obj:
            raise CLIError(f"--kind {args.kind} needs a spec file")
        spec = parse_spec(text)
        rel = spec.r if args.kind == "locality-r" else spec.q
        sys.stdout.write(to_dot(locality_graph(rel), args.kind.replace("-", "_")))
    return EXIT_OK


def cmd_export_promela(args) -> int:
    spec = load_spec(args.spec)
    protocol = load_protocol(args.protocol)
    try:
        sys.stdout.write(to_promela(spec, protocol, args.n))
    except ValueError as exc:
        raise CLIError(str(exc)) from None
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ringsynth", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize a protocol for R ~> Q")
    p.add_argument("spec")
    p.add_argument("--gamma", type=int, help="pin the sink value")
    p.add_argument("--tree", help="pin the core spanning tree as child:parent pairs (needs --gamma)")
    p.add_argument("--attach", help="pin leaf choices for values with r(v, gamma), as v:leaf pairs")
    p.add_argument("--explain", action="store_true", help="print the intermediate trees and labels to stderr")
    p.add_argument(
        "--selfcheck-n",
        type=int,
        default=DEFAULT_SELFCHECK_N,
        help=f"model check candidates for N=2..this (0 disables; default {DEFAULT_SELFCHECK_N})",
    )
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("verify", help="check R ~> Q for fixed ring sizes")
    p.add_argument("spec")
    p.add_argument("protocol")
    p.add_argument("--n", required=True, help="comma-separated ring sizes")
    p.add_argument("--budget", type=int, default=verifier.DEFAULT_BUDGET, help="maximum M**N")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("exists", help="decide whether a protocol exists")
    p.add_argument("spec")
    p.add_argument("--selfcheck-n", type=int, default=DEFAULT_SELFCHECK_N)
    p.set_defaults(func=cmd_exists)

    p = sub.add_parser("export-dot", help="render a locality or action graph as DOT")
    p.add_argument("input")
    p.add_argument("--kind", choices=["locality-r", "locality-q", "action"], required=True)
    p.set_defaults(func=cmd_export_dot)

    p = sub.add_parser("export-promela", help="emit a SPIN model for a fixed ring size")
    p.add_argument("spec")
    p.add_argument("protocol")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_export_promela)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (
        CLIError,
        OSError,
        json.JSONDecodeError,
        SpecSyntaxError,
        DomainError,
        ExprError,
        OverlapError,
        ProtocolFormatError,
        verifier.BudgetExceeded,
        verifier.RingSizeError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
