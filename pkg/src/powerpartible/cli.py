"""Command-line entry point.

Exit codes: 0 everything passed, 1 a counterexample or failed check,
2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .errors import PowerPartibleError
from .exact import format_rational, odd_primes_below
from .harness import (
    GridSpec,
    certify,
    two_path_report,
    verify_closed_form_symbolic,
    verify_divisibility,
    verify_lemma32,
    verify_theorem1,
)
from .reduction import certificate_from_json, certificate_to_json, schroder_certificate
from .sequences import SYMBOLIC, DEFINITIONS, Family
from .shiftops import ShiftOp, op_degenerate_roots, op_degree, op_find_gamma

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _epsilons(value: str):
    if value == "both":
        return (-1, 1)
    if value in ("1", "+1"):
        return (1,)
    if value == "-1":
        return (-1,)
    raise argparse.ArgumentTypeError("epsilon must be 1, -1 or both")


def _emit(report, args, started):
    payload = report.to_json()
    payload["elapsed_seconds"] = round(time.perf_counter() - started, 3)
    if getattr(args, "json", None):
        with open(args.json, "w") as fh:
            json.dump(payload, fh, indent=2)
    summary = report.summary()
    print(f"{payload['kind']}: {summary['passed']}/{summary['checked']} passed, "
          f"{summary['failed']} failed, {summary['skipped']} skipped "
          f"({payload['elapsed_seconds']}s)")
    failures = report.failures
    for fail in failures[:20]:
        print(f"  FAIL {fail}")
    if len(failures) > 20:
        print(f"  ... {len(failures) - 20} more")
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_seq(args):
    fn = DEFINITIONS[Family(args.family)]
    z = SYMBOLIC if args.symbolic else args.z
    if z is None:
        print("error: seq needs --z INT or --symbolic", file=sys.stderr)
        return EXIT_USAGE
    for n in range(args.n + 1):
        print(fn(n, z))
    return EXIT_OK


def cmd_verify_theorem1(args):
    started = time.perf_counter()
    grid = GridSpec.desk(args.pmax, args.rmax, args.zmin, args.zmax, args.epsilon)
    report = verify_theorem1(grid, jobs=args.jobs)
    code = _emit(report, args, started)
    if args.two_path:
        started = time.perf_counter()
        tp = two_path_report(grid, jobs=args.jobs)
        args.json = None
        code = max(code, _emit(tp, args, started))
    return code


def cmd_verify_lemma32(args):
    started = time.perf_counter()
    report = verify_lemma32(odd_primes_below(args.pmax), args.epsilon, range(args.zmin, args.zmax + 1))
    return _emit(report, args, started)


def cmd_verify_divisibility(args):
    started = time.perf_counter()
    report = verify_divisibility(args.nmax, args.smax, args.epsilon, range(args.zmin, args.zmax + 1))
    code = _emit(report, args, started)
    if args.symbolic_nmax:
        started = time.perf_counter()
        sym = verify_closed_form_symbolic(args.symbolic_nmax, min(args.smax, 4), args.epsilon)
        args.json = None
        code = max(code, _emit(sym, args, started))
    return code


def cmd_reduce(args):
    cert = schroder_certificate(args.r, args.epsilon, args.z)
    print(json.dumps(certificate_to_json(cert), indent=2))
    return EXIT_OK


def cmd_certify(args):
    started = time.perf_counter()
    with open(args.infile) as fh:
        cert = certificate_from_json(json.load(fh))
    primes = odd_primes_below(args.pmax)
    report = certify(cert, primes, range(args.zmin, args.zmax + 1))
    return _emit(report, args, started)


def cmd_analyze(args):
    with open(args.op) as fh:
        L = ShiftOp.from_json(json.load(fh))
    d, b = op_degree(L)
    out = {"order": L.order, "degree": d, "b": [bl.render() for bl in b]}
    try:
        out["degenerate_roots"] = sorted(op_degenerate_roots(L))
    except PowerPartibleError as exc:
        out["degenerate_roots"] = f"{type(exc).__name__}: {exc}"
    try:
        info = op_find_gamma(L)
        out["gamma"] = format_rational(info.gamma)
    except PowerPartibleError as exc:
        out["gamma"] = None
        out["not_partible"] = f"{type(exc).__name__}: {exc}"
    print(json.dumps(out, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="powerpartible", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("seq", help="print S_n(z), s_n(z) or D_n(z) for n = 0..N")
    p.add_argument("--family", choices=["large", "little", "delannoy"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--z", type=int)
    p.add_argument("--symbolic", action="store_true")
    p.set_defaults(func=cmd_seq)

    v = sub.add_parser("verify", help="run a verification grid")
    vsub = v.add_subparsers(dest="what", required=True)

    def grid_args(q, pmax=100):
        q.add_argument("--pmax", type=int, default=pmax, help="primes strictly below this bound")
        q.add_argument("--zmin", type=int, default=-10)
        q.add_argument("--zmax", type=int, default=10)
        q.add_argument("--epsilon", type=_epsilons, default=(-1, 1), help="1, -1 or both")
        q.add_argument("--json", metavar="OUT", help="write the full report here")
        q.add_argument("--jobs", type=int, default=1)

    t = vsub.add_parser("theorem1")
    grid_args(t)
    t.add_argument("--rmax", type=int, default=4)
    t.add_argument("--two-path", action="store_true", help="also rebuild every sum from its certificate")
    t.set_defaults(func=cmd_verify_theorem1)

    l32 = vsub.add_parser("lemma32")
    grid_args(l32)
    l32.set_defaults(func=cmd_verify_lemma32)

    dv = vsub.add_parser("divisibility")
    grid_args(dv)
    dv.add_argument("--nmax", type=int, default=200)
    dv.add_argument("--smax", type=int, default=6)
    dv.add_argument("--symbolic-nmax", type=int, default=0, help="also check the identity in Z[z] up to this n")
    dv.set_defaults(func=cmd_verify_divisibility)

    r = sub.add_parser("reduce", help="print the reduction certificate for (2k+1)^(2r+1)")
    r.add_argument("--r", type=int, required=True)
    r.add_argument("--epsilon", type=int, choices=[1, -1], required=True)
    r.add_argument("--z", type=int, help="specialize z (default: symbolic)")
    r.set_defaults(func=cmd_reduce)

    c = sub.add_parser("certify", help="re-verify a certificate JSON file")
    c.add_argument("--in", dest="infile", required=True)
    c.add_argument("--pmax", type=int, default=50)
    c.add_argument("--zmin", type=int, default=-10)
    c.add_argument("--zmax", type=int, default=10)
    c.add_argument("--json", metavar="OUT")
    c.set_defaults(func=cmd_certify)

    a = sub.add_parser("analyze", help="degree, degeneracy and center of an operator JSON file")
    a.add_argument("--op", required=True)
    a.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PowerPartibleError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
