"""Command-line entry point: ``sirs-activity {run,compare,steady-state,verify,presets}``.

Exit codes: 0 success, 1 usage error, 2 solver non-convergence, 3 validation error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .errors import ConvergenceError, IntegrityError, InvariantViolation, ValidationError
from .scenarios import PRESETS, resolve

EXIT_OK, EXIT_USAGE, EXIT_CONVERGENCE, EXIT_VALIDATION = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _kinds(arg):
    return None if arg is None else (("decentralized", "centralized") if arg == "both" else (arg,))


def cmd_run(args):
    from .report import run_and_report

    sc = resolve(args.scenario)
    rep = run_and_report(sc, args.out, _kinds(args.kind), plots=not args.no_plots)
    rep.pop("solutions")
    print(json.dumps(rep, indent=2, sort_keys=True))


def cmd_compare(args):
    from .report import compare

    table = compare([resolve(s) for s in args.scenarios], args.out, _kinds(args.kind))
    cols = table["columns"]
    width = max(len(c) for c in cols + ["statistic"]) + 2
    print("statistic".ljust(24) + "".join(c.rjust(width) for c in cols))
    for name, vals in table["rows"].items():
        print(name.ljust(24) + "".join(f"{v:.6g}".rjust(width) for v in vals))


def cmd_steady_state(args):
    from .solver import endemic_steady_state

    sc = resolve(args.scenario)
    out = {}
    for kind in _kinds(args.kind) or [k.value for k in sc.kinds]:
        if sc.params.alpha == 0:
            out[kind] = {"endemic": False, "reason": "permanent immunity"}
            continue
        ss = endemic_steady_state(kind, sc.params, sc.policy)
        out[kind] = {"endemic": ss.endemic, "a_p": ss.a_p, "a_q": ss.a_q,
                     "state": ss.state.__dict__, "values": ss.values._asdict()}
    print(json.dumps(out, indent=2, default=float))


def cmd_verify(args):
    from .verify import run_oracle_suite

    results = run_oracle_suite(horizons=args.horizons, grid_step=args.grid_step)
    ok = True
    for line, passed in results:
        print(("PASS " if passed else "FAIL ") + line)
        ok &= passed
    return EXIT_OK if ok else EXIT_VALIDATION


def cmd_presets(args):
    for name in PRESETS:
        print(name)


def build_parser():
    p = _Parser(prog="sirs-activity", description="Behavioral SIRS equilibrium solver")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    kind = dict(choices=("decentralized", "centralized", "both"), default=None)

    r = sub.add_parser("run", help="solve one scenario and write CSV/summary/plots")
    r.add_argument("scenario", help="preset name, preset:key=value,..., or scenario file")
    r.add_argument("--out", default="results")
    r.add_argument("--kind", **kind)
    r.add_argument("--no-plots", action="store_true")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("compare", help="side-by-side summary of several scenarios")
    c.add_argument("scenarios", nargs="+")
    c.add_argument("--out", default="results")
    c.add_argument("--kind", **kind)
    c.set_defaults(func=cmd_compare)

    s = sub.add_parser("steady-state", help="endemic steady state of a scenario")
    s.add_argument("scenario")
    s.add_argument("--kind", **kind)
    s.set_defaults(func=cmd_steady_state)

    v = sub.add_parser("verify", help="check the solver against brute-force grid search")
    v.add_argument("--horizons", type=int, nargs="+", default=[2, 3, 4])
    v.add_argument("--grid-step", type=float, default=0.01)
    v.set_defaults(func=cmd_verify)

    sub.add_parser("presets", help="list preset names").set_defaults(func=cmd_presets)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "compare" and len(args.scenarios) < 2:
        print("compare needs at least two scenarios", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args) or EXIT_OK
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ConvergenceError, InvariantViolation, IntegrityError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
