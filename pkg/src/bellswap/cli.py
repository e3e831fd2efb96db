"""Command-line entry point: analyze, damp, swap, sweep, threshold, validate.

Exit codes: 0 ok, 2 parse error, 3 validation/domain error, 4 bracket
error, 5 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .channels import damp_both
from .errors import BracketError, BellSwapError, DimensionError, DomainError, ParseError, ValidationError
from .linalg import load_matrix, matrix_to_dict, save_matrix, validate_density
from .nonlocality import analyze
from .states import BellLabel, parse_number, parse_state_spec
from .sweep import (
    SCENARIOS,
    GridAxis,
    SweepSpec,
    ThresholdQuery,
    make_row,
    find_threshold,
    rows_to_csv,
    sweep_csv,
)
from .swap import swap

EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_BRACKET, EXIT_IO = 0, 2, 3, 4, 5


def load_state(arg: str):
    """A state spec string, or a path to a matrix JSON file."""
    if os.path.exists(arg) or arg.endswith(".json"):
        return load_matrix(arg)
    return parse_state_spec(arg)


def _report_dict(rho) -> dict:
    report, post = analyze(rho)
    return {**report.to_dict(), "post_unitary_M": post.horodecki_M}


def _emit(text: str, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _single_csv(name, rows) -> str:
    return rows_to_csv(name, [], rows)


def cmd_analyze(args):
    rho = validate_density(load_state(args.state))
    if args.format == "csv":
        report, post = analyze(rho)
        _emit(_single_csv("analyze", [make_row(None, 1.0, (report, post), "ok")]), args.out)
    else:
        _emit(_dump(_report_dict(rho)), args.out)


def cmd_damp(args):
    rho = damp_both(validate_density(load_state(args.state)), args.gamma)
    rho = validate_density(rho)
    if args.out:
        save_matrix(args.out, rho)
    if args.format == "csv":
        report, post = analyze(rho)
        sys.stdout.write(_single_csv("damp", [make_row(None, 1.0, (report, post), "ok")]))
    else:
        sys.stdout.write(_dump({"gamma": args.gamma, "state": matrix_to_dict(rho), "report": _report_dict(rho)}))


def cmd_swap(args):
    r1 = validate_density(load_state(args.state1))
    r2 = validate_density(load_state(args.state2))
    records, rows = [], []
    for o in swap(r1, r2):
        rec = {"label": o.label.value, "probability": o.probability, "conditional_state": None,
               "locality_report": None, "post_unitary_report": None}
        if o.conditional_state is not None:
            report, post = analyze(o.conditional_state)
            rec.update(conditional_state=matrix_to_dict(o.conditional_state),
                       locality_report=report.to_dict(), post_unitary_report=post.to_dict())
            rows.append(make_row(o.label.value, o.probability, (report, post), "ok"))
        else:
            rows.append(make_row(o.label.value, o.probability, None, "zero_probability"))
        records.append(rec)
    if args.format == "csv":
        _emit(_single_csv("swap", rows), args.out)
    else:
        _emit(_dump(records), args.out)


def _outcomes(text):
    if not text:
        return None
    return frozenset(BellLabel.parse(x) for x in text.split(","))


def cmd_sweep(args):
    spec = SweepSpec(
        scenario=args.scenario,
        grids=[GridAxis.parse(g) for g in args.grid],
        outcome_filter=_outcomes(args.outcomes),
        output_path=args.out,
    )
    _emit(sweep_csv(spec, jobs=args.jobs), args.out)


def _parse_scan(text):
    name, eq, rng = text.partition("=")
    parts = rng.split(":")
    if not eq or len(parts) != 2 or not name.strip():
        raise ParseError(f"--scan expects name=lo:hi, got {text!r}")
    try:
        lo, hi = (parse_number(p) for p in parts)
    except ValueError:
        raise ParseError(f"bad number in --scan {text!r}") from None
    return name.strip(), lo, hi


def cmd_threshold(args):
    scan_name, lo, hi = _parse_scan(args.scan)
    fixed = {}
    for item in args.fixed or []:
        g = GridAxis.parse(item)
        if g.start != g.stop:
            raise ParseError(f"--fixed expects name=value, got {item!r}")
        fixed[g.name] = g.start
    query = ThresholdQuery(
        scenario=args.scenario,
        fixed=fixed,
        scan=scan_name,
        lo=lo,
        hi=hi,
        outcome=args.outcome,
        tol=args.tol if args.tol is not None else 1e-6,
    )
    result = find_threshold(query)
    payload = {
        "scenario": query.scenario,
        "scan": query.scan,
        "fixed": fixed,
        "outcome": query.outcome.value if query.outcome is not None else None,
        "tol": query.tol,
        **result.to_dict(),
    }
    _emit(_dump(payload), args.out)


def cmd_validate(args):
    tol = args.tol if args.tol is not None else 1e-9
    rho = validate_density(load_state(args.state), tol=tol)
    _emit(_dump({"valid": True, "dim": rho.shape[0], "tol": tol}), args.out)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the primary output to PATH")
    common.add_argument("--tol", type=float, default=None,
                        help="tolerance (bisection width for threshold, default 1e-6; "
                             "validation tolerance for validate, default 1e-9)")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    parser = argparse.ArgumentParser(prog="bellswap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="locality report for one state")
    p.add_argument("state", help='state spec such as "werner:alpha=0.7", or a matrix JSON file')
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("damp", parents=[common], help="amplitude damping on both qubits")
    p.add_argument("state")
    p.add_argument("--gamma", type=float, required=True)
    p.set_defaults(func=cmd_damp)

    p = sub.add_parser("swap", parents=[common], help="Bell measurement on the middle qubits")
    p.add_argument("state1")
    p.add_argument("state2")
    p.set_defaults(func=cmd_swap)

    p = sub.add_parser("sweep", parents=[common], help="grid sweep to CSV")
    p.add_argument("--scenario", required=True, choices=sorted(SCENARIOS))
    p.add_argument("--grid", action="append", required=True, metavar="NAME=START:STOP:STEP")
    p.add_argument("--outcomes", help="comma separated Bell labels to keep, e.g. b10,b11")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("threshold", parents=[common], help="bisect the abs_lhs = 1 boundary")
    p.add_argument("--scenario", required=True, choices=sorted(SCENARIOS))
    p.add_argument("--scan", required=True, metavar="NAME=LO:HI")
    p.add_argument("--fixed", action="append", metavar="NAME=VALUE")
    p.add_argument("--outcome", help="Bell label for swap scenarios")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("validate", parents=[common], help="check density-matrix invariants")
    p.add_argument("state")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ValidationError, DomainError, DimensionError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except BracketError as exc:
        print(f"bracket error: {exc}", file=sys.stderr)
        return EXIT_BRACKET
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except BellSwapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
