"""Command-line front end.

Subcommands::

    structneg measure --family werner --param 0.8
    structneg measure --input state.json
    structneg sweep --family rho_a --start auto --stop 1 --steps 50 --out fig4.csv
    structneg verify --dims 2,3 --trials 200 --seed 7 [--suite weyl]
    structneg spa --input state.json --out spa.json

Exit codes: 0 success, 1 usage error, 2 input validation error, 3 a hard
check failed (a verification suite, or a sweep row breaking the
negativity bound).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import measures, qstate, verify
from .errors import ParameterOutOfRange, StructNegError

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_VIOLATION = 0, 1, 2, 3

SWEEP_HEADER = ("param", "negativity", "structured_negativity", "c_lb", "q", "lambda_min_pt", "lambda_min_spa")
RESULT1_TOL = 1e-9


class UsageError(Exception):
    pass


class HardCheckFailed(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class SweepResult:
    family: str
    parameter_name: str
    rows: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(SWEEP_HEADER)
        for row in self.rows:
            writer.writerow([_fmt(row[0]), *(_fmt(x) for x in row[1:4]), str(row[4]), _fmt(row[5]), _fmt(row[6])])
        return buf.getvalue()


def _fmt(x: float) -> str:
    # adding 0.0 turns -0.0 into 0.0
    return format(float(x) + 0.0, ".12g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def run_sweep(family: str, start: float, stop: float, steps: int) -> SweepResult:
    """Evaluate every measure on an evenly spaced closed grid.

    Raises ``HardCheckFailed`` if any row breaks a report invariant,
    including ``N <= 2(1 - 1/d) N_S``.
    """
    if family not in qstate.FAMILY_RANGES:
        raise UsageError(f"family {family!r} cannot be swept; choose from {', '.join(qstate.FAMILY_RANGES)}")
    if steps < 2:
        raise UsageError("--steps must be at least 2")
    if not start < stop:
        raise UsageError("--start must be below --stop")
    lo, hi = qstate.FAMILY_RANGES[family]
    for name, v in (("start", start), ("stop", stop)):
        if not lo - 1e-12 <= v <= hi + 1e-12:
            raise ParameterOutOfRange(f"{name} = {v!r} outside [{lo:.12g}, {hi:.12g}] for {family}")
    result = SweepResult(family, qstate.FAMILY_PARAMETER[family])
    for x in np.linspace(start, stop, steps):
        rep = measures.measure_report(qstate.family_state(family, float(x)))
        bad = rep.check(RESULT1_TOL)
        if bad:
            raise HardCheckFailed(f"{family} at {x:.12g}: invariant(s) {', '.join(bad)} violated")
        result.rows.append((float(x), rep.negativity, rep.structured_negativity, rep.c_lb,
                            rep.q_count, rep.lambda_min_pt, rep.lambda_min_spa))
    return result


def _parse_bound(text: str, family: str, which: str) -> float:
    if text == "auto":
        lo, hi = qstate.FAMILY_RANGES.get(family, (None, None))
        if lo is None:
            raise UsageError(f"family {family!r} has no parameter range")
        return lo if which == "start" else hi
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"--{which} must be a number or 'auto', got {text!r}") from None


def _parse_dims(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"--dims must be a comma-separated list of integers, got {text!r}") from None


def cmd_measure(args) -> int:
    if args.input:
        state = qstate.load_state(args.input)
        source = {"input": args.input}
    elif args.family:
        if args.family != "max_entangled" and args.param is None:
            raise UsageError(f"--param is required for family {args.family}")
        state = qstate.family_state(args.family, args.param, d=args.dim)
        source = {"family": args.family, "param": args.param}
    else:
        raise UsageError("give either --family or --input")
    doc = dict(source, **measures.measure_report(state).to_dict())
    _emit(json.dumps(_jsonable(doc), indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    start = _parse_bound(args.start, args.family, "start")
    stop = _parse_bound(args.stop, args.family, "stop")
    result = run_sweep(args.family, start, stop, args.steps)
    _emit(result.to_csv(), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    dims = _parse_dims(args.dims)
    suites = tuple(args.suite) if args.suite else verify.ALL_SUITES
    if args.trials < 0:
        raise UsageError("--trials must be non-negative")
    unknown = set(suites) - set(verify.ALL_SUITES)
    if unknown:
        raise UsageError(f"unknown suite(s) {sorted(unknown)}; choose from {', '.join(verify.ALL_SUITES)}")
    if any(d not in verify.SUITE_DIMS for d in dims):
        raise UsageError(f"--dims entries must be in {verify.SUITE_DIMS}")
    config = verify.VerifyConfig(dims=dims, trials=args.trials, locc_m=args.m, suites=suites, workers=args.workers)
    reports = verify.run_all(config, seed=args.seed)
    ok = all(r.passed for r in reports)
    doc = {
        "seed": args.seed,
        "dims": list(dims),
        "trials": args.trials,
        "all_hard_passed": ok,
        "reports": [r.to_dict() for r in reports],
    }
    _emit(json.dumps(_jsonable(doc), indent=2) + "\n", args.out)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_spa(args) -> int:
    state = qstate.load_state(args.input)
    out = measures.spa_pt(state)
    text = json.dumps(qstate.state_to_dict(out)) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="structneg", description="Structured negativity and related entanglement measures.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="measure report for a family point or a state file")
    p.add_argument("--family", choices=qstate.FAMILIES)
    p.add_argument("--param", type=float)
    p.add_argument("--dim", type=int, default=2, help="local dimension for max_entangled")
    p.add_argument("--input", help="state file (JSON)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("sweep", help="CSV table of measures over a family parameter")
    p.add_argument("--family", required=True, choices=tuple(qstate.FAMILY_RANGES))
    p.add_argument("--start", default="auto")
    p.add_argument("--stop", default="auto")
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run verification suites, JSON report")
    p.add_argument("--dims", default="2,3")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--suite", action="append", help="suite name; repeatable (default: all)")
    p.add_argument("--m", type=int, default=2, help="Kraus operator count for the LOCC suite")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("spa", help="write the SPA-PT of a state file")
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_spa)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"structneg: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HardCheckFailed as exc:
        print(f"structneg: check failed: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except (StructNegError, OSError) as exc:
        print(f"structneg: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
