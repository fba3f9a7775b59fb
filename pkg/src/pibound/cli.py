"""Command-line interface: ``pibound estimate|infer|diagnose|simulate``.

Exit codes: 0 success, 2 invalid input, 3 solver failure, 4 calibration
failure, 5 hard LICQ violation (``diagnose`` only).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .diagnostics import full_report
from .inference import (CalibrationError, InferenceOptions, SolverFailure,
                        assemble_confidence_set, bootstrap_value_functions,
                        estimate_identified_set)
from .model import DatasetError, ModelSpecError, parse_model, read_csv
from .simulation import rows_to_csv, rows_to_table, run_simulation

SCHEMA_VERSION = 1
EXIT_OK, EXIT_INPUT, EXIT_SOLVER, EXIT_CALIBRATION, EXIT_LICQ = 0, 2, 3, 4, 5
THREADS_ENV = "PIBOUND_THREADS"


class InputError(Exception):
    pass


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(doc: dict, args) -> None:
    doc = {"schema_version": SCHEMA_VERSION, **doc}
    _emit(json.dumps(_jsonable(doc), indent=2, allow_nan=False) + "\n", args.output)


def threads_from(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            value = int(env)
        except ValueError:
            raise InputError(f"{THREADS_ENV} must be a positive integer, got {env!r}") from None
        if value < 1:
            raise InputError(f"{THREADS_ENV} must be a positive integer, got {env!r}")
        return value
    return os.cpu_count() or 1


def options_from(args) -> InferenceOptions:
    return InferenceOptions(relax=args.relax, threshold_mode=args.threshold_mode,
                            workers=threads_from(args))


def load_inputs(args):
    try:
        data = read_csv(args.data)
    except OSError as exc:
        raise InputError(f"cannot read data file: {exc}") from None
    except DatasetError as exc:
        raise InputError(f"{args.data}: {exc}") from None
    try:
        with open(args.model) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read model file: {exc}") from None
    try:
        spec = parse_model(text, data)
    except ModelSpecError as exc:
        raise InputError(f"{args.model}: {exc}") from None
    return spec, data


def _multipliers(est) -> dict:
    out = {}
    for side, lp, sol in (("lb", est.lp_lb, est.sol_lb), ("ub", est.lp_ub, est.sol_ub)):
        out[side] = dict(zip(lp.row_labels, sol.duals.tolist()))
    return out


def cmd_estimate(args) -> int:
    spec, data = load_inputs(args)
    est = estimate_identified_set(spec, data, options=options_from(args))
    _emit_json({"lb": est.lb, "ub": est.ub, "delta": est.delta,
                "relaxation_used": est.relaxation_used, "c_star": est.c_star,
                "theta_lb": est.sol_lb.primal, "theta_ub": est.sol_ub.primal,
                "multipliers": _multipliers(est)}, args)
    return EXIT_OK


def cmd_infer(args) -> int:
    spec, data = load_inputs(args)
    options = options_from(args)
    est = estimate_identified_set(spec, data, options=options)
    draws = bootstrap_value_functions(spec, data, args.boot, args.seed, options, est)
    cs = assemble_confidence_set(est, draws, args.alpha, options)
    warnings = []
    if args.boot == 1:
        warnings.append("a single bootstrap draw gives degenerate quantiles")
    if draws.failure_rate > 0:
        warnings.append(f"{draws.failure_rate:.1%} of bootstrap draws failed and were dropped")
    if est.relaxed:
        warnings.append(f"the sample identified set is empty; moments were relaxed by "
                        f"{est.relaxation_used:.4g}")
    _emit_json({"confidence_set": cs.to_dict(),
                "estimate": {"lb": est.lb, "ub": est.ub, "delta": est.delta},
                "bootstrap": draws.summary(), "threshold_mode": options.threshold_mode,
                "warnings": warnings}, args)
    return EXIT_OK


def cmd_diagnose(args) -> int:
    spec, data = load_inputs(args)
    report = full_report(spec, data, seed=args.seed, options=options_from(args),
                         probe_trials=args.probe_trials)
    doc = report.to_dict()
    doc.pop("schema_version")
    _emit_json(doc, args)
    return EXIT_LICQ if report.hard_licq_violation else EXIT_OK


def _number_list(text: str, kind):
    try:
        values = [kind(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def cmd_simulate(args) -> int:
    options = options_from(args)
    rows = []
    for n in args.n:
        for c in args.c:
            for alpha in args.alpha_list:
                for reps in args.reps:
                    rows.append(run_simulation(args.example, n, c, alpha, reps, args.boot,
                                               args.seed, options))
    _emit(rows_to_table(rows) if args.pretty else rows_to_csv(rows), args.output)
    return EXIT_OK


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _alpha(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError("alpha must lie in (0, 1)")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pibound",
        description="Bounds and confidence sets for linear functionals of "
                    "partially identified parameters.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="write output here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=_positive_int, default=None,
                        help=f"worker processes (default ${THREADS_ENV} or all cores)")
    common.add_argument("--threshold-mode", choices=("length", "indicator"), default="length")
    common.add_argument("--relax", choices=("auto", "off"), default="auto")

    io_args = argparse.ArgumentParser(add_help=False)
    io_args.add_argument("--model", required=True, help="model spec (JSON)")
    io_args.add_argument("--data", required=True, help="dataset (CSV with header)")

    p = sub.add_parser("estimate", parents=[common, io_args],
                       help="estimate the identified set of the functional")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("infer", parents=[common, io_args], help="bootstrap confidence set")
    p.add_argument("--alpha", type=_alpha, default=0.10)
    p.add_argument("--boot", type=_positive_int, default=1000)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("diagnose", parents=[common, io_args],
                       help="check constraint qualification and uniqueness")
    p.add_argument("--probe-trials", type=int, default=50,
                   help="perturbation probe trials (0 to skip)")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo coverage study")
    p.add_argument("--example", required=True,
                   choices=("missing-data", "interval-regression"))
    p.add_argument("--n", type=lambda s: _number_list(s, int), default=[1000],
                   help="sample size(s), comma separated")
    p.add_argument("--c", type=lambda s: _number_list(s, float), default=[1.0],
                   help="design constant(s), comma separated")
    p.add_argument("--alpha", dest="alpha_list", type=lambda s: _number_list(s, _alpha),
                   default=[0.10], help="level(s), comma separated")
    p.add_argument("--reps", type=lambda s: _number_list(s, _positive_int), default=[100])
    p.add_argument("--boot", type=_positive_int, default=1000)
    p.add_argument("--pretty", action="store_true", help="aligned table instead of CSV")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SolverFailure as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except CalibrationError as exc:
        print(f"calibration failure: {exc}", file=sys.stderr)
        return EXIT_CALIBRATION


if __name__ == "__main__":
    sys.exit(main())
