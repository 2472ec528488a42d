"""
Batch front end: every command reads a manifold file and writes a JSON report
to stdout. Diagnostics go to stderr; the exit code classifies the outcome.
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

from pydantic import BaseModel, ValidationError

from app.core.config import settings
from app.core.exceptions import (EXIT_INPUT_ERROR, EXIT_OBSTRUCTION, EXIT_OK,
                                 DegenerateAngle, DhymError)
from app.core.logger import setup_logger
from app.schemas.manifold import load_manifold
from app.services.reports import ReportService

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.17g"


def _emit(report: BaseModel) -> None:
    sys.stdout.write(report.model_dump_json(indent=2) + "\n")
    sys.stdout.flush()


def _error_payload(e: Exception) -> dict:
    if isinstance(e, DhymError):
        payload = e.to_dict()
        report = getattr(e, "report", None)
        if report is not None:
            payload["report"] = report.model_dump(mode="json")
        reports = getattr(e, "reports", None)
        if reports:
            payload["reports"] = [r.model_dump(mode="json") for r in reports]
        return payload
    return {"error": type(e).__name__, "detail": str(e)}


def _theta(value: str) -> Optional[float]:
    if value == "auto":
        return None
    try:
        return float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--theta expects 'auto' or a number, got {value!r}")


def _positive(value: str) -> float:
    try:
        x = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {value!r}")
    if not x > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {value!r}")
    return x


def cmd_angle(args, reports: ReportService) -> int:
    _emit(reports.angle(load_manifold(args.file)))
    return EXIT_OK


def cmd_gamma_track(args, reports: ReportService) -> int:
    report, branch = reports.gamma_track(load_manifold(args.file), args.samples)
    if branch is not None and args.csv:
        reports.branch_frame(branch).to_csv(
            args.csv, index=False, float_format=CSV_FLOAT_FORMAT
        )
    _emit(report)
    return EXIT_OBSTRUCTION if report.obstruction else EXIT_OK


def cmd_cjy_check(args, reports: ReportService) -> int:
    report = reports.cjy_check(load_manifold(args.file), args.tmax)
    _emit(report)
    if report.degenerate:
        raise DegenerateAngle(f"Arg = {report.verdict.arg!r} is an endpoint of (0, pi)")
    return EXIT_OK if report.verdict.in_p else EXIT_OBSTRUCTION


def cmd_solve_torus(args, reports: ReportService) -> int:
    report, result = reports.solve_torus(
        load_manifold(args.file),
        theta=args.theta,
        grid=args.grid,
        steps=args.steps,
        allow_lifted=args.lifted,
    )
    if args.csv:
        reports.history_frame(result).to_csv(
            args.csv, index=False, float_format=CSV_FLOAT_FORMAT
        )
    _emit(report)
    return EXIT_OK


def cmd_counterexample(args, reports: ReportService) -> int:
    if args.sweep:
        start, stop, count = args.sweep
        values = reports.sweep_values(start, stop, int(count))
    else:
        values = [args.A]
    _emit(reports.counterexample(args.n, values))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dhym", description=settings.PROJECT_DESCRIPTION
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("angle", help="principal argument of the class")
    p.add_argument("file")
    p.set_defaults(handler=cmd_angle)

    p = sub.add_parser("gamma-track", help="roots and lifted angle of gamma on [0, 1]")
    p.add_argument("file")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--csv", default=None, help="write t,re,im,abs,theta rows")
    p.set_defaults(handler=cmd_gamma_track)

    p = sub.add_parser("cjy-check", help="numerical positivity and test-family checks")
    p.add_argument("file")
    p.add_argument("--tmax", type=_positive, default=10.0)
    p.set_defaults(handler=cmd_cjy_check)

    p = sub.add_parser("solve-torus", help="spectral Newton solve with continuation")
    p.add_argument("file")
    p.add_argument("--theta", type=_theta, default=None, help="'auto' or a number")
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--csv", default=None, help="write iter,residual,alpha rows")
    p.add_argument(
        "--lifted", action="store_true", help="accept constants outside (0, pi)"
    )
    p.set_defaults(handler=cmd_solve_torus)

    p = sub.add_parser("counterexample", help="classify omega = A chi on a torus")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--A", type=float, default=-1.0)
    p.add_argument(
        "--sweep",
        type=float,
        nargs=3,
        metavar=("START", "STOP", "COUNT"),
        default=None,
    )
    p.set_defaults(handler=cmd_counterexample)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    setup_logger()
    args = build_parser().parse_args(argv)
    reports = ReportService()
    try:
        return args.handler(args, reports)
    except DhymError as e:
        logger.warning(f"{args.command} failed: {type(e).__name__}: {e.detail}")
        sys.stderr.write(json.dumps(_error_payload(e)) + "\n")
        return e.exit_code
    except (ValidationError, ValueError, ArithmeticError) as e:
        sys.stderr.write(json.dumps(_error_payload(e)) + "\n")
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
