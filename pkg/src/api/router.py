import argparse
import logging
from pathlib import Path
from typing import Optional, Sequence

from src.api.endpoints.v1.balayage import (
    CheckRequest,
    GridRequest,
    SolveRequest,
    SuiteRequest,
    SweepRequest,
    cmd_check,
    cmd_grid,
    cmd_solve,
    cmd_sweep,
    cmd_verify_suite,
)
from src.common import __version__

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    """Command surface: one sub-command per handler"""
    parser = argparse.ArgumentParser(prog="balayage", description="Balayage of finite measures on the plane")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check", help="test whether omega is a balayage of delta")
    check.add_argument("delta", type=Path)
    check.add_argument("omega", type=Path)
    check.add_argument("--class", dest="function_class", choices=["mon", "lnmon"], default="mon")
    check.add_argument("--p", type=float, required=True)
    check.add_argument("--tol", type=float, help="tolerance (default 1e-9 or BALAYAGE_DEFAULT_TOL)")
    check.add_argument("--grid", help="domination rectangle x_min,x_max,y_min,y_max")
    check.add_argument("--res", dest="resolution", type=int, help="grid resolution (default 64)")
    check.add_argument(
        "--near-field", dest="near_field", type=float,
        help="per-atom exclusion as a multiple of the nearest-neighbour distance (default 0.5, 2 for sweeps)",
    )
    check.add_argument("--out", type=Path, help="report path (default stdout)")
    check.set_defaults(handler=lambda a: cmd_check(CheckRequest(**_fields(a, CheckRequest))))

    sweep = commands.add_parser("sweep", help="Poisson sweep onto a circle")
    sweep.add_argument("delta", type=Path)
    sweep.add_argument("--center", default="0,0", help="circle center re,im")
    sweep.add_argument("--radius", type=float, default=1.0)
    sweep.add_argument("--arcs", type=int, help="node count (default 512 or BALAYAGE_ARCS)")
    sweep.add_argument("--rule", choices=["nodal", "arc"], default="nodal")
    sweep.add_argument("--out", type=Path)
    sweep.set_defaults(handler=lambda a: cmd_sweep(SweepRequest(**_fields(a, SweepRequest))))

    solve = commands.add_parser("solve", help="moment-matching synthesis on candidate points")
    solve.add_argument("delta", type=Path)
    solve.add_argument("candidates", type=Path)
    solve.add_argument("--p", type=float, required=True)
    solve.add_argument("--tol", type=float)
    solve.add_argument("--out", type=Path)
    solve.add_argument("--report", type=Path, help="solver report path")
    solve.set_defaults(handler=lambda a: cmd_solve(SolveRequest(**_fields(a, SolveRequest))))

    suite = commands.add_parser("verify-suite", help="run the acceptance battery")
    suite.add_argument("--seed", type=int, default=0)
    suite.add_argument("--out", type=Path, help="directory for summary.json and decay.csv")
    suite.add_argument("--inputs", type=Path, help="directory with delta.json and omega.json to check as well")
    suite.set_defaults(handler=lambda a: cmd_verify_suite(SuiteRequest(**_fields(a, SuiteRequest))))

    grid = commands.add_parser("grid", help="potential on a rectangular grid as CSV")
    grid.add_argument("measure", type=Path)
    grid.add_argument("--rect", required=True, help="x_min,x_max,y_min,y_max")
    grid.add_argument("--res", dest="resolution", type=int)
    grid.add_argument("--out", type=Path)
    grid.set_defaults(handler=lambda a: cmd_grid(GridRequest(**_fields(a, GridRequest))))
    return parser


def _fields(args: argparse.Namespace, model: type) -> dict:
    return {k: v for k, v in vars(args).items() if k in model.model_fields and v is not None}


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments and run the selected handler; returns the exit code"""
    args = build_parser().parse_args(argv)
    logger.debug(f"Dispatching {args.command}")
    return int(args.handler(args))
