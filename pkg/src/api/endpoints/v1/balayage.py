import json
import logging
import sys
from enum import IntEnum
from pathlib import Path
from typing import Optional, TextIO

from pydantic import BaseModel, ValidationError

from src.api.functions import run_suite
from src.common import __version__, get_settings
from src.database.measure_repository import CandidateRepository, MeasureRepository, SignedMeasureRepository
from src.database.storage import ExportFormat, StorageClient
from src.errors import BalayageError, SchemaError, SolverStalledError
from src.schema.base import Point
from src.schema.construct import MomentProblem, SolveStatus, SweepRule, SweepSpec
from src.schema.kernel import GridRect, GridSpec, PotentialField
from src.schema.polynomial import FunctionClassKind
from src.schema.report import Verdict
from src.schema.run import RunConfig, RunRecord
from src.services.balayage_construct import poisson_sweep, solve_moment_balayage
from src.services.balayage_verify import check_lnmon_balayage, check_mon_balayage
from src.services.potential_kernel import potential_grid

logger = logging.getLogger(__name__)


class ExitCode(IntEnum):
    OK = 0
    FAILED = 1  # verdict no, infeasible, or a failing criterion
    INPUT_ERROR = 2  # I/O, schema or precondition error


class CheckRequest(BaseModel):
    """Request model for a balayage check"""
    delta: Path
    omega: Path
    function_class: FunctionClassKind = FunctionClassKind.MON
    p: float
    tol: Optional[float] = None
    grid: Optional[str] = None
    resolution: Optional[int] = None
    near_field: Optional[float] = None
    out: Optional[Path] = None


class SweepRequest(BaseModel):
    delta: Path
    center: str = "0,0"
    radius: float = 1.0
    arcs: Optional[int] = None
    rule: SweepRule = SweepRule.NODAL
    out: Optional[Path] = None


class SolveRequest(BaseModel):
    delta: Path
    candidates: Path
    p: float
    tol: Optional[float] = None
    out: Optional[Path] = None
    report: Optional[Path] = None


class SuiteRequest(BaseModel):
    seed: int = 0
    out: Optional[Path] = None
    inputs: Optional[Path] = None


class GridRequest(BaseModel):
    measure: Path
    rect: str
    resolution: Optional[int] = None
    out: Optional[Path] = None


def parse_point(text: str) -> complex:
    """Parse 're,im' into a complex number"""
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 2:
        raise ValueError(f"expected 're,im', got {text!r}")
    return complex(parts[0], parts[1])


def _record(config: RunConfig, report: BaseModel) -> RunRecord:
    return RunRecord(version=__version__, config=config, report=report)


def load_field(path: Path) -> PotentialField:
    """A measure file holds either {"atoms": [...]} or {"plus": ..., "minus": ...}"""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise SchemaError(f"cannot read {path}: {e}") from e
    if isinstance(data, dict) and ("plus" in data or "minus" in data):
        return PotentialField.of(SignedMeasureRepository().load(path))
    return PotentialField.of(MeasureRepository().load(path))


def cmd_check(request: CheckRequest, stream: TextIO = sys.stdout) -> ExitCode:
    settings = get_settings()
    tol = request.tol if request.tol is not None else settings.default_tol
    try:
        repo = MeasureRepository()
        delta = repo.load(request.delta)
        omega = repo.load(request.omega)
        rect = GridRect.parse(request.grid) if request.grid else None
        resolution = request.resolution or settings.grid_resolution
        near_field = {"near_field_factor": request.near_field} if request.near_field is not None else {}
        grid = GridSpec(rect=rect, resolution=resolution, **near_field)
        config = RunConfig(
            command="check",
            inputs=(str(request.delta), str(request.omega)),
            function_class=request.function_class.value,
            p=request.p,
            tol=tol,
            grid=rect,
            resolution=resolution,
            near_field=grid.near_field_factor,
            output=str(request.out) if request.out else None,
            threads=settings.threads,
        )
        if request.function_class == FunctionClassKind.LNMON:
            report = check_lnmon_balayage(delta, omega, request.p, grid, tol)
        else:
            report = check_mon_balayage(delta, omega, request.p, tol)
        StorageClient().write_report(_record(config, report), request.out, stream)
    except (BalayageError, ValidationError, ValueError) as e:
        logger.error(f"Error checking balayage: {str(e)}", exc_info=True)
        return ExitCode.INPUT_ERROR
    return ExitCode.OK if report.verdict == Verdict.YES else ExitCode.FAILED


def cmd_sweep(request: SweepRequest, stream: TextIO = sys.stdout) -> ExitCode:
    settings = get_settings()
    try:
        delta = MeasureRepository().load(request.delta)
        spec = SweepSpec(
            center=Point.of(parse_point(request.center)),
            radius=request.radius,
            arcs=request.arcs or settings.arcs,
            rule=request.rule,
        )
        omega = poisson_sweep(delta, spec)
        repo = MeasureRepository()
        if request.out is None:
            stream.write(repo.dumps(omega) + "\n")
        else:
            repo.save(omega, request.out)
    except (BalayageError, ValidationError, ValueError) as e:
        logger.error(f"Error sweeping measure: {str(e)}", exc_info=True)
        return ExitCode.INPUT_ERROR
    return ExitCode.OK


def cmd_solve(request: SolveRequest, stream: TextIO = sys.stdout) -> ExitCode:
    settings = get_settings()
    tol = request.tol if request.tol is not None else settings.default_tol
    try:
        delta = MeasureRepository().load(request.delta)
        candidates = CandidateRepository().load(request.candidates)
        problem = MomentProblem(source=delta, candidates=candidates.points, degree_bound=request.p)
        result = solve_moment_balayage(problem, tol)
    except SolverStalledError as e:
        logger.error(f"Error solving moment problem: {str(e)}", exc_info=True)
        return ExitCode.FAILED
    except (BalayageError, ValidationError, ValueError) as e:
        logger.error(f"Error solving moment problem: {str(e)}", exc_info=True)
        return ExitCode.INPUT_ERROR

    config = RunConfig(
        command="solve",
        inputs=(str(request.delta), str(request.candidates)),
        p=request.p,
        tol=tol,
        output=str(request.out) if request.out else None,
        threads=settings.threads,
    )
    storage = StorageClient()
    try:
        if result.status == SolveStatus.FEASIBLE:
            repo = MeasureRepository()
            if request.out is None:
                stream.write(repo.dumps(result.measure) + "\n")
            else:
                repo.save(result.measure, request.out)
            if request.report is not None:
                storage.write_report(_record(config, result), request.report)
            return ExitCode.OK
        storage.write_report(_record(config, result), request.report or request.out, stream)
    except BalayageError as e:
        logger.error(f"Error writing solve output: {str(e)}", exc_info=True)
        return ExitCode.INPUT_ERROR
    return ExitCode.FAILED


def cmd_verify_suite(request: SuiteRequest, stream: TextIO = sys.stdout) -> ExitCode:
    try:
        inputs = None
        if request.inputs is not None:
            repo = MeasureRepository()
            inputs = (repo.load(request.inputs / "delta.json"), repo.load(request.inputs / "omega.json"))
        config = RunConfig(
            command="verify-suite",
            inputs=(str(request.inputs),) if request.inputs else (),
            seed=request.seed,
            output=str(request.out) if request.out else None,
            threads=get_settings().threads,
        )
        summary = run_suite(request.seed, inputs, request.out).model_copy(update={"config": config})
        target = request.out / ExportFormat.SUMMARY.value if request.out else None
        StorageClient().write_report(summary, target, stream)
    except BalayageError as e:
        logger.error(f"Error running acceptance battery: {str(e)}", exc_info=True)
        return ExitCode.INPUT_ERROR
    return ExitCode.OK if summary.passed else ExitCode.FAILED


def cmd_grid(request: GridRequest, stream: TextIO = sys.stdout) -> ExitCode:
    settings = get_settings()
    try:
        field = load_field(request.measure)
        rows = potential_grid(field, GridRect.parse(request.rect), request.resolution or settings.grid_resolution)
        storage = StorageClient()
        storage.write_text(storage.grid_csv(rows), request.out, stream)
    except (BalayageError, ValidationError, ValueError) as e:
        logger.error(f"Error evaluating potential grid: {str(e)}", exc_info=True)
        return ExitCode.INPUT_ERROR
    return ExitCode.OK
