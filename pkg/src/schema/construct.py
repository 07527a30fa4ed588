from enum import Enum
from typing import Optional

from pydantic import Field, field_validator

from src.schema.base import BaseSchema, Point
from src.schema.measure import AtomicMeasure
from src.schema.polynomial import Polynomial


class SweepRule(str, Enum):
    """How node masses of a circle sweep are computed"""
    NODAL = "nodal"  # Poisson kernel sampled at the nodes, normalized
    ARC = "arc"  # exact Poisson integral over the arc around each node


class SweepSpec(BaseSchema):
    """Target circle and discretization for a Poisson sweep"""
    center: Point = Point(re=0.0, im=0.0)
    radius: float = Field(gt=0)
    arcs: int = Field(ge=8)
    rule: SweepRule = SweepRule.NODAL


class Regularization(str, Enum):
    NONE = "none"
    MIN_TOTAL_VARIATION = "min_total_variation"


class MomentProblem(BaseSchema):
    """Find ω ≥ 0 on the candidates with the moments of the source up to ⌊p⌋"""
    source: AtomicMeasure
    candidates: tuple[Point, ...]
    degree_bound: float = Field(ge=0, allow_inf_nan=False)
    regularization: Regularization = Regularization.NONE

    @field_validator("candidates")
    @classmethod
    def nonempty(cls, candidates: tuple[Point, ...]) -> tuple[Point, ...]:
        if not candidates:
            raise ValueError("candidate list must be nonempty")
        return candidates

    @property
    def constraint_count(self) -> int:
        return 2 * int(self.degree_bound) + 1


class SolveStatus(str, Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"


class SolveResult(BaseSchema):
    """Outcome of the moment synthesis (solver report plus the measure when feasible)"""
    status: SolveStatus
    measure: Optional[AtomicMeasure] = None
    residual: float
    iterations: int
    active_set_size: int
    constraints: int
    tolerance: float


class CandidateSet(BaseSchema):
    """Candidate support points for the moment synthesis"""
    points: tuple[Point, ...]


class PotentialSpec(BaseSchema):
    """An explicit function pt_m + Re P; its Riesz measure is m"""
    measure: AtomicMeasure
    harmonic_part: Polynomial = Polynomial([])
