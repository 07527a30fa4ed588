import math
from enum import Enum
from typing import Optional

from pydantic import Field, model_validator
from typing_extensions import Self

from src.schema.base import BaseSchema, Point


class GrowthEstimate(BaseSchema):
    """Order and type estimates from samples on a geometric radii grid"""
    order: float = Field(ge=0)
    type_at_p: float
    type_infinite: bool = False
    raw_ratio: float
    slope: float
    intercept: float
    tail_start: float
    tail_end: float
    samples: int


class FarFieldCoefficients(BaseSchema):
    """q_k = −(1/k) ∫ z^k d(ω − δ) for k = 1..⌊p⌋"""
    p: float = Field(ge=0, allow_inf_nan=False)
    values: tuple[Point, ...]

    @model_validator(mode="after")
    def check_length(self) -> Self:
        if len(self.values) != math.floor(self.p):
            raise ValueError(f"expected {math.floor(self.p)} coefficients, got {len(self.values)}")
        return self

    @property
    def max_abs(self) -> float:
        return max((abs(v.z) for v in self.values), default=0.0)


class RayStatus(str, Enum):
    FITTED = "fitted"
    ANNIHILATED = "annihilated"  # difference below the noise floor along the ray


class RayFit(BaseSchema):
    """Log–log fit of |pt_{ω−δ}| along one ray"""
    angle: float
    status: RayStatus
    slope: Optional[float] = None
    intercept: Optional[float] = None
    samples_used: int
    log_radii: tuple[float, ...]
    log_values: tuple[float, ...]


class DecayReport(BaseSchema):
    """Far-field decay of pt_{ω−δ} along rays"""
    p: float
    threshold: float
    r0: float
    noise_floor: float
    net_mass: float
    mass_mismatch: bool
    rays: tuple[RayFit, ...]
    certified: bool
    notes: tuple[str, ...] = ()

    @property
    def annihilated(self) -> bool:
        return all(r.status == RayStatus.ANNIHILATED for r in self.rays)

    @property
    def worst_slope(self) -> Optional[float]:
        slopes = [r.slope for r in self.rays if r.slope is not None]
        return max(slopes) if slopes else None


class JensenPrivalovReport(BaseSchema):
    """N^rad_μ(1, R) against C_{pt_μ}(0, R) − C_{pt_μ}(0, 1)"""
    R: float
    counting_side: float
    average_side: float
    relative_gap: float
    tolerance: float
    holds: bool


class EnvelopeFunctional(str, Enum):
    MAX = "max"  # M_u
    CIRCLE_MEAN = "circle_mean"  # C_u
    DISK_MEAN = "disk_mean"  # B_u


class EnvelopeReport(BaseSchema):
    """F_u(r) ≤ C·r^p·ln^{1+⌊p⌋−⌈p⌉} r over a radii grid"""
    p: float
    functional: EnvelopeFunctional
    log_power: int
    radii: tuple[float, ...]
    values: tuple[float, ...]
    constant: float
    head_ratio: float
    tail_ratio: float
    holds: bool
