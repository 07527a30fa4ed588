import math
from enum import Enum
from typing import Optional, Union

from pydantic import Field

from src.schema.base import BaseSchema
from src.schema.measure import AtomicMeasure, SignedMeasure


class Signal(str, Enum):
    """Extended-real outcomes reported instead of silent floats"""
    MINUS_INFINITY = "-inf"
    PLUS_INFINITY = "inf"
    UNDEFINED = "nan"


ExtendedReal = Union[float, Signal]


def to_extended(value: float) -> ExtendedReal:
    """Translate an IEEE value from the vectorized internals into a public value"""
    if math.isnan(value):
        return Signal.UNDEFINED
    if value == -math.inf:
        return Signal.MINUS_INFINITY
    if value == math.inf:
        return Signal.PLUS_INFINITY
    return float(value)


class KernelSpec(BaseSchema):
    """Weierstrass–Hadamard kernel of genus q with split radius r0"""
    genus: int = Field(ge=0)
    split_radius: float = Field(default=1.0, gt=0)


class PotentialField(BaseSchema):
    """Logarithmic potential pt_ν of an atomic charge ν"""
    measure: SignedMeasure

    @classmethod
    def of(cls, m: Union[AtomicMeasure, SignedMeasure]) -> "PotentialField":
        if isinstance(m, AtomicMeasure):
            m = SignedMeasure.positive(m)
        return cls(measure=m)


class GridRect(BaseSchema):
    """Axis-aligned rectangle [x_min, x_max] × [y_min, y_max]"""
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    @classmethod
    def parse(cls, text: str) -> "GridRect":
        """Parse 'x_min,x_max,y_min,y_max'"""
        parts = [float(p) for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected 4 comma-separated numbers, got {text!r}")
        return cls(x_min=parts[0], x_max=parts[1], y_min=parts[2], y_max=parts[3])


class GridRow(BaseSchema):
    re: float
    im: float
    pt_plus: float
    pt_minus: float
    pt_total: float


class GridSpec(BaseSchema):
    """Evaluation points for the potential-domination check.

    Without `rect` the bounding box of both supports is inflated by `inflate` about its
    center. Far-field points sit on `far_rays` rays at `far_radii` geometric radii.
    Each atom of ω excludes the open disk of radius `near_field_factor` times its own
    nearest-neighbour distance; if more than `max_skipped_fraction` of the lattice is
    excluded the check cannot say yes.
    """
    rect: Optional[GridRect] = None
    resolution: int = Field(default=64, ge=2)
    inflate: float = Field(default=3.0, ge=1)
    far_rays: int = Field(default=16, ge=0)
    far_radii: int = Field(default=16, ge=0)
    near_field_factor: float = Field(default=0.5, ge=0)
    max_skipped_fraction: float = Field(default=0.5, gt=0, le=1)

    @classmethod
    def for_sweep(cls, **kwargs) -> "GridSpec":
        """Grid for discretized sweeps: two node spacings around every node"""
        return cls(near_field_factor=SWEEP_NEAR_FIELD_FACTOR, **kwargs)


# nodal quadrature error at this distance stays below 1e-6 for sources with |a| ≤ 0.7 at any node count
SWEEP_NEAR_FIELD_FACTOR = 2.0
