from enum import Enum
from typing import Optional

import numpy as np
from pydantic import Field

from src.schema.base import BaseSchema, Point
from src.schema.kernel import ExtendedReal
from src.schema.polynomial import FunctionClass


class Verdict(str, Enum):
    YES = "yes"
    NO = "no"
    INCONCLUSIVE = "inconclusive"


class MomentVector(BaseSchema):
    """Complex moments ∫ z^k dν for k = 0..degree"""
    degree: int = Field(ge=0)
    values: tuple[Point, ...]

    @property
    def array(self) -> np.ndarray:
        return np.array([v.z for v in self.values], dtype=complex)


class Witness(BaseSchema):
    """Grid point with the smallest margin pt_ω − pt_δ"""
    re: float
    im: float
    margin: float


class Preconditions(BaseSchema):
    """Integrability functionals checked before the logarithmic comparison"""
    tail_weight: str
    tail_value: float
    delta_tail: float
    omega_tail: float


class BalayageReport(BaseSchema):
    """Structured verdict of an H-balayage test"""
    function_class: FunctionClass = Field(alias="class")
    p: float
    verdict: Verdict
    tolerance: float
    residuals: tuple[float, ...] = ()
    worst_witness: Optional[Witness] = None
    preconditions: Optional[Preconditions] = None
    truncation: Optional[int] = None
    points_checked: int = 0
    near_field_skipped: int = 0
    omega_singular_points: int = 0
    inconclusive_points: int = 0
    notes: tuple[str, ...] = ()

    @property
    def max_residual(self) -> float:
        return max(self.residuals, default=0.0)


class BorelCaratheodoryReport(BaseSchema):
    radius: float
    lhs: float
    rhs: float
    holds: bool


class KernelBoundReport(BaseSchema):
    """Empirical constant C with k_q ≤ C·K_q over a (w, z) grid"""
    genus: int
    constant: float
    pairs_checked: int
    zero_bound_max: float
    holds: bool


class KernelIdentityReport(BaseSchema):
    """∫ k_q(w, z) d(ω−δ)(z) against pt_{ω−δ}(w) on sample points"""
    p: float
    genus: int
    split_radius: float
    samples_checked: int
    skipped: tuple[Point, ...] = ()
    max_deviation: float
    tolerance: float
    holds: bool
    notes: tuple[str, ...] = ()


class DoubleSumReport(BaseSchema):
    """Both summation orders of Σ_w Σ_z k_q(w, z) μ(w) ν(z)"""
    genus: int
    rows_first: ExtendedReal
    columns_first: ExtendedReal
    scale: float
    relative_gap: float
    agrees: bool


class TransferReport(BaseSchema):
    """∫ u dδ ≤ ∫ u dω for an explicit subharmonic test function u.

    A −∞ integral on the ω side alone makes the verdict inconclusive rather than no.
    """
    p: float
    verdict: Verdict
    delta_integral: ExtendedReal
    omega_integral: ExtendedReal
    margin: ExtendedReal
    tolerance: float
    holds: bool
    delta_singular: bool = False
    omega_singular: bool = False
    lnmon_precondition: Optional[Verdict] = None
    fubini: Optional[DoubleSumReport] = None
    notes: tuple[str, ...] = ()


class SingularMassReport(BaseSchema):
    """Atoms of ω placed at designated −∞ points of a test potential"""
    points_checked: int
    atoms_hit: int
    mass_on_points: float
    clean: bool
