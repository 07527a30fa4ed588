from typing import Optional

from pydantic import Field

from src.schema.base import BaseSchema
from src.schema.measure import AtomicMeasure
from src.schema.polynomial import Polynomial


class TestFunction(BaseSchema):
    """Explicit subharmonic function u.

    With `genus` unset, u = pt_μ + Re P. With a genus q, the potential is replaced by the
    Weierstrass–Hadamard integral u = ∫ k_q(w, ·) dμ(w) + Re P.
    """
    __test__ = False  # not a pytest class

    mu: AtomicMeasure = Field(default_factory=AtomicMeasure)
    polynomial: Polynomial = Polynomial([])
    genus: Optional[int] = Field(default=None, ge=0)
    split_radius: float = Field(default=1.0, gt=0)
