import math
from enum import Enum
from typing import Any, Optional, Union

import numpy as np
from pydantic import ConfigDict, Field, RootModel, model_validator

from src.schema.base import BaseSchema, Point


class Polynomial(RootModel[tuple[tuple[float, float], ...]]):
    """Complex polynomial c_0 + c_1 z + ... + c_n z^n, stored as [[re, im], ...].

    Trailing zero coefficients are stripped, so the zero polynomial is the empty list
    and has degree None.
    """
    model_config = ConfigDict(frozen=True)

    @model_validator(mode="before")
    @classmethod
    def normalize(cls, data: Any) -> Any:
        if isinstance(data, (list, tuple, np.ndarray)):
            pairs = []
            for c in data:
                if isinstance(c, (complex, float, int, np.number)):
                    c = complex(c)
                    pairs.append((c.real, c.imag))
                else:
                    re, im = c
                    pairs.append((float(re), float(im)))
            while pairs and pairs[-1] == (0.0, 0.0):
                pairs.pop()
            return tuple(pairs)
        return data

    @classmethod
    def from_coefficients(cls, coefficients: Union[list[complex], np.ndarray]) -> "Polynomial":
        return cls(list(coefficients))

    @classmethod
    def monomial(cls, k: int, c: complex = 1.0) -> "Polynomial":
        return cls([0.0] * k + [complex(c)])

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([complex(re, im) for re, im in self.root], dtype=complex)

    @property
    def degree(self) -> Optional[int]:
        return len(self.root) - 1 if self.root else None

    def __call__(self, z: Union[complex, np.ndarray]) -> Union[complex, np.ndarray]:
        """Horner evaluation; scalar in, scalar out"""
        zz = np.asarray(z, dtype=complex)
        acc = np.zeros_like(zz)
        for c in self.coefficients[::-1]:
            acc = acc * zz + c
        return complex(acc) if acc.ndim == 0 else acc


class FunctionClassKind(str, Enum):
    MON = "mon"
    LNMON = "lnmon"
    HAR_POLY = "har_poly"
    POL = "pol"


class FunctionClass(BaseSchema):
    """Test-function class: mon_p, lnmon_p, harmonic polynomials, or Pol_p (degree bound p)"""
    kind: FunctionClassKind
    degree_bound: float = Field(ge=0)

    @property
    def genus(self) -> Optional[int]:
        """⌊p⌋, or None when p = ∞"""
        return None if math.isinf(self.degree_bound) else math.floor(self.degree_bound)


class MemberKind(str, Enum):
    RE_MONOMIAL = "re_monomial"
    IM_MONOMIAL = "im_monomial"
    LOG = "log"


class ClassMember(BaseSchema):
    """One generator of a function class: Re z^k, Im z^k or ln|z − w|"""
    kind: MemberKind
    degree: Optional[int] = None
    center: Optional[Point] = None

    @property
    def label(self) -> str:
        if self.kind == MemberKind.LOG:
            return f"ln|z-({self.center.re:g}{self.center.im:+g}i)|"
        part = "Re" if self.kind == MemberKind.RE_MONOMIAL else "Im"
        return f"{part} z^{self.degree}"

    def __call__(self, z: Union[complex, np.ndarray]) -> Union[float, np.ndarray]:
        zz = np.asarray(z, dtype=complex)
        if self.kind == MemberKind.LOG:
            with np.errstate(divide="ignore"):
                out = np.log(np.abs(zz - self.center.z))
        elif self.kind == MemberKind.RE_MONOMIAL:
            out = (zz ** self.degree).real
        else:
            out = (zz ** self.degree).imag
        return float(out) if out.ndim == 0 else out


class ClassSample(BaseSchema):
    """How to draw a finite generating family from a (possibly infinite) class"""
    truncation: Optional[int] = Field(default=None, ge=0)
    centers: tuple[Point, ...] = ()


class CircleStat(BaseSchema):
    """A statistic (e.g. M_u) of a function on the circle ∂D(center, radius)"""
    center: Point
    radius: float = Field(ge=0)
    value: float
