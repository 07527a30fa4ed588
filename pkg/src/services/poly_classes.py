"""Polynomials, circle maxima and the generating families of mon_p / lnmon_p / Pol_p."""
import logging
import math
from typing import Callable, Optional, Union

import numpy as np

from src.errors import InvalidInputError
from src.schema.base import Point
from src.schema.polynomial import (
    CircleStat,
    ClassMember,
    ClassSample,
    FunctionClass,
    FunctionClassKind,
    MemberKind,
    Polynomial,
)
from src.schema.report import BorelCaratheodoryReport

logger = logging.getLogger(__name__)

RealFunction = Callable[[np.ndarray], np.ndarray]


def evaluate(P: Polynomial, z: Union[complex, np.ndarray]) -> Union[complex, np.ndarray]:
    """Horner evaluation of P at z"""
    return P(z)


def floor_p(p: float) -> int:
    return math.floor(p)


def ceil_p(p: float) -> int:
    return math.ceil(p)


def log_power_exponent(p: float) -> int:
    """1 + ⌊p⌋ − ⌈p⌉: 1 for integral p, 0 otherwise"""
    return 1 + floor_p(p) - ceil_p(p)


def circle_points(center: complex, radius: float, n_samples: int, offset: float = 0.0) -> np.ndarray:
    theta = 2 * np.pi * np.arange(n_samples) / n_samples + offset
    return complex(center) + radius * np.exp(1j * theta)


def sup_on_circle(f: RealFunction, center: complex, radius: float, n_samples: int = 1024) -> float:
    """Max of f over n equispaced points of ∂D(center, radius).

    This is a lower bound for the true sup; it is exact in the limit for the
    trigonometric polynomials and log-kernels used here.
    """
    if n_samples < 8:
        raise InvalidInputError(f"need at least 8 circle samples, got {n_samples}")
    values = np.asarray(f(circle_points(center, radius, n_samples)), dtype=float)
    return float(np.max(values))


def max_on_circle(f: RealFunction, center: complex, radius: float, n_samples: int = 1024) -> CircleStat:
    """M_f(center, radius) as a typed value"""
    return CircleStat(
        center=Point.of(center),
        radius=radius,
        value=sup_on_circle(f, center, radius, n_samples),
    )


def borel_caratheodory_check(P: Polynomial, r: float, n_samples: int = 1024) -> BorelCaratheodoryReport:
    """Check M_{|P|}(r) ≤ 2·M_{Re P}(2r) + 3|P(0)|"""
    if r <= 0:
        raise InvalidInputError(f"radius must be positive, got {r}")
    lhs = sup_on_circle(lambda z: np.abs(P(z)), 0j, r, n_samples)
    rhs = 2 * sup_on_circle(lambda z: np.real(P(z)), 0j, 2 * r, n_samples) + 3 * abs(P(0j))
    tol = 1e-9 * (1 + abs(rhs))
    return BorelCaratheodoryReport(radius=r, lhs=lhs, rhs=rhs, holds=lhs <= rhs + tol)


def class_members(H: FunctionClass, sample: Optional[ClassSample] = None) -> list[ClassMember]:
    """Finite generating family of H for the verifier.

    Re z^k and Im z^k for 0 ≤ k ≤ ⌊p⌋ span mon_p (and, by linearity of the integral, the
    harmonic-polynomial and Pol_p classes of the same degree); lnmon adds ln|z − w| for the
    requested centers w.
    """
    sample = sample or ClassSample()
    degree = H.genus
    if degree is None:
        if sample.truncation is None:
            raise InvalidInputError(f"class {H.kind.value}_∞ needs an explicit truncation degree")
        logger.warning(
            f"Class {H.kind.value}_∞ truncated at degree {sample.truncation}; "
            f"balayage is certified only up to that degree"
        )
        degree = sample.truncation
    elif sample.truncation is not None and sample.truncation < degree:
        degree = sample.truncation

    if H.kind == FunctionClassKind.LNMON and not sample.centers:
        raise InvalidInputError("lnmon class needs at least one logarithmic center")

    members: list[ClassMember] = []
    for k in range(degree + 1):
        members.append(ClassMember(kind=MemberKind.RE_MONOMIAL, degree=k))
        members.append(ClassMember(kind=MemberKind.IM_MONOMIAL, degree=k))
    if H.kind == FunctionClassKind.LNMON:
        members.extend(ClassMember(kind=MemberKind.LOG, center=c) for c in sample.centers)
    return members
