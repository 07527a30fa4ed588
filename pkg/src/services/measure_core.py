"""Finite measures and charges: closed-disk masses, counting integrals, tails."""
import logging
import math
from typing import Iterable

import numpy as np

from src.errors import DivergentIntegralError, InvalidInputError
from src.schema.measure import Atom, AtomicMeasure, RadialProfile, SignedMeasure, TailWeight

logger = logging.getLogger(__name__)


def disk_mass(m: AtomicMeasure, center: complex, radius: float) -> float:
    """Mass of the closed disk D̄(center, radius); the boundary circle counts."""
    if radius < 0:
        raise InvalidInputError(f"radius must be nonnegative, got {radius}")
    if m.is_empty:
        return 0.0
    dist = np.abs(m.locations - complex(center))
    return math.fsum(m.masses[dist <= radius])


def radial_profile(m: AtomicMeasure, radii: Iterable[float], center: complex = 0j) -> RadialProfile:
    """ν^rad (or ν(center, ·)) sampled on an increasing radii grid"""
    grid = tuple(float(r) for r in radii)
    values = tuple(disk_mass(m, center, r) for r in grid)
    return RadialProfile(grid=grid, values=values)


def counting_integral(m: AtomicMeasure, center: complex, r: float, R: float) -> float:
    """∫_r^R m(center, t)/t dt, exactly.

    An atom at distance d ≤ R contributes mass·ln(R / max(r, d)); the integrand is a step
    function, so the sum is the integral.

    Raises:
        InvalidInputError: r < 0 or r ≥ R
        DivergentIntegralError: r = 0 and an atom sits exactly at the center
    """
    if r < 0 or r >= R or not math.isfinite(R):
        raise InvalidInputError(f"counting integral needs 0 ≤ r < R < ∞, got r={r}, R={R}")
    if m.is_empty:
        return 0.0
    dist = np.abs(m.locations - complex(center))
    masses = m.masses
    if r == 0 and np.any(dist == 0):
        raise DivergentIntegralError(
            f"counting integral diverges at t=0: atom of mass {float(masses[dist == 0].sum())} at the center"
        )
    inside = dist <= R
    lower = np.maximum(r, dist[inside])
    return math.fsum(masses[inside] * np.log(R / lower))


def _weighted_antiderivative(t: np.ndarray, weight: TailWeight) -> np.ndarray:
    """F with F'(t) = weight(t)/t, for t ≥ 1"""
    k = weight.power
    lt = np.log(t)
    if not weight.log:
        if k == 0:
            return lt
        return t ** k / k
    if k == 0:
        return lt ** 2 / 2
    return t ** k * lt / k - t ** k / k ** 2


def weighted_tail(m: AtomicMeasure, r: float, R: float, weight: TailWeight) -> float:
    """∫_r^R (m^rad(∞) − m^rad(t))/t · weight(t) dt, exactly.

    The tail m^rad(∞) − m^rad(t) is the mass strictly outside D̄(t), so an atom at
    radius ρ > r contributes mass·(F(min(R, ρ)) − F(r)). For R = ∞ the integrand vanishes
    past the outermost atom and the result is finite.

    Raises:
        InvalidInputError: r < 1 or r ≥ R
    """
    if r < 1 or r >= R:
        raise InvalidInputError(f"weighted tail needs 1 ≤ r < R, got r={r}, R={R}")
    if m.is_empty:
        return 0.0
    rho = np.abs(m.locations)
    outside = rho > r
    if not np.any(outside):
        return 0.0
    upper = np.minimum(rho[outside], R)
    lower = np.full_like(upper, float(r))
    contrib = _weighted_antiderivative(upper, weight) - _weighted_antiderivative(lower, weight)
    return math.fsum(m.masses[outside] * contrib)


def canonicalize(m: SignedMeasure) -> SignedMeasure:
    """Jordan-minimal form: merge duplicate locations, cancel plus against minus.

    Locations are equal iff their coordinates are bitwise equal.
    """
    net: dict[tuple[str, str], list] = {}
    for sign, part in ((1.0, m.plus), (-1.0, m.minus)):
        for a in part.atoms:
            key = (float(a.re).hex(), float(a.im).hex())
            if key not in net:
                net[key] = [a.re, a.im, []]
            net[key][2].append(sign * a.mass)
    plus: list[Atom] = []
    minus: list[Atom] = []
    for re, im, contributions in net.values():
        value = math.fsum(contributions)
        if value > 0:
            plus.append(Atom(re=re, im=im, mass=value))
        elif value < 0:
            minus.append(Atom(re=re, im=im, mass=-value))
    return SignedMeasure(plus=AtomicMeasure(atoms=tuple(plus)), minus=AtomicMeasure(atoms=tuple(minus)))
