"""Growth order and type, far-field decay fits, far-field coefficients, Jensen–Privalov."""
import logging
import math
from typing import Iterable, Optional

import numpy as np

from src.common import parallel_map
from src.errors import InvalidInputError
from src.schema.asymptotics import (
    DecayReport,
    EnvelopeFunctional,
    EnvelopeReport,
    FarFieldCoefficients,
    GrowthEstimate,
    JensenPrivalovReport,
    RayFit,
    RayStatus,
)
from src.schema.base import Point
from src.schema.kernel import PotentialField
from src.schema.measure import AtomicMeasure, SignedMeasure
from src.schema.subharmonic import TestFunction
from src.services.balayage_verify import charge_moments
from src.services.measure_core import counting_integral
from src.services.poly_classes import log_power_exponent, sup_on_circle
from src.services.potential_kernel import (
    ON_CIRCLE_RTOL,
    circle_average,
    circle_average_potential,
    disk_average,
    evaluate_test_function,
    log_abs_one_minus,
)

logger = logging.getLogger(__name__)

MIN_GRID = 8
GEOMETRIC_RTOL = 1e-9
NOISE_FLOOR = 1e-13
SLOPE_SLACK = 0.2
MIN_FIT_SAMPLES = 3
ENVELOPE_GROWTH = 1.05
JENSEN_RTOL = 1e-12


def _check_geometric(radii: np.ndarray) -> float:
    """Common ratio g > 1 of a geometric grid"""
    if radii.ndim != 1 or radii.size < MIN_GRID:
        raise InvalidInputError(f"need at least {MIN_GRID} radii, got {radii.size}")
    if np.any(radii <= 0) or not np.all(np.isfinite(radii)):
        raise InvalidInputError("radii must be positive and finite")
    ratios = radii[1:] / radii[:-1]
    g = float(ratios[0])
    if g <= 1 or np.any(np.abs(ratios - g) > GEOMETRIC_RTOL * g):
        raise InvalidInputError("radii must form a geometric grid x_i = x_0·g^i with g > 1")
    return g


def estimate_order_type(radii: Iterable[float], values: Iterable[float], p: float) -> GrowthEstimate:
    """Order and p-type of a sampled function on a geometric radii grid.

    The limsup of ln(1 + f⁺(x))/ln x is replaced by the largest incremental log–log
    slope over the last half of the grid (clipped at 0); the raw ratio is kept as a
    diagnostic. type_at_p is the largest f(x)/x^p over the same tail.

    Raises:
        InvalidInputError: short or non-geometric grid, or tail radii ≤ 1
    """
    x = np.asarray(list(radii), dtype=float)
    f = np.asarray(list(values), dtype=float)
    if x.shape != f.shape:
        raise InvalidInputError(f"{x.size} radii but {f.size} values")
    g = _check_geometric(x)
    tail = slice(x.size // 2, None)
    if x[tail][0] <= 1:
        raise InvalidInputError("the tail half of the grid must lie beyond x = 1")

    level = np.log1p(np.maximum(f, 0.0))
    increments = np.diff(level[tail]) / math.log(g)
    order = max(float(np.max(increments)), 0.0)
    raw_ratio = float(np.max(level[tail] / np.log(x[tail])))
    type_at_p = float(np.max(f[tail] / x[tail] ** p))
    slope, intercept = np.polyfit(np.log(x[tail]), level[tail], 1)
    return GrowthEstimate(
        order=order,
        type_at_p=type_at_p,
        type_infinite=not math.isfinite(type_at_p),
        raw_ratio=raw_ratio,
        slope=float(slope),
        intercept=float(intercept),
        tail_start=float(x[tail][0]),
        tail_end=float(x[-1]),
        samples=int(x.size),
    )


def _charge_potential_far(nu: SignedMeasure, w: np.ndarray) -> np.ndarray:
    """pt_ν(w) for |w| beyond the support: ν(ℂ)·ln|w| + Σ ±m·ln|1 − z/w|"""
    locs, masses = nu.signed_arrays()
    net = math.fsum(masses)
    out = net * np.log(np.abs(w))
    if locs.size:
        terms = log_abs_one_minus(locs[None, :] / w[:, None]) * masses[None, :]
        out = out + np.array([math.fsum(row) for row in terms])
    return out


def _fit_ray(nu: SignedMeasure, angle: float, radii: np.ndarray) -> RayFit:
    w = radii * np.exp(1j * angle)
    diff = np.abs(_charge_potential_far(nu, w))
    with np.errstate(divide="ignore"):
        log_values = np.log(diff)
    log_radii = np.log(radii)
    usable = diff > NOISE_FLOOR
    base = dict(
        angle=float(angle),
        samples_used=int(np.count_nonzero(usable)),
        log_radii=tuple(float(v) for v in log_radii),
        log_values=tuple(float(v) for v in log_values),
    )
    if np.count_nonzero(usable) < MIN_FIT_SAMPLES:
        return RayFit(status=RayStatus.ANNIHILATED, **base)
    slope, intercept = np.polyfit(log_radii[usable], log_values[usable], 1)
    return RayFit(status=RayStatus.FITTED, slope=float(slope), intercept=float(intercept), **base)


def default_ray_angles(n_rays: int = 8) -> np.ndarray:
    """Ray directions offset by half a step from the real axis"""
    return 2 * np.pi * (np.arange(n_rays) + 0.5) / n_rays


def fit_decay_exponent(
    delta: AtomicMeasure,
    omega: AtomicMeasure,
    p: float,
    angles: Optional[Iterable[float]] = None,
    radii: Optional[Iterable[float]] = None,
    r0: float = 1.0,
    tol: float = 1e-9,
) -> DecayReport:
    """Least-squares slope of ln|pt_{ω−δ}(w)| against ln|w| along rays.

    Rays whose difference stays at or below the noise floor 1e-13 (fewer than 3 usable
    samples) are reported as annihilated. Certified when there is no mass mismatch and
    every ray is annihilated or has slope ≤ −(⌊p⌋ + 1) + 0.2.

    Raises:
        InvalidInputError: a radius does not exceed R0 = max(r0, 2s), s the support radius
    """
    support = max(delta.support_radius(), omega.support_radius())
    R0 = max(r0, 2 * support)
    radii = np.asarray(list(radii), dtype=float) if radii is not None else R0 * np.geomspace(2, 200, 16)
    if radii.size == 0 or np.any(radii <= R0):
        raise InvalidInputError(f"decay radii must exceed R0 = {R0}")
    angles = np.asarray(list(angles), dtype=float) if angles is not None else default_ray_angles()
    genus = math.floor(p)
    threshold = -(genus + 1) + SLOPE_SLACK

    charge = SignedMeasure.from_difference(omega, delta)
    net = charge.net_mass
    mismatch = abs(net) > tol * (1 + delta.total_mass)
    rays = tuple(parallel_map(lambda a: _fit_ray(charge, float(a), radii), list(angles)))
    rays_ok = all(r.status == RayStatus.ANNIHILATED or r.slope <= threshold for r in rays)

    notes = []
    if mismatch:
        logger.warning(f"Mass mismatch ω(ℂ) − δ(ℂ) = {net:.3e}; ln|w| dominates the far field")
        notes.append(f"mass mismatch {net:.3e}")
    if all(r.status == RayStatus.ANNIHILATED for r in rays):
        notes.append("exact annihilation: difference below the noise floor on every ray")
    report = DecayReport(
        p=p,
        threshold=threshold,
        r0=R0,
        noise_floor=NOISE_FLOOR,
        net_mass=net,
        mass_mismatch=mismatch,
        rays=rays,
        certified=rays_ok and not mismatch,
        notes=tuple(notes),
    )
    logger.info(f"Decay fit at p={p}: certified={report.certified}, worst slope {report.worst_slope}")
    return report


def far_field_coefficients(delta: AtomicMeasure, omega: AtomicMeasure, p: float) -> FarFieldCoefficients:
    """q_k = −(1/k) ∫ z^k d(ω − δ) for k = 1..⌊p⌋, from exactly rounded sums"""
    if math.isinf(p) or p < 0:
        raise InvalidInputError(f"far-field coefficients need a finite p ≥ 0, got {p}")
    genus = math.floor(p)
    m = charge_moments(SignedMeasure.from_difference(omega, delta), genus)
    values = tuple(Point.of(-m[k] / k) for k in range(1, genus + 1))
    return FarFieldCoefficients(p=p, values=values)


def jensen_privalov_check(mu: AtomicMeasure, R: float) -> JensenPrivalovReport:
    """N^rad_μ(1, R) = C_{pt_μ}(0, R) − C_{pt_μ}(0, 1) with both sides exact.

    Raises:
        InvalidInputError: R ≤ 1, or an atom lies on |z| = 1 or |z| = R
    """
    if not R > 1 or not math.isfinite(R):
        raise InvalidInputError(f"R must be a finite number > 1, got {R}")
    rho = np.abs(mu.locations)
    for radius in (1.0, R):
        if rho.size and np.any(np.abs(rho - radius) <= ON_CIRCLE_RTOL * radius):
            raise InvalidInputError(f"an atom of μ lies on the circle |z| = {radius}")
    field = PotentialField.of(mu)
    counting = counting_integral(mu, 0j, 1.0, R)
    average = circle_average_potential(field, 0j, R) - circle_average_potential(field, 0j, 1.0)
    scale = max(abs(counting), abs(average))
    gap = abs(counting - average) / scale if scale > 0 else 0.0
    return JensenPrivalovReport(
        R=R,
        counting_side=counting,
        average_side=average,
        relative_gap=gap,
        tolerance=JENSEN_RTOL,
        holds=gap <= JENSEN_RTOL,
    )


def _envelope_values(u: TestFunction, radii: np.ndarray, functional: EnvelopeFunctional, n_samples: int) -> list[float]:
    def f(z: np.ndarray) -> np.ndarray:
        return evaluate_test_function(u, z)

    if functional == EnvelopeFunctional.MAX:
        return [sup_on_circle(f, 0j, float(r), n_samples) for r in radii]
    if functional == EnvelopeFunctional.CIRCLE_MEAN:
        return [circle_average(f, 0j, float(r), n_samples) for r in radii]
    return [disk_average(f, 0j, float(r), n_samples=n_samples) for r in radii]


def growth_envelope_check(
    u: TestFunction,
    p: float,
    radii: Optional[Iterable[float]] = None,
    functional: EnvelopeFunctional = EnvelopeFunctional.MAX,
    n_samples: int = 1024,
) -> EnvelopeReport:
    """Fit C with F_u(r) ≤ C·r^p·ln^{1+⌊p⌋−⌈p⌉} r over radii r > 1.

    F is M_u, C_u or B_u around the origin. The envelope holds when the largest ratio
    F⁺/φ over the outer half of the radii is at most 1.05 times the largest over the
    inner half.
    """
    r = np.asarray(list(radii), dtype=float) if radii is not None else np.geomspace(math.e, math.e ** 8, 16)
    if r.size < 2 or np.any(r <= 1):
        raise InvalidInputError("envelope radii must exceed 1 and number at least 2")
    power = log_power_exponent(p)
    phi = r ** p * np.log(r) ** power
    values = np.asarray(_envelope_values(u, r, functional, n_samples))
    ratios = np.maximum(values, 0.0) / phi
    half = r.size // 2
    head, tail = float(np.max(ratios[:half])), float(np.max(ratios[half:]))
    constant = float(np.max(ratios))
    holds = math.isfinite(constant) and tail <= ENVELOPE_GROWTH * head + 1e-12
    logger.info(f"Growth envelope ({functional.value}) at p={p}: C={constant:.4g}, holds={holds}")
    return EnvelopeReport(
        p=p,
        functional=functional,
        log_power=power,
        radii=tuple(float(v) for v in r),
        values=tuple(float(v) for v in values),
        constant=constant,
        head_ratio=head,
        tail_ratio=tail,
        holds=holds,
    )
