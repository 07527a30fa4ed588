"""Logarithmic and Weierstrass–Hadamard kernels, potentials, circle and disk averages."""
import logging
import math
from typing import Callable, Optional, Union

import numpy as np

from src.common import chunked, parallel_map
from src.errors import InvalidInputError, SingularSampleError
from src.schema.kernel import (
    ExtendedReal,
    GridRect,
    GridRow,
    KernelSpec,
    PotentialField,
    Signal,
    to_extended,
)
from src.schema.measure import AtomicMeasure
from src.schema.report import KernelBoundReport
from src.schema.subharmonic import TestFunction
from src.services.poly_classes import circle_points

logger = logging.getLogger(__name__)

RealFunction = Callable[[np.ndarray], np.ndarray]

MAX_SINGULAR_RETRIES = 3
FALLBACK_SAMPLES = 4096
ON_CIRCLE_RTOL = 1e-12
GRID_CHUNK = 2048
LOG1P_RADIUS = 0.5


def _as_array(z: Union[complex, np.ndarray]) -> np.ndarray:
    return np.atleast_1d(np.asarray(z, dtype=complex))


def log_abs_diff(w: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Matrix ln|w_i − z_j| with −inf on coincidences"""
    with np.errstate(divide="ignore"):
        return np.log(np.abs(w[:, None] - z[None, :]))


def log_abs_one_minus(u: np.ndarray) -> np.ndarray:
    """ln|1 − u|: ½·log1p(|u|² − 2 Re u) for |u| < ½, ln|1 − u| directly elsewhere.

    The log1p argument stays above −¾. −inf only for u == 1.
    """
    small = np.abs(u) < LOG1P_RADIUS
    with np.errstate(divide="ignore", invalid="ignore"):
        series = 0.5 * np.log1p(np.where(small, np.abs(u) ** 2 - 2 * u.real, 0.0))
        direct = np.log(np.abs(1 - u))
    return np.where(small, series, direct)


def log_kernel(z: complex, w: complex) -> ExtendedReal:
    """ln|w − z|, or the −∞ signal when z = w"""
    if complex(z) == complex(w):
        return Signal.MINUS_INFINITY
    return math.log(abs(complex(w) - complex(z)))


def wh_kernel_matrix(spec: KernelSpec, w: np.ndarray, z: np.ndarray) -> np.ndarray:
    """k_q(w_i, z_j) as a matrix; −inf exactly on coincidences.

    ln|w − z| for |w| < r0, else ln|1 − z/w| + Σ_{k=1}^q Re (z/w)^k / k.
    """
    w = _as_array(w)
    z = _as_array(z)
    out = np.empty((w.size, z.size), dtype=float)
    inner = np.abs(w) < spec.split_radius
    if np.any(inner):
        out[inner] = log_abs_diff(w[inner], z)
    outer = ~inner
    if np.any(outer):
        u = z[None, :] / w[outer][:, None]
        values = log_abs_one_minus(u)
        power = np.ones_like(u)
        for k in range(1, spec.genus + 1):
            power = power * u
            values = values + power.real / k
        # z == w must stay exactly −inf whatever the polynomial part adds
        values[z[None, :] == w[outer][:, None]] = -np.inf
        out[outer] = values
    return out


def wh_kernel(spec: KernelSpec, w: complex, z: complex) -> ExtendedReal:
    """Scalar Weierstrass–Hadamard kernel k_q(w, z)"""
    return to_extended(float(wh_kernel_matrix(spec, _as_array(w), _as_array(z))[0, 0]))


def wh_kernel_bound_matrix(q: int, w: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Shape K_q(w, z) of the classical kernel estimate, without its constant"""
    w = _as_array(w)
    z = _as_array(z)
    aw = np.abs(w)[:, None]
    az = np.abs(z)[None, :]
    ratio = np.divide(az, aw, out=np.zeros(np.broadcast(aw, az).shape), where=aw > 0)
    if q == 0:
        outer = np.log1p(ratio)
    else:
        outer = ratio ** q * np.minimum(1.0, ratio)
    inner = np.broadcast_to(np.log1p(az), outer.shape)
    return np.where(aw < 1, inner, outer)


def wh_kernel_bound(q: int, w: complex, z: complex) -> float:
    if q < 0:
        raise InvalidInputError(f"genus must be nonnegative, got {q}")
    return float(wh_kernel_bound_matrix(q, _as_array(w), _as_array(z))[0, 0])


def kernel_bound_constant(q: int, n_w: int = 100, n_z: int = 100, extent: float = 10.0) -> KernelBoundReport:
    """Empirical constant C with k_q ≤ C·K_q on an n_w × n_z grid of (w, z) pairs.

    w runs over a polar lattice in D̄(extent) that straddles |w| = 1; z over another one
    that includes the origin. The diagonal is excluded.
    """
    def polar(n: int, r_min: float, shift: float) -> np.ndarray:
        side = max(int(round(math.sqrt(n))), 1)
        radii = np.linspace(r_min, extent, side)
        angles = 2 * np.pi * (np.arange(side) + shift) / side
        return (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()[:n]

    w = polar(n_w, 0.5, 0.5)
    z = polar(n_z, 0.0, 0.0)
    k = wh_kernel_matrix(KernelSpec(genus=q), w, z)
    bound = wh_kernel_bound_matrix(q, w, z)
    off_diagonal = np.isfinite(k)
    positive = off_diagonal & (bound > 1e-300)
    constant = float(np.max(k[positive] / bound[positive])) if np.any(positive) else 0.0
    zero = off_diagonal & ~positive
    zero_bound_max = float(np.max(k[zero])) if np.any(zero) else -math.inf
    constant = max(constant, 0.0)
    return KernelBoundReport(
        genus=q,
        constant=constant,
        pairs_checked=int(np.count_nonzero(off_diagonal)),
        zero_bound_max=zero_bound_max,
        holds=math.isfinite(constant) and zero_bound_max <= 1e-12,
    )


def _part_potential(locations: np.ndarray, masses: np.ndarray, points: np.ndarray) -> np.ndarray:
    if locations.size == 0:
        return np.zeros(points.size)
    return log_abs_diff(points, locations) @ masses


def potential_parts(field: PotentialField, points: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """pt_{ν⁺}, pt_{ν⁻} and pt_ν at many points, chunked across workers.

    pt_ν is −inf where only pt_{ν⁺} is −inf, +inf where only pt_{ν⁻} is −inf, and nan
    where both are (outside Dom pt_ν).
    """
    points = _as_array(points)
    plus = field.measure.plus
    minus = field.measure.minus
    p_loc, p_mass = plus.locations, plus.masses
    m_loc, m_mass = minus.locations, minus.masses

    def work(chunk: list[int]) -> tuple[np.ndarray, np.ndarray]:
        pts = points[chunk]
        return _part_potential(p_loc, p_mass, pts), _part_potential(m_loc, m_mass, pts)

    chunks = chunked(range(points.size), GRID_CHUNK)
    results = parallel_map(work, chunks) if chunks else []
    pt_plus = np.concatenate([r[0] for r in results]) if results else np.zeros(0)
    pt_minus = np.concatenate([r[1] for r in results]) if results else np.zeros(0)
    with np.errstate(invalid="ignore"):
        total = pt_plus - pt_minus
    both = np.isneginf(pt_plus) & np.isneginf(pt_minus)
    total[both] = np.nan
    return pt_plus, pt_minus, total


def potential_values(m: AtomicMeasure, points: np.ndarray) -> np.ndarray:
    """pt_m at many points for a positive measure (−inf at its atoms)"""
    return potential_parts(PotentialField.of(m), points)[2]


def potential(field: PotentialField, z: complex) -> ExtendedReal:
    """pt_ν(z) with −∞ / +∞ / undefined signals"""
    return to_extended(float(potential_parts(field, _as_array(z))[2][0]))


def circle_average(
    f: RealFunction,
    center: complex,
    radius: float,
    n_samples: int = FALLBACK_SAMPLES,
    offset: float = 0.0,
) -> float:
    """Trapezoidal mean of f over ∂D(center, radius).

    Non-finite samples trigger a resample rotated by a fraction of the step, at most
    3 times.

    Raises:
        SingularSampleError: every rotation still hit a non-finite sample
    """
    if radius <= 0:
        raise InvalidInputError(f"radius must be positive, got {radius}")
    step = 2 * np.pi / n_samples
    shift = offset
    for attempt in range(MAX_SINGULAR_RETRIES + 1):
        values = np.asarray(f(circle_points(center, radius, n_samples, shift)), dtype=float)
        if np.all(np.isfinite(values)):
            return float(np.mean(values))
        logger.warning(
            f"Singular sample on circle |z-{complex(center)}|={radius} (attempt {attempt + 1}), rotating nodes"
        )
        shift = shift + step / 2 ** (attempt + 1)
    raise SingularSampleError(
        f"circle average on |z-{complex(center)}|={radius} kept hitting singular samples"
    )


def disk_average(
    f: RealFunction,
    center: complex,
    radius: float,
    n_radial: int = 32,
    n_samples: int = 1024,
) -> float:
    """B_f(center, r) = (2/r²) ∫_0^r C_f(center, t) t dt with Gauss–Legendre in t"""
    if radius <= 0:
        raise InvalidInputError(f"radius must be positive, got {radius}")
    nodes, weights = np.polynomial.legendre.leggauss(n_radial)
    t = radius * (nodes + 1) / 2
    w = radius * weights / 2
    c = np.array([circle_average(f, center, float(ti), n_samples) for ti in t])
    return float(2.0 / radius ** 2 * np.sum(w * c * t))


def circle_average_potential(field: PotentialField, center: complex, radius: float) -> float:
    """C_{pt_ν}(center, r) = Σ ±mass · ln max(r, |a − center|) (closed form).

    Atoms on the circle switch to trapezoidal quadrature with 4096 nodes rotated by half
    a step.
    """
    if radius <= 0:
        raise InvalidInputError(f"radius must be positive, got {radius}")
    locs, masses = field.measure.signed_arrays()
    if locs.size == 0:
        return 0.0
    dist = np.abs(locs - complex(center))
    if np.any(np.abs(dist - radius) <= ON_CIRCLE_RTOL * radius):
        logger.warning(f"Atom on circle |z-{complex(center)}|={radius}, falling back to quadrature")
        return circle_average(
            lambda z: potential_parts(field, z)[2],
            center,
            radius,
            FALLBACK_SAMPLES,
            offset=np.pi / FALLBACK_SAMPLES,
        )
    return math.fsum(masses * np.log(np.maximum(radius, dist)))


def potential_grid(field: PotentialField, rect: GridRect, resolution: int) -> list[GridRow]:
    """Potential on a resolution × resolution lattice, row-major from (x_min, y_min)"""
    if resolution < 1:
        raise InvalidInputError(f"grid resolution must be positive, got {resolution}")
    xs = np.linspace(rect.x_min, rect.x_max, resolution)
    ys = np.linspace(rect.y_min, rect.y_max, resolution)
    points = (xs[None, :] + 1j * ys[:, None]).ravel()
    pt_plus, pt_minus, total = potential_parts(field, points)
    return [
        GridRow(re=float(z.real), im=float(z.imag), pt_plus=float(a), pt_minus=float(b), pt_total=float(c))
        for z, a, b, c in zip(points, pt_plus, pt_minus, total)
    ]


def evaluate_test_function(u: TestFunction, points: np.ndarray) -> np.ndarray:
    """u at many points; −inf at the atoms of μ"""
    points = _as_array(points)
    harmonic = np.real(u.polynomial(points)) if u.polynomial.root else np.zeros(points.size)
    if u.mu.is_empty:
        return harmonic
    if u.genus is None:
        return potential_values(u.mu, points) + harmonic
    kernel = wh_kernel_matrix(KernelSpec(genus=u.genus, split_radius=u.split_radius), u.mu.locations, points)
    return u.mu.masses @ kernel + harmonic
