"""Balayage tests for mon_p / lnmon_p and the kernel, Fubini and transfer checks."""
import logging
import math
from typing import Iterable, Optional

import numpy as np

from src.errors import InvalidInputError
from src.schema.base import Point
from src.schema.kernel import ExtendedReal, GridSpec, KernelSpec, PotentialField, to_extended
from src.schema.measure import AtomicMeasure, SignedMeasure, TailWeight
from src.schema.polynomial import FunctionClass, FunctionClassKind
from src.schema.report import (
    BalayageReport,
    DoubleSumReport,
    KernelIdentityReport,
    MomentVector,
    Preconditions,
    SingularMassReport,
    TransferReport,
    Verdict,
    Witness,
)
from src.schema.subharmonic import TestFunction
from src.services.measure_core import weighted_tail
from src.services.potential_kernel import (
    evaluate_test_function,
    potential_parts,
    potential_values,
    wh_kernel_matrix,
)

logger = logging.getLogger(__name__)

FUBINI_RTOL = 1e-12
INNER_SAMPLE_RADIUS = 0.45
OUTER_SAMPLE_RADII = (2.0, 10.0)


def _require_mass(delta: AtomicMeasure, omega: AtomicMeasure) -> None:
    if delta.total_mass <= 0 or omega.total_mass <= 0:
        raise InvalidInputError("both measures must have positive total mass")


def _degree(p: float, truncation: Optional[int]) -> int:
    if math.isinf(p):
        if truncation is None:
            raise InvalidInputError("p = ∞ needs an explicit truncation degree")
        logger.warning(f"Degree bound ∞ truncated at {truncation}; balayage certified only up to that degree")
        return truncation
    if p < 0:
        raise InvalidInputError(f"degree bound must be nonnegative, got {p}")
    return math.floor(p)


def _signed_moment_terms(locations: np.ndarray, masses: np.ndarray, k: int) -> tuple[float, float]:
    values = masses * locations ** k
    return math.fsum(values.real), math.fsum(values.imag)


def moments(m: AtomicMeasure, d: int) -> MomentVector:
    """Complex moments ∫ z^k dm for k = 0..d, each an exactly rounded finite sum"""
    if d < 0:
        raise InvalidInputError(f"moment degree must be nonnegative, got {d}")
    locs, masses = m.locations, m.masses
    values = []
    for k in range(d + 1):
        re, im = _signed_moment_terms(locs, masses, k) if locs.size else (0.0, 0.0)
        values.append(Point(re=re, im=im))
    return MomentVector(degree=d, values=tuple(values))


def charge_moments(nu: SignedMeasure, d: int) -> np.ndarray:
    """Moments of ω − δ computed from one combined sum per k"""
    locs, masses = nu.signed_arrays()
    out = np.zeros(d + 1, dtype=complex)
    if locs.size == 0:
        return out
    for k in range(d + 1):
        re, im = _signed_moment_terms(locs, masses, k)
        out[k] = complex(re, im)
    return out


def check_mon_balayage(
    delta: AtomicMeasure,
    omega: AtomicMeasure,
    p: float,
    tol: float = 1e-9,
    truncation: Optional[int] = None,
) -> BalayageReport:
    """Is ω a mon_p-balayage of δ? Equal moments ∫ z^k for 0 ≤ k ≤ ⌊p⌋.

    A moment passes when |m_k(δ) − m_k(ω)| ≤ tol·(1 + |m_k(δ)|). For p < 1 only the
    masses are compared.

    Raises:
        InvalidInputError: a zero-mass measure, or p = ∞ without a truncation
    """
    _require_mass(delta, omega)
    degree = _degree(p, truncation)
    md = moments(delta, degree).array
    residuals = np.abs(charge_moments(SignedMeasure.from_difference(omega, delta), degree))
    passed = bool(np.all(residuals <= tol * (1 + np.abs(md))))
    notes = []
    if degree == 0:
        notes.append("p < 1: only total masses are compared")
    report = BalayageReport(
        function_class=FunctionClass(kind=FunctionClassKind.MON, degree_bound=p),
        p=p,
        verdict=Verdict.YES if passed else Verdict.NO,
        tolerance=tol,
        residuals=tuple(float(r) for r in residuals),
        truncation=truncation if math.isinf(p) else None,
        notes=tuple(notes),
    )
    logger.info(f"mon balayage at p={p}: {report.verdict.value}, max residual {report.max_residual:.3e}")
    return report


def default_grid_points(delta: AtomicMeasure, omega: AtomicMeasure, spec: GridSpec) -> np.ndarray:
    """Lattice over the (inflated) support box, far-field ray points, and every atom"""
    support = np.concatenate([delta.locations, omega.locations])
    if spec.rect is not None:
        x_min, x_max, y_min, y_max = spec.rect.x_min, spec.rect.x_max, spec.rect.y_min, spec.rect.y_max
        center = complex((x_min + x_max) / 2, (y_min + y_max) / 2)
    else:
        lo = complex(support.real.min(), support.imag.min())
        hi = complex(support.real.max(), support.imag.max())
        center = (lo + hi) / 2
        half_x = spec.inflate * (hi.real - lo.real) / 2 or 1.0
        half_y = spec.inflate * (hi.imag - lo.imag) / 2 or 1.0
        x_min, x_max = center.real - half_x, center.real + half_x
        y_min, y_max = center.imag - half_y, center.imag + half_y
    xs = np.linspace(x_min, x_max, spec.resolution)
    ys = np.linspace(y_min, y_max, spec.resolution)
    lattice = (xs[None, :] + 1j * ys[:, None]).ravel()

    parts = [lattice]
    if spec.far_rays and spec.far_radii:
        extent = max(float(np.max(np.abs(support - center))), 1.0)
        radii = extent * np.geomspace(2.0, 200.0, spec.far_radii)
        angles = 2 * np.pi * (np.arange(spec.far_rays) + 0.5) / spec.far_rays
        parts.append(center + (radii[:, None] * np.exp(1j * angles)[None, :]).ravel())
    parts.append(support)
    return np.concatenate(parts)


def _near_field_radii(locations: np.ndarray, factor: float) -> tuple[np.ndarray, np.ndarray]:
    """Distinct atoms and factor × each one's nearest-neighbour distance (none for fewer than 2)"""
    distinct = np.unique(locations)
    if distinct.size < 2 or factor == 0:
        return distinct[:0], np.empty(0)
    dist = np.abs(distinct[:, None] - distinct[None, :])
    np.fill_diagonal(dist, np.inf)
    return distinct, factor * dist.min(axis=1)


def _near_field_mask(points: np.ndarray, centers: np.ndarray, radii: np.ndarray, chunk: int = 2048) -> np.ndarray:
    out = np.zeros(points.size, dtype=bool)
    if centers.size == 0:
        return out
    for start in range(0, points.size, chunk):
        block = points[start:start + chunk]
        out[start:start + chunk] = np.any(np.abs(block[:, None] - centers[None, :]) < radii[None, :], axis=1)
    return out


def check_lnmon_balayage(
    delta: AtomicMeasure,
    omega: AtomicMeasure,
    p: float,
    grid: Optional[GridSpec] = None,
    tol: float = 1e-9,
    truncation: Optional[int] = None,
) -> BalayageReport:
    """Is ω an lnmon_p-balayage of δ? The mon_p test plus pt_ω ≥ pt_δ − tol on a grid.

    −∞ on the δ side always satisfies the inequality. Each atom of ω excludes a disk of
    near_field_factor times its own nearest-neighbour distance, and points where only
    pt_ω is −∞ are counted but do not decide the verdict. Undefined margins make the
    verdict inconclusive unless something else failed. So does a check that leaves no
    point or excludes more than max_skipped_fraction of the lattice.
    """
    grid = grid or GridSpec()
    mon = check_mon_balayage(delta, omega, p, tol, truncation)
    degree = _degree(p, truncation)

    weight = TailWeight(power=degree)
    delta_tail = weighted_tail(delta, 1.0, math.inf, weight)
    omega_tail = weighted_tail(omega, 1.0, math.inf, weight)
    preconditions = Preconditions(
        tail_weight=weight.label,
        tail_value=max(delta_tail, omega_tail),
        delta_tail=delta_tail,
        omega_tail=omega_tail,
    )

    points = default_grid_points(delta, omega, grid)
    lattice = np.arange(points.size) < grid.resolution ** 2
    pt_delta = potential_values(delta, points)
    pt_omega = potential_values(omega, points)

    centers, radii = _near_field_radii(omega.locations, grid.near_field_factor)
    near = _near_field_mask(points, centers, radii)

    delta_singular = np.isneginf(pt_delta)
    omega_singular = np.isneginf(pt_omega) & ~delta_singular
    with np.errstate(invalid="ignore"):
        margin = pt_omega - pt_delta
    undefined = np.isnan(margin) & ~delta_singular
    active = ~near & ~delta_singular & ~omega_singular & ~undefined

    violations = int(np.count_nonzero(active & (margin < -tol)))
    witness = None
    if np.any(active):
        idx = int(np.argmin(np.where(active, margin, np.inf)))
        witness = Witness(re=float(points[idx].real), im=float(points[idx].imag), margin=float(margin[idx]))

    notes = list(mon.notes)
    skipped = int(np.count_nonzero(near & ~delta_singular))
    skipped_fraction = float(np.count_nonzero(near & lattice)) / grid.resolution ** 2
    if skipped:
        logger.warning(f"Skipped {skipped} grid points near ω's atoms (largest radius {radii.max():.3e})")
        notes.append(
            f"near-field radius {grid.near_field_factor:g} × nearest-neighbour distance per atom "
            f"(largest {radii.max():.3e}, {skipped_fraction:.1%} of the lattice)"
        )
    if np.any(omega_singular & ~near):
        notes.append("pt_ω = −∞ at points where pt_δ is finite (reported, not failed)")

    checked = int(np.count_nonzero(active))
    if mon.verdict == Verdict.NO or violations:
        verdict = Verdict.NO
    elif np.any(undefined & ~near):
        verdict = Verdict.INCONCLUSIVE
    elif checked == 0:
        verdict = Verdict.INCONCLUSIVE
        notes.append("no grid point was checked")
    elif skipped_fraction > grid.max_skipped_fraction:
        verdict = Verdict.INCONCLUSIVE
        notes.append(f"near-field exclusion covers {skipped_fraction:.1%} of the lattice")
    else:
        verdict = Verdict.YES

    report = BalayageReport(
        function_class=FunctionClass(kind=FunctionClassKind.LNMON, degree_bound=p),
        p=p,
        verdict=verdict,
        tolerance=tol,
        residuals=mon.residuals,
        worst_witness=witness,
        preconditions=preconditions,
        truncation=mon.truncation,
        points_checked=checked,
        near_field_skipped=skipped,
        omega_singular_points=int(np.count_nonzero(omega_singular)),
        inconclusive_points=int(np.count_nonzero(undefined & ~near)),
        notes=tuple(notes),
    )
    logger.info(
        f"lnmon balayage at p={p}: {verdict.value}, {report.points_checked} points, "
        f"worst margin {witness.margin if witness else float('nan'):.3e}"
    )
    return report


def default_sample_points() -> np.ndarray:
    """64 sample points: 32 inside the unit disk, 16 on |w| = 2, 16 on |w| = 10"""
    inner = INNER_SAMPLE_RADIUS * np.exp(2j * np.pi * (np.arange(32) + 0.5) / 32)
    outer = [r * np.exp(2j * np.pi * (np.arange(16) + 0.25) / 16) for r in OUTER_SAMPLE_RADII]
    return np.concatenate([inner, *outer])


def check_kernel_identity(
    delta: AtomicMeasure,
    omega: AtomicMeasure,
    p: float,
    w_list: Optional[Iterable[complex]] = None,
    split_radius: float = 1.0,
    tol: float = 1e-9,
) -> KernelIdentityReport:
    """Compare ∫ k_⌊p⌋(w, z) d(ω − δ)(z) with pt_{ω−δ}(w) on sample points.

    Sample points where either potential is infinite (outside Dom pt_{ω−δ} or on an atom) are
    skipped and listed.
    """
    genus = math.floor(p)
    samples = np.atleast_1d(np.asarray(list(w_list) if w_list is not None else default_sample_points(), dtype=complex))
    charge = SignedMeasure.from_difference(omega, delta)
    notes = []
    if check_mon_balayage(delta, omega, p, tol).verdict != Verdict.YES:
        notes.append(f"ω is not a mon_{p:g}-balayage of δ; the identity is not expected to hold")

    pt_plus, pt_minus, pt_total = potential_parts(PotentialField.of(charge), samples)
    finite = np.isfinite(pt_plus) & np.isfinite(pt_minus)
    locs, masses = charge.signed_arrays()
    kernel = wh_kernel_matrix(KernelSpec(genus=genus, split_radius=split_radius), samples[finite], locs)
    integral = kernel @ masses if locs.size else np.zeros(int(np.count_nonzero(finite)))
    deviation = np.abs(integral - pt_total[finite])
    max_deviation = float(np.max(deviation)) if deviation.size else 0.0

    skipped = tuple(Point.of(w) for w in samples[~finite])
    if skipped:
        notes.append(f"{len(skipped)} sample points outside Dom pt_(ω−δ) or on an atom were skipped")
    return KernelIdentityReport(
        p=p,
        genus=genus,
        split_radius=split_radius,
        samples_checked=int(np.count_nonzero(finite)),
        skipped=skipped,
        max_deviation=max_deviation,
        tolerance=tol,
        holds=max_deviation <= tol,
        notes=tuple(notes),
    )


def double_kernel_sum(
    mu: AtomicMeasure,
    nu: SignedMeasure,
    genus: int,
    split_radius: float = 1.0,
) -> DoubleSumReport:
    """Σ_w Σ_z k_q(w, z) μ(w) ν(z) summed rows-first and columns-first.

    Both orders use exactly rounded inner and outer sums; their gap is reported
    relative to Σ |k_q μ ν|.
    """
    locs, masses = nu.signed_arrays()
    if mu.is_empty or locs.size == 0:
        return DoubleSumReport(genus=genus, rows_first=0.0, columns_first=0.0, scale=0.0, relative_gap=0.0, agrees=True)
    kernel = wh_kernel_matrix(KernelSpec(genus=genus, split_radius=split_radius), mu.locations, locs)
    weighted = kernel * mu.masses[:, None] * masses[None, :]
    if not np.all(np.isfinite(weighted)):
        with np.errstate(invalid="ignore"):
            total = float(np.sum(weighted))
        value = to_extended(total)
        return DoubleSumReport(genus=genus, rows_first=value, columns_first=value, scale=math.inf, relative_gap=0.0, agrees=True)
    rows_first = math.fsum(math.fsum(row) for row in weighted)
    columns_first = math.fsum(math.fsum(col) for col in weighted.T)
    scale = math.fsum(np.abs(weighted).ravel())
    gap = abs(rows_first - columns_first) / scale if scale > 0 else 0.0
    return DoubleSumReport(
        genus=genus,
        rows_first=rows_first,
        columns_first=columns_first,
        scale=scale,
        relative_gap=gap,
        agrees=gap <= FUBINI_RTOL,
    )


def _integral(u_values: np.ndarray, masses: np.ndarray) -> float:
    if np.any(np.isneginf(u_values)):
        return -math.inf
    return math.fsum(masses * u_values)


def check_subharmonic_transfer(
    delta: AtomicMeasure,
    omega: AtomicMeasure,
    p: float,
    u: TestFunction,
    tol: float = 1e-6,
    grid: Optional[GridSpec] = None,
) -> TransferReport:
    """Check ∫ u dδ ≤ ∫ u dω + tol for an explicit u = pt_μ + Re P (or its kernel form).

    Also sums Σ_μ Σ_{ω−δ} k_⌊p⌋ in both orders. A −∞ integral on the δ side satisfies the
    inequality; on the ω side alone it is reported and the verdict is inconclusive.
    The lnmon_p precondition on (δ, ω) is checked on `grid` and recorded, not enforced.

    Raises:
        InvalidInputError: zero-mass input, p = ∞, or u outside the admissible shape
    """
    _require_mass(delta, omega)
    if math.isinf(p):
        raise InvalidInputError("subharmonic transfer needs a finite degree bound")
    genus = math.floor(p)
    if u.polynomial.degree is not None and u.polynomial.degree > genus:
        raise InvalidInputError(f"deg P = {u.polynomial.degree} exceeds ⌊p⌋ = {genus}")
    if u.genus is not None and u.genus > genus:
        raise InvalidInputError(f"kernel genus {u.genus} exceeds ⌊p⌋ = {genus}")

    delta_integral = _integral(evaluate_test_function(u, delta.locations), delta.masses)
    omega_integral = _integral(evaluate_test_function(u, omega.locations), omega.masses)
    delta_singular = math.isinf(delta_integral)
    omega_singular = math.isinf(omega_integral)

    notes = []
    precondition = check_lnmon_balayage(delta, omega, p, grid, tol).verdict
    if precondition != Verdict.YES:
        notes.append(f"ω is not an lnmon_{p:g}-balayage of δ ({precondition.value}); the inequality is not guaranteed")

    if delta_singular:
        verdict = Verdict.YES
        notes.append("u = −∞ at an atom of δ; the inequality holds trivially")
    elif omega_singular:
        verdict = Verdict.INCONCLUSIVE
        notes.append("u = −∞ at an atom of ω while ∫ u dδ is finite (reported, not failed)")
    else:
        verdict = Verdict.YES if delta_integral <= omega_integral + tol else Verdict.NO

    margin: ExtendedReal
    if delta_singular and omega_singular:
        margin = to_extended(math.nan)
    else:
        margin = to_extended(omega_integral - delta_integral)

    fubini = None
    if not u.mu.is_empty:
        fubini = double_kernel_sum(u.mu, SignedMeasure.from_difference(omega, delta), genus, u.split_radius)
        if not fubini.agrees:
            notes.append(f"repeated sums disagree: relative gap {fubini.relative_gap:.3e}")

    logger.info(f"Subharmonic transfer at p={p}: {verdict.value}")
    return TransferReport(
        p=p,
        verdict=verdict,
        delta_integral=to_extended(delta_integral),
        omega_integral=to_extended(omega_integral),
        margin=margin,
        tolerance=tol,
        holds=verdict == Verdict.YES,
        delta_singular=delta_singular,
        omega_singular=omega_singular,
        lnmon_precondition=precondition,
        fubini=fubini,
        notes=tuple(notes),
    )


def no_mass_at_singular_points(omega: AtomicMeasure, points: Iterable[complex]) -> SingularMassReport:
    """Count atoms of ω sitting exactly on the given −∞ points of a test potential"""
    targets = {complex(z) for z in points}
    hit = [a for a in omega.atoms if a.location in targets]
    mass = math.fsum(a.mass for a in hit)
    if hit:
        logger.warning(f"{len(hit)} atoms of ω carry mass {mass:.3e} at −∞ points")
    return SingularMassReport(points_checked=len(targets), atoms_hit=len(hit), mass_on_points=mass, clean=not hit)
