"""Constructing balayages: circle sweeps and moment-matching synthesis."""
import logging
import math

import numpy as np

from src.errors import InvalidInputError
from src.schema.construct import (
    MomentProblem,
    PotentialSpec,
    Regularization,
    SolveResult,
    SolveStatus,
    SweepRule,
    SweepSpec,
)
from src.schema.measure import AtomicMeasure
from src.services.nnls import nnls_active_set

logger = logging.getLogger(__name__)

RIDGE = 1e-12


def sweep_nodes(spec: SweepSpec) -> np.ndarray:
    """Equispaced nodes c + R·exp(2πij/m), j = 0..m−1"""
    theta = 2 * np.pi * np.arange(spec.arcs) / spec.arcs
    return spec.center.z + spec.radius * np.exp(1j * theta)


def _nodal_masses(a: complex, theta: np.ndarray) -> np.ndarray:
    """Poisson kernel of the unit disk at a, sampled on the nodes and normalized"""
    kernel = (1 - abs(a) ** 2) / np.abs(np.exp(1j * theta) - a) ** 2
    return kernel / math.fsum(kernel)


def _arc_masses(a: complex, theta: np.ndarray, width: float) -> np.ndarray:
    """Harmonic measure at a of the arcs [θ_j − h/2, θ_j + h/2].

    Closed form of the Poisson integral: (2γ_j − h)/(2π), where γ_j is the angle under
    which the arc is seen from a.
    """
    start = np.exp(1j * (theta - width / 2))
    end = np.exp(1j * (theta + width / 2))
    gamma = np.angle((end - a) / (start - a))
    return (2 * gamma - width) / (2 * np.pi)


def poisson_sweep(delta: AtomicMeasure, spec: SweepSpec) -> AtomicMeasure:
    """Sweep δ onto the circle ∂D(c, R) through the Poisson kernel.

    Each atom is swept separately and the node masses are accumulated in atom order,
    so the result is linear in δ atom by atom.

    Raises:
        InvalidInputError: an atom lies on or outside the circle
    """
    c = spec.center.z
    relative = (delta.locations - c) / spec.radius
    if relative.size and np.any(np.abs(relative) >= 1):
        worst = float(np.max(np.abs(relative)))
        raise InvalidInputError(
            f"every atom must lie strictly inside the circle; found |a-c|/R = {worst}"
        )
    theta = 2 * np.pi * np.arange(spec.arcs) / spec.arcs
    width = 2 * np.pi / spec.arcs
    total = np.zeros(spec.arcs)
    for a, mass in zip(relative, delta.masses):
        if spec.rule == SweepRule.NODAL:
            total += mass * _nodal_masses(complex(a), theta)
        else:
            total += mass * _arc_masses(complex(a), theta, width)
    logger.info(
        f"Swept {len(delta.atoms)} atoms onto |z-{c}|={spec.radius} with {spec.arcs} {spec.rule.value} nodes"
    )
    return AtomicMeasure.from_arrays(sweep_nodes(spec), total)


def moment_system(locations: np.ndarray, degree: int) -> np.ndarray:
    """Real constraint rows: Re z^k for k = 0..d, Im z^k for k = 1..d (2d+1 rows)"""
    powers = locations[None, :] ** np.arange(degree + 1)[:, None]
    return np.vstack([powers.real, powers[1:].imag])


def solve_moment_balayage(prob: MomentProblem, tol: float = 1e-9) -> SolveResult:
    """Nonnegative masses on the candidates that reproduce δ's moments up to ⌊p⌋.

    Feasible when ||Ax − b||₂ ≤ tol·(1 + ||b||₂).

    Raises:
        SolverStalledError: the active-set solver hit its iteration cap
    """
    degree = math.floor(prob.degree_bound)
    candidates = np.array([p.z for p in prob.candidates], dtype=complex)
    A = moment_system(candidates, degree)
    b = moment_system(prob.source.locations, degree) @ prob.source.masses if prob.source.atoms \
        else np.zeros(A.shape[0])
    if candidates.size < A.shape[0]:
        logger.warning(
            f"Only {candidates.size} candidates for {A.shape[0]} moment constraints; "
            f"the system is likely infeasible"
        )
    ridge = RIDGE if prob.regularization == Regularization.MIN_TOTAL_VARIATION else 0.0
    solution = nnls_active_set(A, b, ridge=ridge)
    bound = tol * (1 + float(np.linalg.norm(b)))
    feasible = solution.residual <= bound
    measure = AtomicMeasure.from_arrays(candidates, solution.x) if feasible else None
    logger.info(
        f"Moment synthesis at degree {degree}: residual {solution.residual:.3e} "
        f"({'feasible' if feasible else 'infeasible'}), {solution.iterations} iterations"
    )
    return SolveResult(
        status=SolveStatus.FEASIBLE if feasible else SolveStatus.INFEASIBLE,
        measure=measure,
        residual=solution.residual,
        iterations=solution.iterations,
        active_set_size=solution.active_set_size,
        constraints=int(A.shape[0]),
        tolerance=tol,
    )


def discretize_potential_pair(v_spec: PotentialSpec, d_spec: PotentialSpec) -> tuple[AtomicMeasure, AtomicMeasure]:
    """Riesz measures (ω, δ) of v = pt_ω + Re P_v and d = pt_δ + Re P_d.

    A harmonic part shared by v and d drops out: v − h_d and d − h_d have the same Riesz
    measures. Different harmonic parts cannot satisfy v − d → 0 at ∞, which is logged.
    """
    if v_spec.harmonic_part != d_spec.harmonic_part:
        logger.warning("v and d have different harmonic parts; v − d cannot decay at infinity")
    return v_spec.measure, d_spec.measure
