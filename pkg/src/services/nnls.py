"""Active-set nonnegative least squares (Lawson–Hanson) with deterministic pivoting."""
import logging
from typing import Optional

import numpy as np

from src.errors import InvalidInputError, SolverStalledError
from src.schema.base import BaseSchema

logger = logging.getLogger(__name__)


class NNLSResult(BaseSchema):
    x: tuple[float, ...]
    residual: float
    iterations: int
    active_set_size: int


def nnls_active_set(
    A: np.ndarray,
    b: np.ndarray,
    max_iter: Optional[int] = None,
    ridge: float = 0.0,
) -> NNLSResult:
    """Solve argmin ||Ax − b||₂ subject to x ≥ 0.

    The entering index is the largest positive gradient entry, ties going to the lowest
    index, so runs are reproducible. `ridge` > 0 appends √ridge·I rows to break
    degenerate optima. Every least-squares solve counts as one iteration.

    Args:
        A: (m, n) matrix
        b: length-m right-hand side
        max_iter: iteration cap; defaults to 10·n
        ridge: Tikhonov weight on x

    Returns:
        NNLSResult with the solution, residual ||Ax − b||₂ (without the ridge rows),
        iterations used and the size of the passive (positive) set

    Raises:
        SolverStalledError: the iteration cap was reached
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or b.ndim != 1:
        raise InvalidInputError("expected a matrix and a vector")
    if A.shape[0] != b.shape[0]:
        raise InvalidInputError(f"incompatible dimensions {A.shape} and {b.shape}")
    m, n = A.shape
    if n == 0:
        raise InvalidInputError("no unknowns")
    if ridge > 0:
        A_work = np.vstack([A, np.sqrt(ridge) * np.eye(n)])
        b_work = np.concatenate([b, np.zeros(n)])
    else:
        A_work, b_work = A, b
    max_iter = 10 * n if max_iter is None else max_iter
    grad_tol = 10 * max(m, n) * np.finfo(float).eps * max(np.linalg.norm(A_work, 1), 1.0)

    x = np.zeros(n)
    passive = np.zeros(n, dtype=bool)
    blocked = np.zeros(n, dtype=bool)
    iterations = 0

    def solve_passive() -> np.ndarray:
        s = np.zeros(n)
        cols = np.flatnonzero(passive)
        s[cols] = np.linalg.lstsq(A_work[:, cols], b_work, rcond=None)[0]
        return s

    w = A_work.T @ (b_work - A_work @ x)
    while True:
        eligible = ~passive & ~blocked & (w > grad_tol)
        if not np.any(eligible):
            break
        j = int(np.argmax(np.where(eligible, w, -np.inf)))
        passive[j] = True

        iterations += 1
        if iterations > max_iter:
            raise SolverStalledError(f"NNLS stalled after {max_iter} iterations", iterations=max_iter)
        s = solve_passive()
        if s[j] <= 0:
            # entering column cannot help at this step
            passive[j] = False
            blocked[j] = True
            continue

        while np.any(s[passive] <= 0):
            q = passive & (s <= 0)
            alpha = float(np.min(x[q] / (x[q] - s[q])))
            x = x + alpha * (s - x)
            passive &= x > 0
            x[~passive] = 0.0
            iterations += 1
            if iterations > max_iter:
                raise SolverStalledError(f"NNLS stalled after {max_iter} iterations", iterations=max_iter)
            s = solve_passive()

        x = s
        blocked[:] = False
        w = A_work.T @ (b_work - A_work @ x)

    residual = float(np.linalg.norm(A @ x - b))
    logger.debug(f"NNLS finished: {iterations} iterations, residual {residual:.3e}")
    return NNLSResult(
        x=tuple(float(v) for v in x),
        residual=residual,
        iterations=iterations,
        active_set_size=int(np.count_nonzero(passive)),
    )
