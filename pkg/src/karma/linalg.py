"""SPD solves with jitter escalation."""

from __future__ import annotations

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from karma.core import NumericalError

MAX_JITTER_LEVEL = 3


def spd_solve(M: np.ndarray, rhs: np.ndarray, rel_jitter: float = 1e-10) -> tuple[np.ndarray, int]:
    """Solve M X = rhs for symmetric positive definite M.

    On a failed Cholesky factorization, adds rel_jitter * trace/n * I and retries,
    growing the jitter 10x per level up to three levels. Returns the solution
    and the jitter level used (0 = none).
    """
    n = M.shape[0]
    if n == 0:
        return np.zeros_like(rhs), 0
    sym = 0.5 * (M + M.T)
    base = rel_jitter * max(np.trace(sym) / n, np.finfo(float).tiny)
    for level in range(MAX_JITTER_LEVEL + 1):
        jitter = 0.0 if level == 0 else base * 10.0 ** (level - 1)
        try:
            factor = cho_factor(sym + jitter * np.eye(n), lower=True, check_finite=False)
        except LinAlgError:
            continue
        sol = cho_solve(factor, rhs, check_finite=False)
        if np.all(np.isfinite(sol)):
            return sol, level
    raise NumericalError(f"matrix not positive definite after {MAX_JITTER_LEVEL} jitter levels")


def symmetrize(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.T)
