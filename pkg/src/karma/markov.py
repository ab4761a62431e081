"""Recursive Markov (generalized least squares) estimator.

Each update fuses a batch Y = Phi theta + V, cov(V) = Psi, with the previous
estimate treated as a noisy observation of theta whose covariance is P.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from karma.core import NumericalError, ParameterError, SchemaError
from karma.linalg import spd_solve, symmetrize


@dataclass(frozen=True)
class MarkovState:
    theta: np.ndarray
    P: np.ndarray
    jitter_level: int = 0


def markov_init(theta0, alpha: float) -> MarkovState:
    if not alpha > 0:
        raise ParameterError(f"alpha must be positive, got {alpha}")
    theta = np.array(theta0, dtype=float).ravel()
    return MarkovState(theta, alpha * np.eye(theta.size))


def markov_gain(P: np.ndarray, Phi: np.ndarray, Psi: np.ndarray) -> tuple[np.ndarray, int]:
    """Gamma = P Phi^T (Psi + Phi P Phi^T)^-1 via an SPD solve."""
    S = Psi + Phi @ P @ Phi.T
    # Gamma^T = S^-1 Phi P  (S and P symmetric)
    gamma_t, level = spd_solve(S, Phi @ P)
    return gamma_t.T, level


def markov_update(state: MarkovState, Phi, Y, Psi) -> MarkovState:
    """One batch update: theta += Gamma (Y - Phi theta), P = (I - Gamma Phi) P."""
    Phi = np.atleast_2d(np.asarray(Phi, dtype=float))
    Y = np.atleast_1d(np.asarray(Y, dtype=float))
    Psi = np.atleast_2d(np.asarray(Psi, dtype=float))
    n, ntheta = Phi.shape
    if ntheta != state.theta.size or Y.size != n or Psi.shape != (n, n):
        raise SchemaError(f"Phi {Phi.shape}, Y {Y.shape}, Psi {Psi.shape} inconsistent with theta of size {state.theta.size}")
    err = Y - Phi @ state.theta
    if n > ntheta:
        info = _information_update(state, Phi, err, Psi)
        if info is not None:
            return info
    gamma, level = markov_gain(state.P, Phi, Psi)
    theta = state.theta + gamma @ err
    P = symmetrize((np.eye(ntheta) - gamma @ Phi) @ state.P)
    return MarkovState(theta, P, level)


def _information_update(state: MarkovState, Phi, err, Psi) -> MarkovState | None:
    """Same update through (P^-1 + Phi^T Psi^-1 Phi)^-1, used when the batch is
    taller than theta. Forming Psi + Phi P Phi^T for a diffuse prior swamps Psi
    in roundoff; this form does not. Returns None if P or Psi will not factor."""
    P = state.P
    try:
        cP = cho_factor(P, lower=True)
        cPsi = cho_factor(Psi, lower=True)
    except LinAlgError:
        return None
    ntheta = P.shape[0]
    psi_inv_phi = cho_solve(cPsi, Phi)
    M = cho_solve(cP, np.eye(ntheta)) + Phi.T @ psi_inv_phi
    P_new, level = spd_solve(symmetrize(M), np.eye(ntheta))
    P_new = symmetrize(P_new)
    # Gamma = P_new Phi^T Psi^-1
    return MarkovState(state.theta + P_new @ (psi_inv_phi.T @ err), P_new, level)


def markov_accuracy(state: MarkovState) -> np.ndarray:
    """Information matrix P^-1."""
    P = state.P
    if P.size == 0:
        return P.copy()
    cond = np.linalg.cond(P)
    if not np.isfinite(cond) or cond >= 1e12:
        raise NumericalError(f"covariance is ill-conditioned (condition number {cond:.3g})")
    inv, _ = spd_solve(P, np.eye(P.shape[0]))
    return symmetrize(inv)


def markov_batch(Phi, Y, Psi) -> np.ndarray:
    """Direct estimate (Phi^T Psi^-1 Phi)^-1 Phi^T Psi^-1 Y."""
    Phi = np.atleast_2d(np.asarray(Phi, dtype=float))
    Psi_inv_Phi, _ = spd_solve(np.asarray(Psi, dtype=float), Phi)
    Psi_inv_Y, _ = spd_solve(np.asarray(Psi, dtype=float), np.asarray(Y, dtype=float))
    return np.linalg.solve(Phi.T @ Psi_inv_Phi, Phi.T @ Psi_inv_Y)
