"""Signal-to-noise ratios and the prediction-quality (PQ) score."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from karma.core import ParameterError

SNR_CAP = 1e12


@dataclass(frozen=True)
class PredictionReport:
    snr_measured: np.ndarray
    snr_horizon: np.ndarray
    pq: np.ndarray
    pq_norm: float
    sigma_pred: np.ndarray  # ny x K predicted error variances
    K: int
    Ny: int
    predictions: np.ndarray | None = None  # K x ny, restored to data scale
    flags: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "snr_measured": self.snr_measured.tolist(),
            "snr_horizon": self.snr_horizon.tolist(),
            "pq": self.pq.tolist(),
            "pq_norm": float(self.pq_norm),
            "sigma_pred": self.sigma_pred.tolist(),
            "K": self.K,
            "Ny": self.Ny,
            "flags": list(self.flags),
        }


def _ratio(num: float, den: float, label: str, flags: list[str]) -> float:
    if den <= 0.0:
        flags.append(f"{label}: zero denominator, capped at {SNR_CAP:g}")
        return SNR_CAP if num > 0.0 else 1.0
    if num <= 0.0:
        flags.append(f"{label}: zero numerator, floored at {1 / SNR_CAP:g}")
        return 1.0 / SNR_CAP
    return min(num / den, SNR_CAP)


def compute_snr(measured, one_step_error_var: float, horizon_true, horizon_pred, flags: list[str] | None = None) -> tuple[float, float]:
    """Measured SNR = var(y) / sigma_1^2; horizon SNR = var(y_K) / var(y_K - y_hat_K).

    Variances are population variances. Degenerate ratios are capped and
    recorded in ``flags`` instead of raising.
    """
    flags = [] if flags is None else flags
    measured = np.asarray(measured, dtype=float)
    ht = np.asarray(horizon_true, dtype=float)
    hp = np.asarray(horizon_pred, dtype=float)
    if ht.shape != hp.shape:
        raise ParameterError("horizon truth and prediction differ in length")
    snr = _ratio(float(np.var(measured)), float(one_step_error_var), "SNR", flags)
    snr_k = _ratio(float(np.var(ht)), float(np.var(ht - hp)), "SNR_K", flags)
    return snr, snr_k


def compute_pq(sigma_pred, lambda_e: float, snr_measured: float, snr_horizon: float) -> float:
    """PQ = 100 / (1 + sqrt(sum_k sigma_k^2) / (lambda_e sqrt(SNR) sqrt(SNR_K))), in percent."""
    if not lambda_e > 0:
        raise ParameterError(f"lambda_e must be positive, got {lambda_e}")
    if not (snr_measured > 0 and snr_horizon > 0):
        raise ParameterError("SNRs must be positive")
    total = float(np.sum(sigma_pred))
    ratio = np.sqrt(max(total, 0.0)) / (lambda_e * np.sqrt(snr_measured) * np.sqrt(snr_horizon))
    return 100.0 / (1.0 + ratio)


def pq_norm(pq) -> float:
    return float(np.linalg.norm(np.asarray(pq, dtype=float)))


def build_report(
    measured,
    horizon_true,
    horizon_pred,
    sigma_pred,
    lambda_e,
    predictions=None,
) -> PredictionReport:
    """Score a K-step horizon prediction for every channel.

    ``measured`` is Ny x ny (stochastic part of the training data),
    ``horizon_true``/``horizon_pred`` are K x ny, ``sigma_pred`` is K x ny.
    """
    measured = np.atleast_2d(np.asarray(measured, dtype=float))
    ht = np.asarray(horizon_true, dtype=float)
    hp = np.asarray(horizon_pred, dtype=float)
    sig = np.asarray(sigma_pred, dtype=float)
    K, ny = ht.shape
    flags: list[str] = []
    snr = np.zeros(ny)
    snr_k = np.zeros(ny)
    pq = np.zeros(ny)
    for j in range(ny):
        local: list[str] = []
        snr[j], snr_k[j] = compute_snr(measured[:, j], sig[0, j], ht[:, j], hp[:, j], local)
        flags.extend(f"channel {j}: {msg}" for msg in local)
        pq[j] = compute_pq(sig[:, j], lambda_e[j], snr[j], snr_k[j])
    return PredictionReport(snr, snr_k, pq, pq_norm(pq), sig.T.copy(), K, measured.shape[0], predictions, tuple(flags))
