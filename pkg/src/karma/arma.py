"""Scalar ARMA identification by minimum prediction error, innovations and forecasts.

The prediction-error engine here also serves the ARMAX fits (extra exogenous
regressors with a pure delay of at least one sample).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from karma.core import DataError, ParameterError, ShiftPolynomial
from karma.transfer import long_division

logger = logging.getLogger(__name__)

ROOT_MARGIN = 1e-6
MAX_ITER = 100
GRAD_TOL = 1e-8
MAX_HALVINGS = 30


@dataclass(frozen=True)
class ScalarArmaModel:
    """A(q^-1) y = C(q^-1) e with monic, stable and invertible A and C."""

    a: ShiftPolynomial
    c: ShiftPolynomial
    noise_variance: float
    converged: bool = True
    iterations: int = 0

    def __post_init__(self):
        if not (self.a.is_monic and self.c.is_monic):
            raise ParameterError("ARMA polynomials must be monic")
        if self.noise_variance < 0:
            raise ParameterError("noise variance must be >= 0")

    @property
    def na(self) -> int:
        return self.a.degree

    @property
    def nc(self) -> int:
        return self.c.degree

    @property
    def lambda_e(self) -> float:
        """Innovation standard deviation."""
        return float(np.sqrt(self.noise_variance))

    @classmethod
    def identity(cls, noise_variance: float = 0.0) -> "ScalarArmaModel":
        return cls(ShiftPolynomial.one(), ShiftPolynomial.one(), noise_variance)


@dataclass
class PemResult:
    """Raw output of :func:`fit_pem`; ``b`` rows exclude the zero constant term."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    sse: float
    converged: bool
    iterations: int
    sse_history: list[float] = field(default_factory=list)


def stabilize(poly: np.ndarray, margin: float = ROOT_MARGIN) -> np.ndarray:
    """Reflect roots on or outside the unit circle back inside it.

    ``poly`` is monic [1, p1, ..., pd]. Roots with modulus >= 1 - margin are
    moved to modulus min(1/|r|, 1 - margin) * (1 - margin), keeping the angle.
    """
    poly = np.asarray(poly, dtype=float)
    if poly.size <= 1:
        return poly.copy()
    roots = np.roots(poly).astype(complex)
    limit = 1.0 - margin
    mod = np.abs(roots)
    bad = mod >= limit
    if not bad.any():
        return poly.copy()
    new_mod = np.minimum(1.0 / mod[bad], limit) * limit
    roots[bad] = new_mod * np.exp(1j * np.angle(roots[bad]))
    out = np.real(np.poly(roots))
    return out


def is_stable(poly: np.ndarray, margin: float = ROOT_MARGIN) -> bool:
    poly = np.asarray(poly, dtype=float)
    if poly.size <= 1:
        return True
    return bool(np.all(np.abs(np.roots(poly)) < 1.0 - margin))


def _lagged(x: np.ndarray, lags: int) -> np.ndarray:
    """Columns x[t-1], ..., x[t-lags] with zero pre-sample values."""
    n = x.size
    out = np.zeros((n, lags))
    for k in range(1, lags + 1):
        out[k:, k - 1] = x[: n - k]
    return out


def _residuals(y, inputs, a, b, c) -> np.ndarray:
    e = lfilter(a, c, y)
    for i, u in enumerate(inputs):
        if b.shape[1]:
            e = e - lfilter(np.concatenate(([0.0], b[i])), c, u)
    return e


def _split(theta, na, nb, nin, nc):
    a = np.concatenate(([1.0], theta[:na]))
    b = theta[na : na + nb * nin].reshape(nin, nb)
    c = np.concatenate(([1.0], theta[na + nb * nin :]))
    return a, b, c


def _project(theta, na, nb, nin, nc):
    a, b, c = _split(theta, na, nb, nin, nc)
    a = stabilize(a)
    c = stabilize(c)
    return np.concatenate((a[1:], b.ravel(), c[1:]))


def _initial_estimate(y, inputs, na, nb, nc) -> np.ndarray:
    """Two-stage pseudolinear regression (long AR residuals stand in for e)."""
    n = y.size
    nin = len(inputs)
    if nc > 0:
        long_order = max(min(20, n // 10), na + nc, 1)
        cols = [-_lagged(y, long_order)] + [_lagged(u, max(nb, 1)) for u in inputs if nb]
        phi = np.hstack(cols)
        rows = slice(long_order, n)
        coef, *_ = np.linalg.lstsq(phi[rows], y[rows], rcond=None)
        ehat = y - phi @ coef
        ehat[:long_order] = 0.0
        start = long_order + nc
    else:
        ehat = np.zeros(n)
        start = max(na, nb)
    cols = [-_lagged(y, na)] + [_lagged(u, nb) for u in inputs] + [_lagged(ehat, nc)]
    phi = np.hstack(cols)
    start = min(start, n - 1)
    theta, *_ = np.linalg.lstsq(phi[start:], y[start:], rcond=None)
    return _project(theta, na, nb, nin, nc)


def fit_pem(y, inputs, na: int, nb: int, nc: int, max_iter: int = MAX_ITER) -> PemResult:
    """Minimize the one-step prediction-error sum of squares by damped Gauss-Newton.

    Model: A y = sum_i B_i u_i + C e, with B_i = b_i1 q^-1 + ... + b_i,nb q^-nb.
    Every accepted iterate is projected to stable, invertible A and C and
    strictly lowers the sum of squares.
    """
    y = np.asarray(y, dtype=float)
    inputs = [np.asarray(u, dtype=float) for u in inputs]
    nin = len(inputs)
    if nb == 0:
        nin_eff = 0
    else:
        nin_eff = nin
    ntheta = na + nb * nin_eff + nc
    n = y.size
    if n < 10 * (ntheta + 1):
        raise DataError(f"series of length {n} too short for {ntheta} parameters (need {10 * (ntheta + 1)})")
    if any(u.size != n for u in inputs):
        raise DataError("inputs must have the same length as the output")
    inputs = inputs if nin_eff else []

    if ntheta == 0:
        sse = float(y @ y)
        return PemResult(np.ones(1), np.zeros((nin, 0)), np.ones(1), sse, True, 0, [sse])

    theta = _initial_estimate(y, inputs, na, nb, nc)
    a, b, c = _split(theta, na, nb, nin_eff, nc)
    e = _residuals(y, inputs, a, b, c)
    sse = float(e @ e)
    history = [sse]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        # Jacobian of e with respect to theta
        yf = lfilter([1.0], c, y)
        cols = [_lagged(yf, na)]
        for u in inputs:
            cols.append(-_lagged(lfilter([1.0], c, u), nb))
        cols.append(-_lagged(lfilter([1.0], c, e), nc))
        jac = np.hstack(cols)
        grad = jac.T @ e
        if np.linalg.norm(grad) <= GRAD_TOL * (np.linalg.norm(jac) * np.linalg.norm(e) + 1e-300):
            converged = True
            break
        step, *_ = np.linalg.lstsq(jac, -e, rcond=None)
        mu = 1.0
        accepted = False
        for _ in range(MAX_HALVINGS):
            cand = _project(theta + mu * step, na, nb, nin_eff, nc)
            ca, cb, cc = _split(cand, na, nb, nin_eff, nc)
            ce = _residuals(y, inputs, ca, cb, cc)
            csse = float(ce @ ce)
            if np.isfinite(csse) and csse < sse:
                accepted = True
                break
            mu *= 0.5
        if not accepted:
            # no descent along the Gauss-Newton direction: stationary up to precision
            converged = np.linalg.norm(mu * step) <= 1e-6 * (1.0 + np.linalg.norm(theta))
            break
        rel = (sse - csse) / max(sse, 1e-300)
        theta, a, b, c, e, sse = cand, ca, cb, cc, ce, csse
        history.append(sse)
        if rel < 1e-12:
            converged = True
            break
    if not converged:
        logger.warning("prediction-error fit did not converge after %d iterations", it)
    b_full = b if nin_eff else np.zeros((nin, 0))
    return PemResult(a, b_full, c, sse, converged, it, history)


def fit_arma(series, na: int, nc: int) -> ScalarArmaModel:
    """Minimum prediction-error ARMA(na, nc) fit of a (detrended) series."""
    if na < 0 or nc < 0:
        raise ParameterError("orders must be >= 0")
    y = np.asarray(series, dtype=float)
    if y.size < 10 * (na + nc + 1):
        raise DataError(f"series of length {y.size} too short for ARMA({na},{nc})")
    res = fit_pem(y, [], na, 0, nc)
    return ScalarArmaModel(
        ShiftPolynomial(res.a), ShiftPolynomial(res.c), res.sse / y.size, res.converged, res.iterations
    )


def arma_innovations(model: ScalarArmaModel, series) -> np.ndarray:
    """Recursive prediction errors e[t] = A y[t] + (1 - C) e[t], zero pre-sample."""
    y = np.asarray(series, dtype=float)
    return lfilter(model.a.array, model.c.array, y)


def arma_forecast(model: ScalarArmaModel, history, K: int) -> np.ndarray:
    """Minimum-variance forecasts of samples N..N+K-1 (future innovations zero)."""
    if K < 1:
        raise ParameterError("forecast horizon must be >= 1")
    y = np.asarray(history, dtype=float)
    if y.size == 0:
        raise DataError("empty history")
    e = arma_innovations(model, y)
    n = y.size
    a, c = model.a.array, model.c.array
    ys = np.concatenate((y, np.zeros(K)))
    es = np.concatenate((e, np.zeros(K)))
    for t in range(n, n + K):
        acc = 0.0
        for k in range(1, a.size):
            if t - k >= 0:
                acc -= a[k] * ys[t - k]
        for k in range(1, c.size):
            if t - k >= 0:
                acc += c[k] * es[t - k]
        ys[t] = acc
    return ys[n:]


def arma_forecast_variance(model: ScalarArmaModel, K: int) -> np.ndarray:
    """Forecast error variances for steps 1..K: sigma^2 * cumulative sum of psi_i^2."""
    psi = long_division(model.c.array, model.a.array, K)
    return model.noise_variance * np.cumsum(psi**2)


def simulate_arma(a, c, noise) -> np.ndarray:
    """y = (C/A) noise with zero initial conditions."""
    return lfilter(np.asarray(c, dtype=float), np.asarray(a, dtype=float), np.asarray(noise, dtype=float))
