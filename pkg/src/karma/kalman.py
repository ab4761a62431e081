"""Kalman predictor that estimates its own mixed noise covariances online.

One call of :func:`kf_step` runs the ten numbered steps below (the inline
comments in :func:`kf_step_detail` use the same numbers):

    2.1   D v[k]  = y[k] - C x[k] - By u[k]               (innovation)
    2.2   Rv      = running mean of D v v^T D^T           (exogenous)
    2.3   Q       = C P
    2.4   R       = Rv + Q C^T
    2.5   Gamma   = Q^T R^-1
    2.6   S       = A Gamma
    2.7   Rw      = running mean of S D v v^T D^T S^T     (endogenous)
    2.8   P[k+1]  = Rw + A (P - Gamma Q) A^T
    2.9   x[k+1]  = A x[k] + Bx u[k] + S D v[k]
    2.10  y[k+1]  = C x[k+1] + By u[k+1]
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from karma.core import ConfigError, DataError, ParameterError, SchemaError, TimeSeriesCollection
from karma.linalg import spd_solve, symmetrize
from karma.realization import StateSpaceModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NoiseCovarianceEstimates:
    """Running means of the mixed exogenous (ny x ny) and endogenous (nx x nx) covariances."""

    exo: np.ndarray
    endo: np.ndarray
    count: int = 0

    @classmethod
    def zeros(cls, nx: int, ny: int) -> "NoiseCovarianceEstimates":
        return cls(np.zeros((ny, ny)), np.zeros((nx, nx)), 0)


@dataclass(frozen=True)
class PredictorConfig:
    """Settings of the adaptive predictor.

    ``adaptation_window`` is how many samples pass between upgrades of the
    covariances used in the gain and Riccati steps; the running means
    themselves absorb every sample. ``fixed_exo``/``fixed_endo`` replace the
    online estimates entirely (adaptation disabled for that matrix).
    """

    alpha: float = 1000.0
    adaptation_window: int = 1
    refit_period: int = 0
    jitter: float = 1e-10
    fixed_exo: np.ndarray | None = None
    fixed_endo: np.ndarray | None = None

    def __post_init__(self):
        if not self.alpha > 0:
            raise ParameterError(f"alpha must be positive, got {self.alpha}")
        if self.adaptation_window < 1:
            raise ParameterError("adaptation_window must be >= 1")
        if self.refit_period < 0:
            raise ParameterError("refit_period must be >= 0")
        if not self.jitter > 0:
            raise ParameterError("jitter must be positive")


@dataclass(frozen=True)
class KalmanState:
    x_hat: np.ndarray
    P_hat: np.ndarray
    noise: NoiseCovarianceEstimates
    k: int = 0
    u_held: np.ndarray | None = None
    exo_used: np.ndarray | None = None
    endo_used: np.ndarray | None = None
    jitter_level: int = 0


@dataclass(frozen=True)
class StepDetail:
    """Every intermediate of one recursion step."""

    innovation: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    gain: np.ndarray
    S: np.ndarray
    correction: np.ndarray
    y_pred: np.ndarray
    state: KalmanState


@dataclass(frozen=True)
class KalmanRun:
    states: list[KalmanState]
    predictions: np.ndarray
    innovations: np.ndarray
    models: list[tuple[int, StateSpaceModel]] = field(default_factory=list)

    @property
    def final(self) -> KalmanState:
        return self.states[-1]


@dataclass(frozen=True)
class Forecast:
    """Predicted outputs (K x ny) and predicted output covariances (K x ny x ny)."""

    mean: np.ndarray
    cov: np.ndarray

    @property
    def variances(self) -> np.ndarray:
        return np.diagonal(self.cov, axis1=1, axis2=2).copy()


def kf_init(ss: StateSpaceModel, config: PredictorConfig, x0=None) -> KalmanState:
    if x0 is None:
        x0 = np.zeros(ss.nx)
    x0 = np.asarray(x0, dtype=float).ravel()
    if x0.size != ss.nx:
        raise SchemaError(f"initial state has {x0.size} entries, model has nx={ss.nx}")
    if config.fixed_exo is not None and np.shape(config.fixed_exo) != (ss.ny, ss.ny):
        raise SchemaError("fixed_exo must be ny x ny")
    if config.fixed_endo is not None and np.shape(config.fixed_endo) != (ss.nx, ss.nx):
        raise SchemaError("fixed_endo must be nx x nx")
    noise = NoiseCovarianceEstimates.zeros(ss.nx, ss.ny)
    return KalmanState(
        x0.copy(),
        config.alpha * np.eye(ss.nx),
        noise,
        0,
        np.zeros(ss.nu),
        noise.exo,
        noise.endo,
    )


def _check_bound(state: KalmanState, ss: StateSpaceModel):
    if state.x_hat.size != ss.nx or state.noise.exo.shape != (ss.ny, ss.ny):
        raise SchemaError("state dimensions do not match the state-space model")


def kf_step_detail(state: KalmanState, ss: StateSpaceModel, y, u=None, config: PredictorConfig | None = None) -> StepDetail:
    config = config or PredictorConfig()
    _check_bound(state, ss)
    y = np.asarray(y, dtype=float).ravel()
    if y.size != ss.ny:
        raise SchemaError(f"measurement has {y.size} entries, expected {ss.ny}")
    if not np.all(np.isfinite(y)):
        raise DataError(f"non-finite measurement at step {state.k}")
    u = np.zeros(ss.nu) if u is None else np.asarray(u, dtype=float).ravel()
    if u.size != ss.nu:
        raise SchemaError(f"input has {u.size} entries, expected {ss.nu}")

    A, C = ss.A, ss.C
    x, P = state.x_hat, state.P_hat
    k = state.noise.count
    refresh = k % config.adaptation_window == 0

    # 2.1 innovation
    v = y - C @ x - ss.By @ u
    vv = np.outer(v, v)
    # 2.2 exogenous running mean
    exo = (k * state.noise.exo + vv) / (k + 1)
    if config.fixed_exo is not None:
        exo_used = np.asarray(config.fixed_exo, dtype=float)
    elif refresh or state.exo_used is None:
        exo_used = exo
    else:
        exo_used = state.exo_used
    # 2.3 - 2.5 gain
    Q = C @ P
    R = exo_used + Q @ C.T
    if ss.nx:
        gain_t, level = spd_solve(R, Q, config.jitter)
        gain = gain_t.T
    else:
        gain, level = np.zeros((0, ss.ny)), 0
    if level:
        logger.debug("jitter level %d at step %d", level, state.k)
    # 2.6
    S = A @ gain
    correction = S @ v
    # 2.7 endogenous running mean
    endo = (k * state.noise.endo + np.outer(correction, correction)) / (k + 1)
    if config.fixed_endo is not None:
        endo_used = np.asarray(config.fixed_endo, dtype=float)
    elif refresh or state.endo_used is None:
        endo_used = endo
    else:
        endo_used = state.endo_used
    # 2.8 Riccati update
    P_next = symmetrize(endo_used + A @ (P - gain @ Q) @ A.T)
    # 2.9, 2.10
    x_next = A @ x + ss.Bx @ u + correction
    y_pred = C @ x_next + ss.By @ u

    new_state = KalmanState(
        x_next,
        P_next,
        NoiseCovarianceEstimates(exo, endo, k + 1),
        state.k + 1,
        u,
        exo_used,
        endo_used,
        level,
    )
    return StepDetail(v, Q, R, gain, S, correction, y_pred, new_state)


def kf_step(state: KalmanState, ss: StateSpaceModel, y, u=None, config: PredictorConfig | None = None) -> tuple[KalmanState, np.ndarray]:
    """Absorb measurement y[k] (with input u[k]); return the new state and y_hat[k+1]."""
    d = kf_step_detail(state, ss, y, u, config)
    return d.state, d.y_pred


def _rebind(state: KalmanState, ss: StateSpaceModel, config: PredictorConfig) -> KalmanState:
    """Carry the state over to a re-identified model; restart if nx changed."""
    if state.x_hat.size == ss.nx:
        return state
    noise = NoiseCovarianceEstimates(state.noise.exo, np.zeros((ss.nx, ss.nx)), state.noise.count)
    return KalmanState(
        np.zeros(ss.nx),
        config.alpha * np.eye(ss.nx),
        noise,
        state.k,
        np.zeros(ss.nu),
        state.exo_used,
        noise.endo,
        0,
    )


def kf_run(
    data: TimeSeriesCollection,
    ss: StateSpaceModel,
    config: PredictorConfig | None = None,
    inputs=None,
    x0=None,
    refit: Callable[[int], tuple[StateSpaceModel, np.ndarray]] | None = None,
) -> KalmanRun:
    """Fold :func:`kf_step` over the data.

    ``inputs`` is an N x nu array (zeros if omitted). With ``refit_period > 0``
    the callable ``refit(k)`` is invoked after every ``refit_period`` samples;
    it must re-identify on the first k samples and return the new model and
    the full-length input array to use from then on.
    """
    config = config or PredictorConfig()
    if data.ny != ss.ny:
        raise SchemaError(f"data has {data.ny} channels, model has {ss.ny}")
    if config.refit_period and refit is None:
        raise ConfigError("refit_period > 0 requires a refit callable")
    u_all = np.zeros((data.N, ss.nu)) if inputs is None else np.asarray(inputs, dtype=float)
    if u_all.shape != (data.N, ss.nu):
        raise SchemaError(f"inputs have shape {u_all.shape}, expected {(data.N, ss.nu)}")

    state = kf_init(ss, config, x0)
    states = [state]
    preds = np.zeros((data.N, ss.ny))
    innov = np.zeros((data.N, ss.ny))
    models = [(0, ss)]
    for k in range(data.N):
        d = kf_step_detail(state, ss, data.values[k], u_all[k], config)
        state = d.state
        preds[k] = d.y_pred
        innov[k] = d.innovation
        states.append(state)
        if config.refit_period and (k + 1) % config.refit_period == 0 and k + 1 < data.N:
            ss, u_all = refit(k + 1)
            state = _rebind(state, ss, config)
            # the held input and one-step prediction follow the new model
            state = replace(state, u_held=u_all[k])
            models.append((k + 1, ss))
    return KalmanRun(states, preds, innov, models)


def kf_forecast(
    state: KalmanState,
    ss: StateSpaceModel,
    K: int,
    u_future=None,
    config: PredictorConfig | None = None,
    include_current: bool = False,
) -> Forecast:
    """Measurement-free prediction of outputs at times k+1..k+K.

    The unseen innovation is replaced by its mean (zero), so the state just
    propagates through A, driven by ``u_future`` (rows are the inputs at
    times k, k+1, ...; zeros by default, the conditional mean of white rough
    innovations). The covariance recursion
    P <- A P A^T + Rw gives the predicted output covariance C P C^T + Rv.
    With ``include_current`` the already available prediction for time k
    (from the state itself) is returned first and the horizon is k..k+K-1.
    """
    if K < 1:
        raise ParameterError("forecast horizon must be >= 1")
    config = config or PredictorConfig()
    _check_bound(state, ss)
    u_future = np.zeros((K, ss.nu)) if u_future is None else np.asarray(u_future, dtype=float).reshape(K, ss.nu)
    exo = state.exo_used if config.fixed_exo is None else np.asarray(config.fixed_exo, dtype=float)
    endo = state.endo_used if config.fixed_endo is None else np.asarray(config.fixed_endo, dtype=float)
    if exo is None:
        exo = state.noise.exo
    if endo is None:
        endo = state.noise.endo
    A, C = ss.A, ss.C
    x, P = state.x_hat, state.P_hat

    def u_at(m: int) -> np.ndarray:
        return u_future[m] if m < K else np.zeros(ss.nu)

    means, covs = [], []
    if include_current:
        means.append(C @ x + ss.By @ u_at(0))
        covs.append(symmetrize(C @ P @ C.T + exo))
    for m in range(K - len(means)):
        x = A @ x + ss.Bx @ u_at(m)
        P = symmetrize(A @ P @ A.T + endo)
        means.append(C @ x + ss.By @ u_at(m + 1))
        covs.append(symmetrize(C @ P @ C.T + exo))
    return Forecast(np.array(means).reshape(K, ss.ny), np.array(covs).reshape(K, ss.ny, ss.ny))
