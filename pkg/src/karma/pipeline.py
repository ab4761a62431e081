"""End-to-end PARMA and KARMA predictors on a train/horizon split."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from karma.arma import ScalarArmaModel, arma_forecast, arma_forecast_variance, arma_innovations, fit_arma
from karma.armax import MimoArmaxModel, fit_armax
from karma.core import ConfigError, StructuralIndices, TimeSeriesCollection
from karma.kalman import Forecast, KalmanRun, PredictorConfig, kf_forecast, kf_run
from karma.metrics import PredictionReport, build_report
from karma.preprocess import DeterministicModel, fit_deterministic, remove_deterministic
from karma.realization import StateSpaceModel, realize

logger = logging.getLogger(__name__)

METHODS = ("parma", "karma")


@dataclass
class MethodResult:
    method: str
    report: PredictionReport
    predictions: np.ndarray  # K x ny on the data scale
    residual_predictions: np.ndarray  # K x ny, deterministic part removed
    stages: list[str]
    runtime_s: float
    nx: int | None = None
    one_step: np.ndarray | None = None  # training one-step predictions (stochastic part)
    deterministic_train: np.ndarray | None = None  # N0 x ny fitted trend + season


@dataclass
class Prepared:
    """Shared front end of both predictors."""

    train: TimeSeriesCollection
    deterministic: DeterministicModel
    residuals: TimeSeriesCollection
    arma_models: list[ScalarArmaModel]
    horizon_residual_truth: np.ndarray | None
    K: int
    stages: list[str] = field(default_factory=list)

    @property
    def lambda_e(self) -> list[float]:
        return [m.lambda_e for m in self.arma_models]

    def deterministic_train(self) -> np.ndarray:
        return self.deterministic.evaluate(np.arange(self.train.N))

    def deterministic_horizon(self) -> np.ndarray:
        n0 = self.train.N
        return self.deterministic.evaluate(np.arange(n0, n0 + self.K))


def prepare(data: TimeSeriesCollection, train_len: int, K: int, indices: StructuralIndices, season_period: int | None = None) -> Prepared:
    if not 1 <= train_len < data.N:
        raise ConfigError(f"train_len must lie in [1, {data.N}), got {train_len}")
    if K < 1:
        raise ConfigError("horizon must be >= 1")
    train = data.head(train_len)
    det = fit_deterministic(train, indices.p, season_period)
    resid = remove_deterministic(train, det)
    models = [fit_arma(resid.channel(j), indices.na, indices.nc) for j in range(data.ny)]
    truth = None
    if train_len + K <= data.N:
        times = np.arange(train_len, train_len + K)
        truth = data.values[train_len : train_len + K] - det.evaluate(times)
    return Prepared(train, det, resid, models, truth, K, ["preprocess", "arma_id"])


def _score(prep: Prepared, resid_pred: np.ndarray, variances: np.ndarray) -> PredictionReport:
    restored = resid_pred + prep.deterministic_horizon()
    if prep.horizon_residual_truth is None:
        # no held-out truth: report the forecast without scores
        ny = prep.train.ny
        nan = np.full(ny, np.nan)
        return PredictionReport(nan, nan, nan, math.nan, variances.T.copy(), prep.K, prep.train.N, restored, ("no held-out truth",))
    return build_report(prep.residuals.values, prep.horizon_residual_truth, resid_pred, variances, prep.lambda_e, restored)


def run_parma(prep: Prepared) -> MethodResult:
    """Independent per-channel ARMA forecasts."""
    t0 = time.perf_counter()
    K = prep.K
    pred = np.column_stack([arma_forecast(m, prep.residuals.channel(j), K) for j, m in enumerate(prep.arma_models)])
    var = np.column_stack([arma_forecast_variance(m, K) for m in prep.arma_models])
    report = _score(prep, pred, var)
    stages = prep.stages + ["arma_forecast", "metrics"]
    return MethodResult(
        "parma", report, report.predictions, pred, stages, time.perf_counter() - t0,
        deterministic_train=prep.deterministic_train(),
    )


def rough_innovations(models: list[ScalarArmaModel], residuals: np.ndarray) -> np.ndarray:
    return np.column_stack([arma_innovations(m, residuals[:, j]) for j, m in enumerate(models)])


@dataclass
class KarmaModel:
    armax: MimoArmaxModel
    ss: StateSpaceModel
    inputs: np.ndarray
    run: KalmanRun
    forecast: Forecast


def fit_karma(prep: Prepared, indices: StructuralIndices, config: PredictorConfig) -> KarmaModel:
    resid = prep.residuals
    u = rough_innovations(prep.arma_models, resid.values)
    armax = fit_armax(resid, resid.with_values(u), indices.na, indices.nb, indices.nc)
    ss = realize(armax)

    def refit(k: int):
        head = resid.head(k)
        models = [fit_arma(head.channel(j), indices.na, indices.nc) for j in range(resid.ny)]
        u_full = rough_innovations(models, resid.values)
        new = fit_armax(head, head.with_values(u_full[:k]), indices.na, indices.nb, indices.nc)
        return realize(new), u_full

    run = kf_run(resid, ss, config, inputs=u, refit=refit if config.refit_period else None)
    final_ss = run.models[-1][1]
    fc = kf_forecast(run.final, final_ss, prep.K, config=config, include_current=True)
    return KarmaModel(armax, final_ss, u, run, fc)


def run_karma(prep: Prepared, indices: StructuralIndices, config: PredictorConfig) -> MethodResult:
    """ARMAX identification, state-space realization and the adaptive Kalman predictor."""
    t0 = time.perf_counter()
    km = fit_karma(prep, indices, config)
    report = _score(prep, km.forecast.mean, km.forecast.variances)
    stages = prep.stages + ["armax_id", "realization", "kalman_filter", "kalman_forecast", "metrics"]
    return MethodResult(
        "karma", report, report.predictions, km.forecast.mean, stages, time.perf_counter() - t0,
        km.ss.nx, km.run.predictions, prep.deterministic_train(),
    )


def compare(
    data: TimeSeriesCollection,
    train_len: int,
    K: int,
    indices: StructuralIndices,
    methods=METHODS,
    season_period: int | None = None,
    config: PredictorConfig | None = None,
) -> dict[str, MethodResult]:
    config = config or PredictorConfig()
    prep = prepare(data, train_len, K, indices, season_period)
    out = {}
    for method in methods:
        if method == "parma":
            out[method] = run_parma(prep)
        elif method == "karma":
            out[method] = run_karma(prep, indices, config)
        else:
            raise ConfigError(f"unknown method {method!r}")
    return out


def pq_objective(data: TimeSeriesCollection, K: int = 20, season_period: int | None = None, config: PredictorConfig | None = None, method: str = "karma"):
    """Score function for the structure search: PQ norm on the last K samples held out."""
    config = config or PredictorConfig()
    train_len = data.N - K

    def evaluate(key: tuple[int, ...]) -> float:
        p, na, nb, nc = key
        if na + nc < 1:
            raise ConfigError("na + nc must be >= 1")
        idx = StructuralIndices(p, na, nb, nc)
        res = compare(data, train_len, K, idx, (method,), season_period, config)[method]
        return res.report.pq_norm

    return evaluate
