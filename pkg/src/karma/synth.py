"""Synthetic correlated multi-channel processes with a shared latent driver."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from karma.arma import is_stable
from karma.core import ParameterError, TimeSeriesCollection

BURN_IN = 200


@dataclass(frozen=True)
class ScenarioSpec:
    """Generator settings.

    Channel j is ARMA_j driven by ``sqrt(1 - coupling^2) * own_j[t] +
    coupling * shared[t - lags[j]]``, scaled by ``noise_std[j]``, plus a
    polynomial trend (coefficients in t/N) and a sinusoidal season.
    """

    ny: int = 4
    N: int = 500
    coupling: float = 0.8
    channel_arma: tuple[tuple[tuple[float, ...], tuple[float, ...]], ...] = ()
    lags: tuple[int, ...] = ()
    noise_std: tuple[float, ...] = ()
    trend: tuple[tuple[float, ...], ...] = ()
    season_period: int | None = None
    season_amplitude: tuple[float, ...] = ()
    seed: int = 0

    def __post_init__(self):
        if self.ny < 1 or self.N < 1:
            raise ParameterError("ny and N must be >= 1")
        if not 0.0 <= self.coupling <= 1.0:
            raise ParameterError(f"coupling must lie in [0, 1], got {self.coupling}")
        for name in ("channel_arma", "lags", "noise_std", "trend", "season_amplitude"):
            value = getattr(self, name)
            if value and len(value) != self.ny:
                raise ParameterError(f"{name} needs {self.ny} entries")
        for a, c in self.arma_models():
            if a[0] != 1.0 or c[0] != 1.0 or not (is_stable(a) and is_stable(c)):
                raise ParameterError(f"generator polynomials {a}, {c} must be monic, stable and invertible")
        if any(lag < 0 for lag in self.resolved_lags()):
            raise ParameterError("lags must be >= 0")
        if self.season_period is not None and self.season_period < 2:
            raise ParameterError("season period must be >= 2")

    def arma_models(self):
        if self.channel_arma:
            return [(np.array(a, dtype=float), np.array(c, dtype=float)) for a, c in self.channel_arma]
        return [(np.array([1.0, -0.7]), np.array([1.0, 0.3]))] * self.ny

    def resolved_lags(self) -> tuple[int, ...]:
        return tuple(self.lags) if self.lags else (0,) * self.ny


def generate(spec: ScenarioSpec) -> TimeSeriesCollection:
    rng = np.random.default_rng(spec.seed)
    lags = spec.resolved_lags()
    total = spec.N + BURN_IN
    own = rng.standard_normal((total, spec.ny))
    shared = rng.standard_normal(total + max(lags))
    std = np.array(spec.noise_std, dtype=float) if spec.noise_std else np.ones(spec.ny)
    mix = np.sqrt(1.0 - spec.coupling**2)
    out = np.zeros((spec.N, spec.ny))
    t = np.arange(spec.N)
    for j, (a, c) in enumerate(spec.arma_models()):
        start = max(lags) - lags[j]
        driver = mix * own[:, j] + spec.coupling * shared[start : start + total]
        y = lfilter(c, a, std[j] * driver)[BURN_IN:]
        if spec.trend:
            y = y + np.polynomial.polynomial.polyval(t / spec.N, spec.trend[j])
        if spec.season_period and spec.season_amplitude:
            y = y + spec.season_amplitude[j] * np.sin(2 * np.pi * t / spec.season_period)
        out[:, j] = y
    names = tuple(f"ch{j + 1}" for j in range(spec.ny))
    return TimeSeriesCollection(out, names)
