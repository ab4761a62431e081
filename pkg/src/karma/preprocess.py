"""Per-channel deterministic component: polynomial trend plus optional season."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from karma.core import DataError, ParameterError, SchemaError, TimeSeriesCollection


@dataclass(frozen=True)
class DeterministicModel:
    """Trend polynomials in normalized time t/scale and zero-sum seasonal offsets.

    ``trend_coeffs[j][i]`` multiplies ``(t/scale)**i`` for channel j.
    """

    trend_coeffs: tuple[tuple[float, ...], ...]
    scale: int
    season_period: int | None = None
    season_profile: tuple[tuple[float, ...], ...] = ()

    @property
    def ny(self) -> int:
        return len(self.trend_coeffs)

    @property
    def p(self) -> int:
        return len(self.trend_coeffs[0]) - 1

    @classmethod
    def zero(cls, ny: int, scale: int = 1) -> "DeterministicModel":
        return cls(trend_coeffs=((0.0,),) * ny, scale=scale)

    def evaluate(self, times) -> np.ndarray:
        """Deterministic values at absolute integer ``times``, shape (len(times), ny)."""
        t = np.asarray(times, dtype=float)
        basis = _basis(t / self.scale, self.p)
        out = basis @ np.array(self.trend_coeffs).T
        if self.season_period:
            phase = np.asarray(times, dtype=int) % self.season_period
            out = out + np.array(self.season_profile).T[phase]
        return out


def _basis(tn: np.ndarray, p: int) -> np.ndarray:
    return np.vander(tn, p + 1, increasing=True)


def fit_deterministic(data: TimeSeriesCollection, p: int, season_period: int | None = None) -> DeterministicModel:
    """Least-squares trend of degree ``p`` per channel, then per-phase seasonal means.

    The seasonal profile is computed on detrended values and re-centered so
    each channel's profile sums to zero.
    """
    if p < 0:
        raise ParameterError(f"trend degree must be >= 0, got {p}")
    n = data.N
    if p + 1 > n:
        raise DataError(f"trend degree {p} is underdetermined with {n} samples")
    if season_period is not None:
        if season_period < 2:
            raise ParameterError(f"season period must be >= 2, got {season_period}")
        if season_period > n / 2:
            raise DataError(f"season period {season_period} exceeds half the record ({n})")

    t = np.arange(n)
    basis = _basis(t / n, p)
    coeffs, *_ = np.linalg.lstsq(basis, data.values, rcond=None)
    trend = tuple(tuple(float(c) for c in coeffs[:, j]) for j in range(data.ny))

    profile: tuple[tuple[float, ...], ...] = ()
    if season_period:
        detrended = data.values - basis @ coeffs
        phase = t % season_period
        means = np.array([detrended[phase == s].mean(axis=0) for s in range(season_period)])
        means -= means.mean(axis=0)
        profile = tuple(tuple(float(v) for v in means[:, j]) for j in range(data.ny))
    return DeterministicModel(trend, scale=n, season_period=season_period, season_profile=profile)


def remove_deterministic(data: TimeSeriesCollection, model: DeterministicModel, start_index: int = 0) -> TimeSeriesCollection:
    if model.ny != data.ny:
        raise SchemaError(f"model has {model.ny} channels, data has {data.ny}")
    times = np.arange(start_index, start_index + data.N)
    return data.with_values(data.values - model.evaluate(times))


def add_deterministic(data: TimeSeriesCollection, model: DeterministicModel, start_index: int = 0) -> TimeSeriesCollection:
    """Restore trend and season on samples at absolute times start_index.. ."""
    if model.ny != data.ny:
        raise SchemaError(f"model has {model.ny} channels, data has {data.ny}")
    times = np.arange(start_index, start_index + data.N)
    return data.with_values(data.values + model.evaluate(times))
