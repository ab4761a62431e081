"""Core value types: time-series collections, q^-1 polynomials, structural indices."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class KarmaError(Exception):
    """Base class for all package errors."""


class DataError(KarmaError):
    """Input data is malformed (non-finite, too short, ragged)."""


class SchemaError(KarmaError):
    """Shapes, channel counts or names do not agree."""


class ParameterError(KarmaError):
    """A numeric parameter is outside its admissible range."""


class ConfigError(KarmaError):
    """A run configuration is invalid."""


class NumericalError(KarmaError):
    """A numerical procedure failed (singular system, divergence)."""


@dataclass(frozen=True)
class TimeSeriesCollection:
    """N samples by ny channels of real measurements.

    Build through :func:`validate_collection`; direct construction also
    validates.
    """

    values: np.ndarray
    channel_names: tuple[str, ...]

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise SchemaError(f"values must be 2-D, got shape {values.shape}")
        n, ny = values.shape
        if n < 1 or ny < 1:
            raise DataError(f"collection needs at least one sample and one channel, got {values.shape}")
        bad = np.argwhere(~np.isfinite(values))
        if bad.size:
            r, c = bad[0]
            raise DataError(f"non-finite value at ({r},{c})")
        names = tuple(str(s) for s in self.channel_names)
        if len(names) != ny:
            raise SchemaError(f"{len(names)} channel names for {ny} channels")
        if any(not s for s in names):
            raise SchemaError("channel names must be non-empty")
        if len(set(names)) != len(names):
            raise SchemaError(f"duplicate channel names in {names}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "channel_names", names)

    @property
    def N(self) -> int:
        return self.values.shape[0]

    @property
    def ny(self) -> int:
        return self.values.shape[1]

    def channel(self, j: int) -> np.ndarray:
        return self.values[:, j]

    def head(self, n: int) -> "TimeSeriesCollection":
        return TimeSeriesCollection(self.values[:n], self.channel_names)

    def slice(self, start: int, stop: int) -> "TimeSeriesCollection":
        return TimeSeriesCollection(self.values[start:stop], self.channel_names)

    def with_values(self, values: np.ndarray) -> "TimeSeriesCollection":
        return TimeSeriesCollection(values, self.channel_names)


def validate_collection(raw, names: Sequence[str]) -> TimeSeriesCollection:
    """Check ``raw`` and ``names`` and wrap them; never repairs data."""
    return TimeSeriesCollection(np.asarray(raw, dtype=float), tuple(names))


@dataclass(frozen=True)
class ShiftPolynomial:
    """Polynomial c0 + c1 q^-1 + ... + cd q^-d in the backward-shift operator."""

    coefficients: tuple[float, ...] = field(default=(1.0,))

    def __post_init__(self):
        coeffs = tuple(float(c) for c in np.atleast_1d(np.asarray(self.coefficients, dtype=float)))
        if not coeffs:
            raise ParameterError("a polynomial needs at least one coefficient")
        if not all(np.isfinite(coeffs)):
            raise ParameterError("polynomial coefficients must be finite")
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def one(cls) -> "ShiftPolynomial":
        return cls((1.0,))

    @classmethod
    def zero(cls, degree: int = 0) -> "ShiftPolynomial":
        return cls((0.0,) * (degree + 1))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coefficients)

    @property
    def is_monic(self) -> bool:
        return self.coefficients[0] == 1.0

    @property
    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def effective_degree(self) -> int:
        """Degree after dropping trailing zeros (0 for the zero polynomial)."""
        nz = np.flatnonzero(self.array)
        return int(nz[-1]) if nz.size else 0

    def roots(self) -> np.ndarray:
        """Roots in z of z^d c(z^-1); stability means all lie inside the unit circle."""
        c = self.array[: self.effective_degree() + 1]
        if c.size <= 1:
            return np.zeros(0, dtype=complex)
        return np.roots(c)

    def max_root_modulus(self) -> float:
        r = self.roots()
        return float(np.max(np.abs(r))) if r.size else 0.0

    def apply(self, series, t: int) -> float:
        return poly_apply(self, series, t)


def poly_apply(poly: ShiftPolynomial, series, t: int) -> float:
    """Sum_i c_i * series[t - i], with samples before index 0 taken as zero."""
    n = len(series)
    if not 0 <= t < n:
        raise IndexError(f"time index {t} outside [0, {n})")
    total = 0.0
    for i, c in enumerate(poly.coefficients):
        if t - i < 0:
            break
        total += c * series[t - i]
    return total


@dataclass(frozen=True)
class StructuralIndices:
    p: int = 0
    na: int = 1
    nb: int = 1
    nc: int = 1
    nx: int | None = None

    def __post_init__(self):
        for name in ("p", "na", "nb", "nc"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be >= 0")
        if self.nx is not None and self.nx < 0:
            raise ParameterError("nx must be >= 0")

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.p, self.na, self.nb, self.nc)
