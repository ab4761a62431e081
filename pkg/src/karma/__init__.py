"""Multi-channel time-series prediction with ARMAX identification and an
adaptive-noise Kalman predictor, plus a per-channel ARMA baseline."""

from karma.core import (
    ConfigError,
    DataError,
    KarmaError,
    NumericalError,
    ParameterError,
    SchemaError,
    ShiftPolynomial,
    StructuralIndices,
    TimeSeriesCollection,
    poly_apply,
    validate_collection,
)

__all__ = [
    "ConfigError",
    "DataError",
    "KarmaError",
    "NumericalError",
    "ParameterError",
    "SchemaError",
    "ShiftPolynomial",
    "StructuralIndices",
    "TimeSeriesCollection",
    "poly_apply",
    "validate_collection",
]

__version__ = "0.1.0"
