"""Rational transfer functions num(q^-1)/den(q^-1) and their impulse responses."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from karma.core import ParameterError, ShiftPolynomial


@dataclass(frozen=True)
class RationalTransfer:
    num: ShiftPolynomial
    den: ShiftPolynomial

    def __post_init__(self):
        if self.den.coefficients[0] == 0.0:
            raise ParameterError("denominator must have a non-zero constant term")

    @classmethod
    def zero(cls) -> "RationalTransfer":
        return cls(ShiftPolynomial.zero(), ShiftPolynomial.one())

    @classmethod
    def identity(cls) -> "RationalTransfer":
        return cls(ShiftPolynomial.one(), ShiftPolynomial.one())

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def impulse(self, length: int) -> np.ndarray:
        return long_division(self.num.array, self.den.array, length)


def long_division(num, den, length: int) -> np.ndarray:
    """First ``length`` quotient terms of num/den as power series in q^-1."""
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    h = np.zeros(length)
    for n in range(length):
        acc = num[n] if n < num.size else 0.0
        for k in range(1, min(n, den.size - 1) + 1):
            acc -= den[k] * h[n - k]
        h[n] = acc / den[0]
    return h
