"""Global MIMO ARMAX model with diagonal A and C and null-diagonal B.

Channel j is explained by its own past and by the delayed rough innovations
of every other channel; fits are decoupled per channel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from karma.arma import fit_pem, is_stable
from karma.core import ParameterError, SchemaError, ShiftPolynomial, TimeSeriesCollection
from karma.transfer import RationalTransfer


@dataclass(frozen=True)
class MimoArmaxModel:
    """A(q^-1) y = B(q^-1) u + C(q^-1) e with A, C diagonal and B[j][j] = 0.

    ``b[j][i]`` is the polynomial from input i to output j and always has a
    zero constant term.
    """

    a_diag: tuple[ShiftPolynomial, ...]
    b: tuple[tuple[ShiftPolynomial, ...], ...]
    c_diag: tuple[ShiftPolynomial, ...]
    innovation_variances: tuple[float, ...]
    converged: tuple[bool, ...] = ()

    def __post_init__(self):
        ny = len(self.a_diag)
        if len(self.c_diag) != ny or len(self.b) != ny or len(self.innovation_variances) != ny:
            raise SchemaError("inconsistent channel count in ARMAX model")
        for j in range(ny):
            if len(self.b[j]) != ny:
                raise SchemaError(f"row {j} of B has {len(self.b[j])} entries, expected {ny}")
            if not self.b[j][j].is_zero:
                raise ParameterError(f"B[{j}][{j}] must be the zero polynomial")
            for i in range(ny):
                if self.b[j][i].coefficients[0] != 0.0:
                    raise ParameterError(f"B[{j}][{i}] must have a zero constant term")
            for poly in (self.a_diag[j], self.c_diag[j]):
                if not poly.is_monic:
                    raise ParameterError("A and C diagonal polynomials must be monic")
                if not is_stable(poly.array):
                    raise ParameterError(f"polynomial {poly.coefficients} has roots on or outside the unit circle")

    @property
    def ny(self) -> int:
        return len(self.a_diag)

    @classmethod
    def identity(cls, ny: int) -> "MimoArmaxModel":
        one = ShiftPolynomial.one()
        zero = ShiftPolynomial.zero()
        return cls((one,) * ny, tuple((zero,) * ny for _ in range(ny)), (one,) * ny, (0.0,) * ny)


def fit_armax(outputs: TimeSeriesCollection, inputs: TimeSeriesCollection, na: int, nb: int, nc: int) -> MimoArmaxModel:
    """Per-channel prediction-error fits; channel j's inputs are inputs[:, i] for i != j."""
    if outputs.N != inputs.N or outputs.ny != inputs.ny:
        raise SchemaError(f"outputs {outputs.values.shape} and inputs {inputs.values.shape} differ in shape")
    if min(na, nb, nc) < 0:
        raise ParameterError("orders must be >= 0")
    ny = outputs.ny
    a_diag, b_rows, c_diag, variances, conv = [], [], [], [], []
    for j in range(ny):
        others = [i for i in range(ny) if i != j]
        res = fit_pem(outputs.channel(j), [inputs.channel(i) for i in others], na, nb, nc)
        a_diag.append(ShiftPolynomial(res.a))
        c_diag.append(ShiftPolynomial(res.c))
        row = [ShiftPolynomial.zero(nb)] * ny
        for k, i in enumerate(others):
            row[i] = ShiftPolynomial(np.concatenate(([0.0], res.b[k])))
        b_rows.append(tuple(row))
        variances.append(res.sse / outputs.N)
        conv.append(res.converged)
    return MimoArmaxModel(tuple(a_diag), tuple(b_rows), tuple(c_diag), tuple(variances), tuple(conv))


def armax_transfer(model: MimoArmaxModel) -> tuple[list[list[RationalTransfer]], list[list[RationalTransfer]]]:
    """Input transfer H = A^-1 B and noise transfer G = A^-1 C.

    A is diagonal, so each entry is just a numerator over a_diag[j].
    """
    ny = model.ny
    H = [[RationalTransfer.zero() for _ in range(ny)] for _ in range(ny)]
    G = [[RationalTransfer.zero() for _ in range(ny)] for _ in range(ny)]
    for j in range(ny):
        den = model.a_diag[j]
        for i in range(ny):
            if i != j:
                H[j][i] = RationalTransfer(model.b[j][i], den)
        G[j][j] = RationalTransfer(model.c_diag[j], den)
    return H, G


def armax_predict_innovations(model: MimoArmaxModel, outputs: TimeSeriesCollection, inputs: TimeSeriesCollection) -> TimeSeriesCollection:
    """e_j = (A_j y_j - sum_i B_ji u_i) / C_j with zero pre-sample values."""
    if outputs.ny != model.ny or inputs.ny != model.ny or outputs.N != inputs.N:
        raise SchemaError("model, outputs and inputs disagree in dimensions")
    e = np.empty_like(outputs.values)
    for j in range(model.ny):
        c = model.c_diag[j].array
        ej = lfilter(model.a_diag[j].array, c, outputs.channel(j))
        for i in range(model.ny):
            if i != j and not model.b[j][i].is_zero:
                ej = ej - lfilter(model.b[j][i].array, c, inputs.channel(i))
        e[:, j] = ej
    return outputs.with_values(e)


def simulate_armax(model: MimoArmaxModel, inputs, noise) -> np.ndarray:
    """Time-domain simulation of A y = B u + C e, zero initial conditions."""
    u = np.asarray(inputs, dtype=float)
    e = np.asarray(noise, dtype=float)
    y = np.zeros_like(e)
    for j in range(model.ny):
        a = model.a_diag[j].array
        yj = lfilter(model.c_diag[j].array, a, e[:, j])
        for i in range(model.ny):
            if i != j:
                yj = yj + lfilter(model.b[j][i].array, a, u[:, i])
        y[:, j] = yj
    return y
