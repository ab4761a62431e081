"""State-space form of the ARMAX model (per-channel observable canonical blocks).

    x[k+1] = A x[k] + Bx u[k] + F w[k]
    y[k]   = C x[k] + By u[k] + D v[k]

Channel j's innovation e_j drives both v_j (through D = I) and the state
column ``noise_states[j]`` of F, so the noise-to-output transfer of channel j
is C_j/A_j and the input-to-output transfer is B_ji/A_j.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from karma.armax import MimoArmaxModel
from karma.core import ParameterError, SchemaError


@dataclass(frozen=True)
class StateSpaceModel:
    A: np.ndarray
    Bx: np.ndarray
    By: np.ndarray
    C: np.ndarray
    D: np.ndarray
    F: np.ndarray
    noise_states: tuple[int | None, ...] = ()

    def __post_init__(self):
        mats = {}
        for name in ("A", "Bx", "By", "C", "D", "F"):
            m = np.array(getattr(self, name), dtype=float)
            if m.ndim != 2:
                raise SchemaError(f"{name} must be 2-D")
            if not np.all(np.isfinite(m)):
                raise ParameterError(f"{name} has non-finite entries")
            m.setflags(write=False)
            mats[name] = m
            object.__setattr__(self, name, m)
        nx = mats["A"].shape[0]
        ny = mats["D"].shape[0]
        nu = mats["Bx"].shape[1]
        expected = {
            "A": (nx, nx),
            "Bx": (nx, nu),
            "By": (ny, nu),
            "C": (ny, nx),
            "D": (ny, ny),
            "F": (nx, nx),
        }
        for name, shape in expected.items():
            if mats[name].shape != shape:
                raise SchemaError(f"{name} has shape {mats[name].shape}, expected {shape}")
        if self.noise_states and len(self.noise_states) != ny:
            raise SchemaError("noise_states needs one entry per output channel")

    @property
    def nx(self) -> int:
        return self.A.shape[0]

    @property
    def ny(self) -> int:
        return self.D.shape[0]

    @property
    def nu(self) -> int:
        return self.Bx.shape[1]

    def spectral_radius(self) -> float:
        if self.nx == 0:
            return 0.0
        return float(np.max(np.abs(np.linalg.eigvals(self.A))))


def _padded(coeffs, n: int) -> np.ndarray:
    out = np.zeros(n + 1)
    c = np.asarray(coeffs, dtype=float)
    out[: min(c.size, n + 1)] = c[: n + 1]
    return out


def block_order(model: MimoArmaxModel, j: int) -> int:
    degs = [model.a_diag[j].degree, model.c_diag[j].degree]
    degs += [model.b[j][i].degree for i in range(model.ny) if i != j]
    return max(degs)


def realize(model: MimoArmaxModel) -> StateSpaceModel:
    """Block-diagonal observable canonical realization, one block per channel."""
    ny = model.ny
    orders = [block_order(model, j) for j in range(ny)]
    nx = sum(orders)
    A = np.zeros((nx, nx))
    Bx = np.zeros((nx, ny))
    C = np.zeros((ny, nx))
    F = np.zeros((nx, nx))
    noise_states: list[int | None] = []
    offset = 0
    for j, n in enumerate(orders):
        if n == 0:
            noise_states.append(None)
            continue
        a = _padded(model.a_diag[j].coefficients, n)
        c = _padded(model.c_diag[j].coefficients, n)
        blk = slice(offset, offset + n)
        A[blk, offset] = -a[1:]
        A[offset : offset + n - 1, offset + 1 : offset + n] += np.eye(n - 1)
        F[blk, offset] = c[1:] - a[1:]
        for i in range(ny):
            if i != j:
                Bx[blk, i] = _padded(model.b[j][i].coefficients, n)[1:]
        C[j, offset] = 1.0
        noise_states.append(offset)
        offset += n
    return StateSpaceModel(A, Bx, np.zeros((ny, ny)), C, np.eye(ny), F, tuple(noise_states))


def impulse_response(ss: StateSpaceModel, channel: int, kind: str, length: int) -> np.ndarray:
    """Output response (length x ny) to a unit impulse at time 0, zero initial state.

    ``kind="input"`` drives u[channel]; ``kind="noise"`` drives innovation
    ``channel``, entering through D (v) and through F at its noise state (w).
    """
    if kind not in ("input", "noise"):
        raise ValueError(f"kind must be 'input' or 'noise', got {kind!r}")
    width = ss.nu if kind == "input" else ss.ny
    if not 0 <= channel < width:
        raise IndexError(f"{kind} channel {channel} outside [0, {width})")
    out = np.zeros((length, ss.ny))
    x = np.zeros(ss.nx)
    for k in range(length):
        y = ss.C @ x
        x_next = ss.A @ x
        if k == 0:
            if kind == "input":
                y = y + ss.By[:, channel]
                x_next = x_next + ss.Bx[:, channel]
            else:
                y = y + ss.D[:, channel]
                if ss.noise_states and ss.noise_states[channel] is not None:
                    x_next = x_next + ss.F[:, ss.noise_states[channel]]
        out[k] = y
        x = x_next
    return out


def state_impulse_response(ss: StateSpaceModel, state: int, length: int) -> np.ndarray:
    """Output response to a unit impulse injected directly into state ``state`` at time 0."""
    if not 0 <= state < ss.nx:
        raise IndexError(f"state {state} outside [0, {ss.nx})")
    out = np.zeros((length, ss.ny))
    x = np.zeros(ss.nx)
    x[state] = 1.0
    for k in range(1, length):
        out[k] = ss.C @ x
        x = ss.A @ x
    return out
