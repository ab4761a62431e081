import numpy as np
import pytest

from karma.armax import MimoArmaxModel
from karma.core import ShiftPolynomial


def random_stable_poly(rng, degree, radius=0.9):
    """Monic polynomial in q^-1 whose roots (in z) have modulus < radius."""
    if degree == 0:
        return np.array([1.0])
    roots = []
    while len(roots) < degree:
        if degree - len(roots) >= 2 and rng.random() < 0.5:
            r = radius * np.sqrt(rng.random()) * np.exp(1j * np.pi * rng.random())
            roots += [r, np.conj(r)]
        else:
            roots.append(radius * rng.uniform(-1, 1))
    return np.real(np.poly(roots))


def random_armax(rng, ny, max_deg=2):
    a, c, b = [], [], []
    for j in range(ny):
        a.append(ShiftPolynomial(random_stable_poly(rng, int(rng.integers(0, max_deg + 1)))))
        c.append(ShiftPolynomial(random_stable_poly(rng, int(rng.integers(0, max_deg + 1)))))
        nb = int(rng.integers(0, max_deg + 1))
        row = []
        for i in range(ny):
            if i == j:
                row.append(ShiftPolynomial.zero(nb))
            else:
                row.append(ShiftPolynomial(np.concatenate(([0.0], rng.normal(size=nb)))))
        b.append(tuple(row))
    return MimoArmaxModel(tuple(a), tuple(b), tuple(c), tuple(rng.uniform(0.5, 2, ny)))


def random_stable_system(rng, nx, ny, nu=0, radius=0.95):
    """Random (A, Bx, C, Q, R) with spectral radius of A below ``radius``."""
    A = rng.normal(size=(nx, nx))
    rho = np.max(np.abs(np.linalg.eigvals(A))) if nx else 1.0
    A *= rng.uniform(0.3, radius) / rho
    Bx = rng.normal(size=(nx, nu))
    C = rng.normal(size=(ny, nx))
    L = rng.normal(size=(nx, nx))
    Q = L @ L.T / nx + 0.1 * np.eye(nx)
    R = np.diag(rng.uniform(0.2, 2.0, ny))
    return A, Bx, C, Q, R


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
