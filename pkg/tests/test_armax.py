import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from karma.arma import arma_innovations, fit_arma, simulate_arma
from karma.armax import (
    MimoArmaxModel,
    armax_predict_innovations,
    armax_transfer,
    fit_armax,
    simulate_armax,
)
from karma.core import ParameterError, SchemaError, ShiftPolynomial, TimeSeriesCollection

from conftest import random_armax


def coll(values):
    values = np.asarray(values, dtype=float)
    return TimeSeriesCollection(values, tuple(f"c{j}" for j in range(values.shape[1])))


def test_single_channel_equals_fit_arma():
    e = np.random.default_rng(0).normal(size=2000)
    y = simulate_arma([1, -0.6], [1, 0.3], e)
    mimo = fit_armax(coll(y[:, None]), coll(np.zeros((2000, 1))), 1, 2, 1)
    scalar = fit_arma(y, 1, 1)
    assert mimo.b == ((ShiftPolynomial.zero(2),),)
    assert mimo.a_diag[0] == scalar.a
    assert mimo.c_diag[0] == scalar.c
    assert mimo.innovation_variances[0] == scalar.noise_variance


def test_cross_coefficient_recovery():
    hits = 0
    for seed in range(10):
        rng = np.random.default_rng(seed)
        n = 5000
        u = rng.normal(size=(n, 2))
        e1 = rng.normal(size=n)
        # A1 y1 = 0.7 q^-1 u2 + C1 e1
        y1 = simulate_arma([1, -0.5], [1, 0.3], e1) + simulate_arma([1, -0.5], [0, 0.7], u[:, 1])
        y2 = simulate_arma([1, -0.3], [1], rng.normal(size=n))
        m = fit_armax(coll(np.column_stack([y1, y2])), coll(u), 1, 1, 1)
        hits += abs(m.b[0][1].coefficients[1] - 0.7) <= 0.05
    assert hits >= 9


def test_zero_inputs_reduce_to_arma():
    rng = np.random.default_rng(4)
    n = 3000
    y = np.column_stack([simulate_arma([1, -0.7], [1, 0.2], rng.normal(size=n)), simulate_arma([1, 0.4], [1, -0.3], rng.normal(size=n))])
    m = fit_armax(coll(y), coll(np.zeros_like(y)), 1, 2, 1)
    for j in range(2):
        ref = fit_arma(y[:, j], 1, 1)
        for i in range(2):
            assert np.max(np.abs(m.b[j][i].array)) < 1e-6
        np.testing.assert_allclose(m.a_diag[j].array, ref.a.array, atol=1e-6)
        np.testing.assert_allclose(m.c_diag[j].array, ref.c.array, atol=1e-6)


def test_dimension_mismatch():
    with pytest.raises(SchemaError):
        fit_armax(coll(np.zeros((100, 2))), coll(np.zeros((100, 3))), 1, 1, 1)


def test_structural_constraints_enforced():
    one = ShiftPolynomial.one()
    with pytest.raises(ParameterError):
        MimoArmaxModel((one,), ((ShiftPolynomial((0.0, 0.5)),),), (one,), (1.0,))
    with pytest.raises(ParameterError):
        MimoArmaxModel((one, one), ((ShiftPolynomial.zero(), ShiftPolynomial((1.0, 0.5))), (ShiftPolynomial.zero(),) * 2), (one, one), (1.0, 1.0))


def test_fitted_structure():
    rng = np.random.default_rng(1)
    y = rng.normal(size=(600, 3))
    m = fit_armax(coll(y), coll(rng.normal(size=(600, 3))), 2, 1, 1)
    for j in range(3):
        assert m.b[j][j].is_zero
        assert m.a_diag[j].is_monic and m.c_diag[j].is_monic
    assert len(m.a_diag) == 3  # A carried as its diagonal only


def test_transfer_scalar_impulse():
    m = MimoArmaxModel((ShiftPolynomial((1, -0.5)),), ((ShiftPolynomial.zero(),),), (ShiftPolynomial((1, 0.3)),), (1.0,))
    H, G = armax_transfer(m)
    expected = [1.0] + [0.8 * 0.5**k for k in range(9)]
    np.testing.assert_allclose(G[0][0].impulse(10), expected, atol=1e-15)
    assert H[0][0].is_zero


def test_transfer_identity():
    H, G = armax_transfer(MimoArmaxModel.identity(3))
    for j in range(3):
        for i in range(3):
            assert H[j][i].is_zero
            if i == j:
                np.testing.assert_array_equal(G[j][i].impulse(4), [1, 0, 0, 0])
            else:
                assert G[j][i].is_zero


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(0, 10_000))
def test_transfer_matches_simulation(ny, seed):
    rng = np.random.default_rng(seed)
    m = random_armax(rng, ny)
    H, G = armax_transfer(m)
    L = 50
    for i in range(ny):
        imp = np.zeros((L, ny))
        imp[0, i] = 1.0
        y_u = simulate_armax(m, imp, np.zeros((L, ny)))
        y_e = simulate_armax(m, np.zeros((L, ny)), imp)
        for j in range(ny):
            assert H[j][j].is_zero
            np.testing.assert_allclose(H[j][i].impulse(L), y_u[:, j], atol=1e-9)
            np.testing.assert_allclose(G[j][i].impulse(L), y_e[:, j], atol=1e-9)


def test_predict_innovations_identity():
    y = np.random.default_rng(0).normal(size=(20, 2))
    out = armax_predict_innovations(MimoArmaxModel.identity(2), coll(y), coll(np.zeros((20, 2))))
    np.testing.assert_array_equal(out.values, y)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 3), st.integers(0, 10_000))
def test_predict_innovations_simulate_then_invert(ny, seed):
    rng = np.random.default_rng(seed)
    m = random_armax(rng, ny)
    n = 300
    u, e = rng.normal(size=(2, n, ny))
    y = simulate_armax(m, u, e)
    rec = armax_predict_innovations(m, coll(y), coll(u)).values
    assert np.max(np.abs(rec[20:] - e[20:])) < 1e-8


def test_predict_innovations_single_channel():
    rng = np.random.default_rng(9)
    y = rng.normal(size=(100, 1))
    m = MimoArmaxModel((ShiftPolynomial((1, -0.4)),), ((ShiftPolynomial.zero(1),),), (ShiftPolynomial((1, 0.5)),), (1.0,))
    from karma.arma import ScalarArmaModel

    ref = arma_innovations(ScalarArmaModel(m.a_diag[0], m.c_diag[0], 1.0), y[:, 0])
    out = armax_predict_innovations(m, coll(y), coll(rng.normal(size=(100, 1))))
    np.testing.assert_array_equal(out.values[:, 0], ref)


def test_channel_permutation_equivariance():
    rng = np.random.default_rng(21)
    n = 800
    y = rng.normal(size=(n, 3)).cumsum(axis=0) * 0.05 + rng.normal(size=(n, 3))
    u = rng.normal(size=(n, 3))
    perm = [2, 0, 1]
    m = fit_armax(coll(y), coll(u), 1, 1, 1)
    mp = fit_armax(coll(y[:, perm]), coll(u[:, perm]), 1, 1, 1)
    for new_j, j in enumerate(perm):
        np.testing.assert_allclose(mp.a_diag[new_j].array, m.a_diag[j].array, atol=1e-12)
        np.testing.assert_allclose(mp.c_diag[new_j].array, m.c_diag[j].array, atol=1e-12)
        for new_i, i in enumerate(perm):
            np.testing.assert_allclose(mp.b[new_j][new_i].array, m.b[j][i].array, atol=1e-12)
