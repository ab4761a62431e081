import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from karma.core import DataError, SchemaError, TimeSeriesCollection
from karma.preprocess import DeterministicModel, add_deterministic, fit_deterministic, remove_deterministic


def coll(values):
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    return TimeSeriesCollection(values, tuple(f"c{j}" for j in range(values.shape[1])))


def test_constant_channel():
    data = coll([5, 5, 5, 5])
    model = fit_deterministic(data, 0)
    assert model.trend_coeffs[0] == pytest.approx((5.0,))
    np.testing.assert_allclose(remove_deterministic(data, model).values, 0.0, atol=1e-12)


def test_linear_channel_exact():
    data = coll([0, 1, 2, 3])
    model = fit_deterministic(data, 1)
    np.testing.assert_allclose(remove_deterministic(data, model).values, 0.0, atol=1e-12)


def test_quadratic_matches_normal_equations():
    rng = np.random.default_rng(3)
    n = 200
    t = np.arange(n)
    y = 2.0 - 3.0 * (t / n) + 4.0 * (t / n) ** 2 + 0.1 * rng.normal(size=n)
    model = fit_deterministic(coll(y), 2)
    # normal equations on the normalized-time basis
    X = np.column_stack([(t / n) ** i for i in range(3)])
    oracle = np.linalg.solve(X.T @ X, X.T @ y)
    np.testing.assert_allclose(model.trend_coeffs[0], oracle, rtol=1e-8)


def test_underdetermined():
    with pytest.raises(DataError):
        fit_deterministic(coll([1.0, 2.0]), 2)


def test_zero_model_is_identity():
    data = coll(np.random.default_rng(0).normal(size=(10, 2)))
    out = remove_deterministic(data, DeterministicModel.zero(2, 10))
    np.testing.assert_array_equal(out.values, data.values)


@settings(max_examples=30)
@given(st.integers(0, 3), st.sampled_from([None, 2, 5]), st.integers(0, 1000))
def test_round_trip(p, period, seed):
    rng = np.random.default_rng(seed)
    data = coll(rng.normal(size=(40, 3)) * 10)
    model = fit_deterministic(data, p, period)
    back = add_deterministic(remove_deterministic(data, model), model)
    np.testing.assert_allclose(back.values, data.values, atol=1e-12)


def test_linear_fit_residual_small():
    t = np.arange(50)
    data = coll(np.column_stack([3 + 0.2 * t, -1 - 0.05 * t]))
    r = remove_deterministic(data, fit_deterministic(data, 1))
    assert np.max(np.abs(r.values)) < 1e-9


def test_add_zero_residuals_constant_trend():
    model = DeterministicModel(((5.0,),), scale=10)
    out = add_deterministic(coll(np.zeros(3)), model, start_index=7)
    np.testing.assert_allclose(out.values.ravel(), 5.0)


def test_add_extrapolates_trend():
    model = DeterministicModel(((0.0, 1.0),), scale=10)
    out = add_deterministic(coll(np.zeros(2)), model, start_index=10)
    np.testing.assert_allclose(out.values.ravel(), [1.0, 1.1], atol=1e-12)


def test_channel_mismatch():
    with pytest.raises(SchemaError):
        remove_deterministic(coll(np.zeros((4, 2))), DeterministicModel.zero(3))


@settings(max_examples=30)
@given(st.integers(0, 4), st.integers(0, 1000))
def test_residuals_orthogonal_to_basis(p, seed):
    rng = np.random.default_rng(seed)
    n = 120
    data = coll(rng.normal(size=(n, 2)) * 5 + np.arange(n)[:, None] * 0.3)
    r = remove_deterministic(data, fit_deterministic(data, p)).values
    tn = np.arange(n) / n
    scale = np.max(np.abs(data.values))
    for i in range(p + 1):
        assert np.all(np.abs((tn**i) @ r) < 1e-6 * n * scale)


def test_season_profile_sums_to_zero():
    rng = np.random.default_rng(1)
    t = np.arange(96)
    y = np.sin(2 * np.pi * t / 12) + 0.1 * rng.normal(size=96)
    model = fit_deterministic(coll(np.column_stack([y, 2 * y])), 1, 12)
    for prof in model.season_profile:
        assert len(prof) == 12
        assert abs(sum(prof)) < 1e-9


def test_season_period_too_long():
    with pytest.raises(DataError):
        fit_deterministic(coll(np.zeros(10)), 0, 6)
