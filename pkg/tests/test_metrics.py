import numpy as np
import pytest
from hypothesis import given, strategies as st

from karma.core import ParameterError
from karma.metrics import SNR_CAP, build_report, compute_pq, compute_snr, pq_norm

pos = st.floats(1e-3, 1e3)


def test_snr_examples():
    snr, _ = compute_snr([1, -1, 1, -1], 0.25, [1, 2], [0, 0])
    assert snr == pytest.approx(4.0)
    snr, _ = compute_snr([1, -1, 1, -1], 1.0, [1, 2], [0, 0])
    assert snr == pytest.approx(1.0)


def test_perfect_horizon_is_capped_and_flagged():
    flags = []
    _, snr_k = compute_snr([1, -1], 1.0, [1.0, 2.0, 3.0], [1.0, 2.0, 3.0], flags)
    assert snr_k == SNR_CAP
    assert flags


def test_snr_uses_population_variance():
    x = np.array([1.0, 2.0, 4.0])
    snr, snr_k = compute_snr(x, 1.0, x, np.zeros(3))
    assert snr == pytest.approx(np.var(x))
    assert snr_k == pytest.approx(1.0)


def test_pq_examples():
    assert compute_pq([16.0], 1.0, 4.0, 4.0) == pytest.approx(50.0)
    assert compute_pq([0.0], 1.0, 4.0, 4.0) == pytest.approx(100.0)
    assert compute_pq([4.0, 5.0], 3.0, 1.0, 1.0) == pytest.approx(50.0)


@pytest.mark.parametrize("args", [(0.0, 1.0, 1.0), (1.0, 0.0, 1.0), (1.0, 1.0, -1.0)])
def test_pq_rejects_non_positive(args):
    with pytest.raises(ParameterError):
        compute_pq([1.0], *args)


def test_pq_norm_reference_values():
    assert pq_norm([49.59, 70.18, 79.47, 71.70]) == pytest.approx(137.26, abs=0.01)
    assert pq_norm([46.00, 62.65, 65.12, 63.23]) == pytest.approx(119.50, abs=0.01)
    assert pq_norm([0, 0, 0]) == 0.0


@given(pos, pos, pos, pos, st.floats(1.01, 10))
def test_pq_monotone(total, lam, snr, snr_k, f):
    base = compute_pq([total], lam, snr, snr_k)
    assert 0 < base <= 100
    assert compute_pq([total * f], lam, snr, snr_k) < base
    assert compute_pq([total], lam * f, snr, snr_k) > base
    assert compute_pq([total], lam, snr * f, snr_k) > base
    assert compute_pq([total], lam, snr, snr_k * f) > base


@given(st.lists(st.floats(0, 100), min_size=1, max_size=6), st.floats(-5, 5), st.randoms())
def test_pq_norm_symmetry(v, c, r):
    shuffled = list(v)
    r.shuffle(shuffled)
    assert pq_norm(shuffled) == pytest.approx(pq_norm(v), rel=1e-12, abs=1e-12)
    assert pq_norm(np.multiply(c, v)) == pytest.approx(abs(c) * pq_norm(v), rel=1e-12, abs=1e-9)


def test_build_report(rng):
    measured = rng.normal(size=(100, 3))
    truth = rng.normal(size=(10, 3))
    pred = truth + 0.5 * rng.normal(size=(10, 3))
    sig = np.full((10, 3), 0.5)
    r = build_report(measured, truth, pred, sig, np.ones(3))
    assert r.sigma_pred.shape == (3, 10)
    assert r.K == 10 and r.Ny == 100
    assert np.all((0 <= r.pq) & (r.pq <= 100))
    assert r.pq_norm == pytest.approx(np.linalg.norm(r.pq), abs=1e-12)
    for j in range(3):
        s, sk = compute_snr(measured[:, j], 0.5, truth[:, j], pred[:, j])
        assert r.pq[j] == pytest.approx(compute_pq(sig[:, j], 1.0, s, sk))
    assert set(r.to_dict()) >= {"pq", "pq_norm", "snr_measured", "snr_horizon"}
