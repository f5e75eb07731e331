import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shofa.errors import InvalidArgument, UndefinedRatio
from shofa.signal import (NoiseSpec, SparseVector, add_tail, make_rng, make_sparse_signal,
                          relative_l1_error)


def test_zero_sparsity():
    x = make_sparse_signal(5, 0, "gaussian", seed=1)
    assert x.length == 5 and x.nnz == 0


def test_unit_values_large():
    x = make_sparse_signal(1000, 150, "constant-1", seed=7)
    assert x.nnz == 150 and np.all(x.values == 1.0)


def test_full_support():
    x = make_sparse_signal(8, 8, "gaussian", seed=3)
    assert x.support() == set(range(8))


def test_k_above_n_rejected():
    with pytest.raises(InvalidArgument):
        make_sparse_signal(4, 5)


def test_deterministic_per_seed():
    a = make_sparse_signal(100, 10, "gaussian", seed=(4, 2))
    b = make_sparse_signal(100, 10, "gaussian", seed=(4, 2))
    assert np.array_equal(a.indices, b.indices) and np.array_equal(a.values, b.values)


def test_rng_is_philox():
    assert isinstance(make_rng(0).bit_generator, np.random.Philox)


@pytest.mark.parametrize("gen", ["ones", "gaussian", "signs", "uniform", lambda r, k: r.random(k) + 1])
def test_value_generators(gen):
    x = make_sparse_signal(50, 12, gen, seed=0)
    assert x.nnz == 12 and np.all(x.values != 0)


def test_generator_emitting_zero_rejected():
    with pytest.raises(InvalidArgument):
        make_sparse_signal(10, 3, lambda r, k: np.zeros(k))


def test_sparse_vector_validation():
    with pytest.raises(InvalidArgument):
        SparseVector(5, [3, 1], [1.0, 2.0])
    with pytest.raises(InvalidArgument):
        SparseVector(5, [1, 5], [1.0, 2.0])
    with pytest.raises(InvalidArgument):
        SparseVector(5, [1], [0.0])


def test_tail_zero_noise_is_copy():
    x = make_sparse_signal(30, 4, "gaussian", seed=1)
    assert np.array_equal(add_tail(x, NoiseSpec(0.0), seed=2), x.to_dense())


def test_tail_full_support_untouched():
    x = make_sparse_signal(8, 8, "gaussian", seed=1)
    assert np.array_equal(add_tail(x, NoiseSpec(1.0), seed=5), x.to_dense())


def test_tail_mean_over_seeds():
    n = 64
    x = SparseVector.zeros(n)
    means = np.array([add_tail(x, NoiseSpec(1.0), seed=s).mean() for s in range(10_000)])
    # each sample mean has std 1/sqrt(n); the average of 10^4 of them is far tighter
    assert abs(means.mean()) < 5 / np.sqrt(n)
    assert np.all(np.abs(means) < 6 / np.sqrt(n))


def test_tail_std_within_three_percent():
    x = make_sparse_signal(1_000_000, 100, seed=0)
    t = add_tail(x, NoiseSpec(0.25), seed=9)
    mask = np.ones(x.length, bool)
    mask[x.indices] = False
    assert abs(t[mask].std() / 0.25 - 1) < 0.03


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 200), st.data())
def test_tail_disjoint_from_support(n, data):
    k = data.draw(st.integers(0, n))
    seed = data.draw(st.integers(0, 2 ** 32))
    x = make_sparse_signal(n, k, "gaussian", seed=seed)
    diff = add_tail(x, NoiseSpec(1.0), seed=seed + 1) - x.to_dense()
    assert np.all(diff[x.indices] == 0)


def test_noise_spec_rejects_negative():
    with pytest.raises(InvalidArgument):
        NoiseSpec(-1.0)
    assert NoiseSpec().exact and not NoiseSpec(0, 0.1).exact


def test_rel_l1_hand_values():
    assert relative_l1_error([2, 0], [1, 0]) == 0.5
    assert relative_l1_error([1, 1, 1], [1, 1, 0]) == pytest.approx(1 / 3)
    x = make_sparse_signal(20, 5, "gaussian", seed=1)
    assert relative_l1_error(x, x) == 0


def test_rel_l1_zero_cases():
    assert relative_l1_error([0, 0], [0, 0]) == 0
    with pytest.raises(UndefinedRatio):
        relative_l1_error([0, 0], [1, 0])
    with pytest.raises(InvalidArgument):
        relative_l1_error([1, 0], [1])


vec = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=1, max_size=20)


@given(vec, st.data(), st.floats(1e-3, 1e3))
def test_rel_l1_properties(a, data, scale):
    b = data.draw(st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=len(a), max_size=len(a)))
    a, b = np.array(a), np.array(b)
    if np.abs(a).sum() == 0:
        return
    r = relative_l1_error(a, b)
    assert r >= 0
    assert (r == 0) == np.array_equal(a, b)
    assert relative_l1_error(scale * a, scale * b) == pytest.approx(r, rel=1e-9, abs=1e-12)
