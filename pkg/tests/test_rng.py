import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fastmice.rng import SeedStream, derive, sample_without_replacement, uniform_int


def draws(s, n=8):
    return [uniform_int(s, 0, 2**31) for _ in range(n)]


def test_derive_same_index_is_deterministic():
    s = SeedStream(42)
    assert draws(derive(s, 0)) == draws(derive(s, 0))


def test_derive_different_index_separates():
    s = SeedStream(42)
    assert draws(derive(s, 0)) != draws(derive(s, 1))


def test_child_ignores_parent_consumption():
    s = SeedStream(9, (3,))
    before = draws(derive(s, 5))
    draws(s, 100)
    assert draws(derive(s, 5)) == before


def test_path_keyed():
    assert draws(derive(derive(SeedStream(1), 2), 3)) == draws(SeedStream(1, (2, 3)))
    assert draws(SeedStream(1, (2, 3))) != draws(SeedStream(2, (2, 3)))


def test_rejects_bad_seed():
    with pytest.raises(ValueError):
        SeedStream(-1)
    with pytest.raises(ValueError):
        SeedStream(2**64)


def test_uniform_int_degenerate():
    assert uniform_int(SeedStream(0), 3, 3) == 3


def test_uniform_int_empty_range():
    with pytest.raises(ValueError):
        uniform_int(SeedStream(0), 4, 3)


def test_uniform_int_frequencies_within_5_sigma():
    s = SeedStream(2024)
    v, n = 6, 100_000
    counts = np.bincount([uniform_int(s, 1, v) for _ in range(n)], minlength=v + 1)[1:]
    p = 1.0 / v
    sigma = np.sqrt(n * p * (1 - p))
    assert np.all(np.abs(counts - n * p) <= 5 * sigma)


def test_uniform_int_01_mean():
    s = SeedStream(77)
    vals = [uniform_int(s, 0, 1) for _ in range(100_000)]
    assert abs(np.mean(vals) - 0.5) <= 0.01


def test_full_sample_is_permutation():
    assert sorted(sample_without_replacement(SeedStream(0), 5, 5).tolist()) == [0, 1, 2, 3, 4]


def test_single_sample_in_range():
    (i,) = sample_without_replacement(SeedStream(0), 10, 1)
    assert 0 <= i < 10


def test_oversample_rejected():
    with pytest.raises(ValueError):
        sample_without_replacement(SeedStream(0), 3, 4)
    with pytest.raises(ValueError):
        sample_without_replacement(SeedStream(0), 3, 0)


def test_distinctness_over_random_cases():
    root = SeedStream(5)
    gen = np.random.default_rng(5)
    for case in range(1000):
        n = int(gen.integers(1, 200))
        m = int(gen.integers(1, n + 1))
        idx = sample_without_replacement(derive(root, case), n, m)
        assert idx.size == m
        assert np.unique(idx).size == m
        assert idx.min() >= 0 and idx.max() < n


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**64 - 1), path=st.lists(st.integers(0, 1000), max_size=4))
def test_same_seed_path_same_sequence(seed, path):
    assert draws(SeedStream(seed, tuple(path))) == draws(SeedStream(seed, tuple(path)))
