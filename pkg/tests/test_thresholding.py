import math
import statistics

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from minipatch.thresholding import KdeConfig, fixed_select, kde_threshold, oracle_select


def direct_kde_minima(values, grid_points=512):
    """Plain-Python KDE on the [0, 1] grid and its strict interior local minima."""
    h = statistics.stdev(values)
    grid = [i / (grid_points - 1) for i in range(grid_points)]
    f = [sum(math.exp(-(x - v) ** 2 / (2 * h * h)) for v in values) / len(values) for x in grid]
    return [grid[i] for i in range(1, grid_points - 1) if f[i] < f[i - 1] and f[i] < f[i + 1]]


def test_equal_frequencies_fall_back():
    assert kde_threshold(np.full(20, 0.37)) == 0.5


def test_bimodal_threshold_matches_direct_evaluation():
    freq = [0.9] * 10 + [0.05] * 90
    thr = kde_threshold(freq)
    assert thr == pytest.approx(min(direct_kde_minima(freq)), abs=0)
    # frozen from the direct evaluation above
    assert thr == pytest.approx(0.8043052837573386, abs=1e-12)
    assert 0.05 < thr < 0.9
    sel = fixed_select(freq, thr)
    np.testing.assert_array_equal(sel, np.arange(10))


def test_unimodal_falls_back(rng):
    freq = np.clip(0.3 + 0.02 * rng.standard_normal(60), 0, 1)
    assert direct_kde_minima(freq.tolist()) == []
    assert kde_threshold(freq) == 0.5


def test_custom_fallback():
    assert kde_threshold([0.2, 0.2, 0.2], KdeConfig(fallback_thr=0.7)) == 0.7


def test_kde_config_validation():
    with pytest.raises(ValueError):
        KdeConfig(grid_points=8)
    with pytest.raises(ValueError):
        kde_threshold([0.5])


def bimodal(rng, a, b, p, q, jitter):
    low = np.clip(a + jitter * rng.standard_normal(p), 0, 1)
    high = np.clip(b + jitter * rng.standard_normal(q), 0, 1)
    return low, high, np.concatenate([low, high])


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), a=st.floats(0.0, 0.4), b=st.floats(0.5, 1.0),
       p=st.integers(20, 200), q=st.integers(1, 12))
def test_separates_well_gapped_clusters(seed, a, b, p, q):
    rng = np.random.default_rng(seed)
    low, high, freq = bimodal(rng, a, b, p, q, jitter=0.005)
    h = freq.std(ddof=1)
    assume(high.min() - low.max() >= 4 * h)
    thr = kde_threshold(freq)
    assert low.max() < thr < high.min()


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=2, max_size=60))
def test_threshold_in_unit_interval(freq):
    thr = kde_threshold(freq)
    assert 0 < thr < 1
    grid = np.linspace(0, 1, 512)
    assert thr == 0.5 or np.any(grid == thr)


def test_fixed_inclusive_boundary():
    np.testing.assert_array_equal(fixed_select([0.5, 0.49], 0.5), [0])


def test_fixed_all_zero():
    assert fixed_select(np.zeros(5), 0.5).size == 0


def test_fixed_matches_brute_force(rng):
    freq = rng.random(200)
    expected = [j for j in range(200) if freq[j] >= 0.37]
    np.testing.assert_array_equal(fixed_select(freq, 0.37), expected)


def test_fixed_rejects_bad_threshold():
    with pytest.raises(ValueError):
        fixed_select([0.1], 1.0)


def test_oracle_all():
    np.testing.assert_array_equal(oracle_select([0.1, 0.4, 0.2], 3), [0, 1, 2])


def test_oracle_small_example():
    np.testing.assert_array_equal(oracle_select([0.9, 0.1, 0.8], 2), [0, 2])


def test_oracle_matches_sort(rng):
    freq = rng.random(50)
    expected = sorted(sorted(range(50), key=lambda j: (-freq[j], j))[:5])
    np.testing.assert_array_equal(oracle_select(freq, 5), expected)


def test_oracle_ties_prefer_lower_index():
    np.testing.assert_array_equal(oracle_select([0.5, 0.7, 0.5, 0.5], 2), [0, 1])


def test_oracle_rejects_bad_cardinality():
    with pytest.raises(ValueError):
        oracle_select([0.1, 0.2], 3)
    with pytest.raises(ValueError):
        oracle_select([0.1, 0.2], 0)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), M=st.integers(2, 40))
def test_selection_permutation_equivariant(seed, M):
    rng = np.random.default_rng(seed)
    freq = rng.random(M)  # continuous, so no ties
    perm = rng.permutation(M)
    inv = np.argsort(perm)
    s = int(rng.integers(1, M + 1))
    assert set(perm[oracle_select(freq[perm], s)]) == set(oracle_select(freq, s))
    assert set(perm[fixed_select(freq[perm], 0.5)]) == set(fixed_select(freq, 0.5))
    assert np.array_equal(freq[perm][inv], freq)
