import math
import random
import statistics

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from snipkit.stats import (
    StatsError,
    WeightedSample,
    average_ranks,
    diff_pct,
    harmonic_mean,
    mean,
    median,
    pearson,
    percentile,
    pstdev,
    spearman,
    weighted_mean,
)

# --- brute-force oracles ---------------------------------------------------


def oracle_median(xs):
    s = sorted(xs)
    n = len(s)
    return s[n // 2] if n % 2 else (s[n // 2 - 1] + s[n // 2]) / 2


def oracle_percentile(xs, p):
    s = sorted(xs)
    r = p * (len(s) - 1)
    lo = int(r)
    if lo == len(s) - 1:
        return s[lo]
    return s[lo] * (1 - (r - lo)) + s[lo + 1] * (r - lo)


def oracle_pearson(x, y):
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    cov = sum((a - mx) * (b - my) for a, b in zip(x, y))
    vx = sum((a - mx) ** 2 for a in x)
    vy = sum((b - my) ** 2 for b in y)
    return cov / math.sqrt(vx * vy)


def oracle_ranks(xs):
    # rank = 1 + (#strictly smaller) + (#ties - 1) / 2
    return [1 + sum(v < x for v in xs) + (sum(v == x for v in xs) - 1) / 2 for x in xs]


def random_inputs(n_cases=1000, seed=0):
    rng = random.Random(seed)
    for _ in range(n_cases):
        n = rng.randint(2, 40)
        if rng.random() < 0.3:
            x = [float(rng.randint(0, 5)) for _ in range(n)]  # plenty of ties
        else:
            x = [rng.uniform(-100, 100) for _ in range(n)]
        y = [rng.gauss(0.5 * v, 30) for v in x]
        yield x, y


# --- examples ---------------------------------------------------------------


def test_weighted_mean_examples():
    assert weighted_mean(WeightedSample([2, 4], [1, 1])) == 3.0
    assert weighted_mean([2, 4], [3, 1]) == 2.5
    assert weighted_mean([1.5, 2.5, 9.0], [2, 2, 2]) == pytest.approx(mean([1.5, 2.5, 9.0]), abs=1e-15)


def test_weighted_mean_errors():
    with pytest.raises(StatsError):
        weighted_mean([1, 2], [0, 0])
    with pytest.raises(StatsError):
        WeightedSample([1, 2], [1])
    with pytest.raises(StatsError):
        WeightedSample([1, 2], [1, -1])


def test_harmonic_mean_examples():
    assert harmonic_mean([3, 3, 3]) == 3.0
    assert harmonic_mean([2, 4]) == pytest.approx(8 / 3, abs=1e-15)
    assert harmonic_mean([1, 2, 3]) < mean([1, 2, 3])
    with pytest.raises(StatsError):
        harmonic_mean([1, 0])
    with pytest.raises(StatsError):
        harmonic_mean([])


def test_median_examples():
    assert median([1, 2, 4]) == 2
    assert median([1, 2, 4, 10]) == 3
    assert median([4, 1, 2]) == 2
    with pytest.raises(StatsError):
        median([])


def test_percentile_examples():
    assert percentile([10, 20, 30, 40], 0.25) == 17.5
    assert percentile([5, 1, 3], 0.5) == median([5, 1, 3])
    assert percentile([5, 1, 3], 1.0) == 5
    assert percentile([5, 1, 3], 0.0) == 1
    assert percentile([10, 20, 30, 40], 0.25, method="nearest_rank") == 10
    assert percentile([10, 20, 30, 40], 0.5, method="nearest_rank") == 20
    with pytest.raises(StatsError):
        percentile([1], 1.5)
    with pytest.raises(StatsError):
        percentile([], 0.5)
    with pytest.raises(StatsError):
        percentile([1, 2], 0.5, method="bogus")


def test_pearson_examples():
    x = [1.0, 2.0, 3.5, 7.0]
    assert pearson(x, x) == pytest.approx(1.0, abs=1e-15)
    assert pearson(x, [-v for v in x]) == pytest.approx(-1.0, abs=1e-15)
    with pytest.raises(StatsError):
        pearson([1, 1, 1], [1, 2, 3])
    with pytest.raises(StatsError):
        pearson([1], [1])
    with pytest.raises(StatsError):
        pearson([1, 2], [1, 2, 3])


def test_spearman_examples():
    x = [1.0, 2.0, 3.0, 4.0, 5.0]
    assert spearman(x, [math.exp(v) for v in x]) == pytest.approx(1.0, abs=1e-15)
    assert spearman(x, list(reversed(x))) == pytest.approx(-1.0, abs=1e-15)
    assert average_ranks([1, 2, 2, 4]) == [1, 2.5, 2.5, 4]
    with pytest.raises(StatsError):
        spearman([2, 2, 2], [1, 2, 3])


def test_diff_pct_published_totals():
    assert round(diff_pct(4_259_574, 4_460_165), 1) == -4.5
    assert round(diff_pct(8_371_042, 9_024_382), 1) == -7.2
    assert diff_pct(7.0, 7.0) == 0.0
    with pytest.raises(StatsError):
        diff_pct(1.0, 0.0)


def test_pstdev_matches_statistics():
    xs = [1.05, 0.8, 1.3, 0.95, 1.6]
    assert pstdev(xs) == pytest.approx(statistics.pstdev(xs), abs=1e-15)


# --- oracle sweeps (1000 random inputs, 1e-12) ---------------------------


def test_median_and_percentile_vs_oracle():
    rng = random.Random(9)
    for x, _ in random_inputs(seed=1):
        assert median(x) == pytest.approx(oracle_median(x), abs=1e-12)
        p = rng.random()
        assert percentile(x, p) == pytest.approx(oracle_percentile(x, p), abs=1e-12)
        assert percentile(x, p) == pytest.approx(float(np.percentile(x, 100 * p)), abs=1e-9)


def test_pearson_spearman_vs_oracle():
    checked = 0
    for x, y in random_inputs(seed=2):
        if len(set(x)) < 2 or len(set(y)) < 2:
            continue
        assert pearson(x, y) == pytest.approx(oracle_pearson(x, y), abs=1e-12)
        rho = oracle_pearson(oracle_ranks(x), oracle_ranks(y))
        assert spearman(x, y) == pytest.approx(rho, abs=1e-12)
        checked += 1
    assert checked > 900


def test_against_scipy():
    rng = np.random.default_rng(4)
    for _ in range(50):
        x = rng.normal(size=30)
        y = x + rng.normal(size=30)
        assert pearson(list(x), list(y)) == pytest.approx(sps.pearsonr(x, y)[0], abs=1e-12)
        xt = np.round(x, 0)
        assert spearman(list(xt), list(y)) == pytest.approx(sps.spearmanr(xt, y)[0], abs=1e-12)
        assert average_ranks(list(xt)) == pytest.approx(list(sps.rankdata(xt)))


def test_harmonic_le_arithmetic_sampled():
    rng = random.Random(5)
    for _ in range(1000):
        xs = [rng.uniform(0.01, 50) for _ in range(rng.randint(1, 30))]
        assert harmonic_mean(xs) <= mean(xs) * (1 + 1e-12)


# --- properties ---------------------------------------------------------

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)
positive = st.floats(min_value=1e-3, max_value=1e6, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(st.lists(positive, min_size=1, max_size=30))
def test_prop_harmonic_mean(xs):
    hm, am = harmonic_mean(xs), mean(xs)
    assert hm <= am * (1 + 1e-12)
    if max(xs) == min(xs):
        assert hm == pytest.approx(am, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.lists(finite, min_size=1, max_size=30), st.floats(0, 1), st.floats(0, 1))
def test_prop_percentile_monotone(xs, p, q):
    lo, hi = min(p, q), max(p, q)
    assert percentile(xs, lo) <= percentile(xs, hi) + 1e-9
    assert percentile(xs, 0) == min(xs)
    assert percentile(xs, 1) == max(xs)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(-50, 50), st.integers(-50, 50)), min_size=3, max_size=25))
def test_prop_correlation_symmetry_and_invariance(pairs):
    x = [float(a) for a, _ in pairs]
    y = [float(b) for _, b in pairs]
    if len(set(x)) < 2 or len(set(y)) < 2:
        return
    r = pearson(x, y)
    assert -1.0 <= r <= 1.0
    assert pearson(y, x) == pytest.approx(r, abs=1e-12)
    assert pearson([3 * v + 7 for v in x], y) == pytest.approx(r, abs=1e-9)
    rho = spearman(x, y)
    assert spearman(y, x) == pytest.approx(rho, abs=1e-12)
    assert spearman([v**3 for v in x], y) == pytest.approx(rho, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.lists(finite, min_size=2, max_size=40), st.randoms(use_true_random=False))
def test_prop_order_independent(xs, rnd):
    shuffled = list(xs)
    rnd.shuffle(shuffled)
    w = [1.0 + (i % 3) for i in range(len(xs))]
    assert mean(shuffled) == mean(xs)
    assert median(shuffled) == median(xs)
    pairs = list(zip(xs, w))
    rnd.shuffle(pairs)
    assert weighted_mean([p[0] for p in pairs], [p[1] for p in pairs]) == weighted_mean(xs, w)
