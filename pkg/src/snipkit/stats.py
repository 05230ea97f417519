"""Statistical kernels used by the indicators and the comparison reports.

All sums go through :func:`math.fsum`, so results do not depend on the
order of the input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence


class StatsError(ValueError):
    pass


@dataclass(frozen=True)
class WeightedSample:
    values: Sequence[float]
    weights: Sequence[float]

    def __post_init__(self):
        if len(self.values) != len(self.weights):
            raise StatsError("values and weights differ in length")
        if any(w < 0 for w in self.weights):
            raise StatsError("negative weight")


def mean(values: Sequence[float]) -> float:
    if len(values) == 0:
        raise StatsError("mean of empty sequence")
    return math.fsum(values) / len(values)


def weighted_mean(sample: WeightedSample | Sequence[float], weights: Sequence[float] | None = None) -> float:
    """Sum of w*x over sum of w. Accepts a WeightedSample or (values, weights)."""
    if not isinstance(sample, WeightedSample):
        sample = WeightedSample(list(sample), list(weights if weights is not None else [1.0] * len(sample)))
    total = math.fsum(sample.weights)
    if total <= 0:
        raise StatsError("weight sum must be positive")
    return math.fsum(w * x for x, w in zip(sample.values, sample.weights)) / total


def harmonic_mean(values: Sequence[float]) -> float:
    if len(values) == 0:
        raise StatsError("harmonic mean of empty sequence")
    if any(v <= 0 for v in values):
        raise StatsError("harmonic mean needs strictly positive values")
    return len(values) / math.fsum(1.0 / v for v in values)


def median(values: Sequence[float]) -> float:
    """Middle order statistic; the mean of the two central values for even counts."""
    if len(values) == 0:
        raise StatsError("median of empty sequence")
    s = sorted(values)
    n = len(s)
    mid = n // 2
    if n % 2:
        return float(s[mid])
    return (s[mid - 1] + s[mid]) / 2.0


def percentile(values: Sequence[float], p: float, method: str = "linear") -> float:
    """Percentile at fraction ``p`` in [0, 1].

    ``linear`` interpolates between order statistics at zero-based rank
    p*(n-1). ``nearest_rank`` returns the ceil(p*n)-th smallest value.
    """
    if len(values) == 0:
        raise StatsError("percentile of empty sequence")
    if not 0.0 <= p <= 1.0:
        raise StatsError(f"p outside [0, 1]: {p}")
    s = sorted(values)
    n = len(s)
    if method == "linear":
        rank = p * (n - 1)
        lo = math.floor(rank)
        hi = min(lo + 1, n - 1)
        frac = rank - lo
        if frac == 0.0:
            return float(s[lo])
        return s[lo] + (s[hi] - s[lo]) * frac
    if method == "nearest_rank":
        idx = max(1, math.ceil(p * n))
        return float(s[idx - 1])
    raise StatsError(f"unknown percentile method {method!r}")


def pstdev(values: Sequence[float]) -> float:
    """Population standard deviation."""
    m = mean(values)
    return math.sqrt(math.fsum((v - m) ** 2 for v in values) / len(values))


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    if len(x) != len(y):
        raise StatsError("x and y differ in length")
    if len(x) < 2:
        raise StatsError("need at least two pairs")
    mx, my = mean(x), mean(y)
    dx = [v - mx for v in x]
    dy = [v - my for v in y]
    sxx = math.fsum(d * d for d in dx)
    syy = math.fsum(d * d for d in dy)
    if sxx == 0 or syy == 0:
        raise StatsError("degenerate variance")
    r = math.fsum(a * b for a, b in zip(dx, dy)) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def average_ranks(values: Sequence[float]) -> list[float]:
    """1-based ranks; tied values share the mean of the ranks they span."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    if len(x) != len(y):
        raise StatsError("x and y differ in length")
    if len(x) < 2:
        raise StatsError("need at least two pairs")
    return pearson(average_ranks(x), average_ranks(y))


def diff_pct(m: float, o: float) -> float:
    """Percentage difference 100*(m - o)/o of a modified value against an original one."""
    if o == 0:
        raise StatsError("original value is zero")
    return 100.0 * (m - o) / o
