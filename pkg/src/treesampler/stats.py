"""Empirical tree distributions and the tests that compare them with exact ones."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats as sps

from .errors import ForeignTree
from .graph import Tree, canonical_key
from .oracle import ExactDistribution

ALPHA = 1e-3
MIN_EXPECTED = 5.0
NORMAL_APPROX_ABOVE = 1000


@dataclass
class EmpiricalDistribution:
    counts: Counter
    total: int

    def freq(self, t) -> float:
        return self.counts.get(canonical_key(t), 0) / self.total

    @classmethod
    def from_trees(cls, trees) -> "EmpiricalDistribution":
        counts = Counter(canonical_key(t) for t in trees)
        total = sum(counts.values())
        if total < 1:
            raise ValueError("empty sample")
        return cls(counts, total)

    @classmethod
    def from_array(cls, parents: np.ndarray) -> "EmpiricalDistribution":
        """From a (samples, n) integer parent array, e.g. a batched sampler's output."""
        rows, counts = np.unique(np.asarray(parents), axis=0, return_counts=True)
        if counts.sum() < 1:
            raise ValueError("empty sample")
        return cls(Counter({canonical_key(r): int(c) for r, c in zip(rows, counts)}), int(counts.sum()))


def collect(sampler: Callable[[np.random.Generator], Tree], n_samples: int, rng) -> EmpiricalDistribution:
    """Tally ``n_samples`` calls of ``sampler(rng)``; a tuple result's first item is the tree."""
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    counts: Counter = Counter()
    for _ in range(n_samples):
        out = sampler(rng)
        if isinstance(out, tuple) and out and isinstance(out[0], tuple):
            out = out[0]
        counts[canonical_key(out)] += 1
    return EmpiricalDistribution(counts, n_samples)


@dataclass
class GofReport:
    statistic: float
    dof: int
    p_value: float
    tv_distance: float
    reject: bool
    cells: int

    def line(self) -> str:
        verdict = "REJECT" if self.reject else "ok"
        return (
            f"chi2={self.statistic:.3f} dof={self.dof} p={self.p_value:.4g} "
            f"tv={self.tv_distance:.4f} {verdict}"
        )


def tv_distance(emp: EmpiricalDistribution, exact: ExactDistribution) -> float:
    keys = set(emp.counts) | set(exact.entries)
    return 0.5 * sum(abs(emp.counts.get(k, 0) / emp.total - exact.prob(k)) for k in keys)


def _merge_cells(observed: list[float], expected: list[float]) -> tuple[list[float], list[float]]:
    """Pool cells with expected count below MIN_EXPECTED, smallest first.

    Cells are visited in ascending (expected, index) order so the pooling is
    deterministic. If the pool is still too small it absorbs the next smallest
    cell until it is large enough.
    """
    order = sorted(range(len(expected)), key=lambda k: (expected[k], k))
    pool_o = pool_e = 0.0
    pooled = False
    keep = []
    for k in order:
        if expected[k] < MIN_EXPECTED or (pooled and pool_e < MIN_EXPECTED):
            pool_o += observed[k]
            pool_e += expected[k]
            pooled = True
        else:
            keep.append(k)
    obs = [observed[k] for k in keep]
    exp = [expected[k] for k in keep]
    if pooled:
        obs.append(pool_o)
        exp.append(pool_e)
    return obs, exp


def chi_square_gof(emp: EmpiricalDistribution, exact: ExactDistribution, alpha: float = ALPHA) -> GofReport:
    """Pearson goodness of fit of ``emp`` against ``exact``.

    Raises ForeignTree if any observed tree is outside the exact support.
    """
    for key in emp.counts:
        if key not in exact.entries:
            raise ForeignTree(key)
    keys = list(exact.entries)
    observed = [float(emp.counts.get(k, 0)) for k in keys]
    expected = [exact.entries[k].probability * emp.total for k in keys]
    obs, exp = _merge_cells(observed, expected)
    cells = len(obs)
    if cells < 2:
        stat, p = 0.0, 1.0
    else:
        o, e = np.array(obs), np.array(exp)
        stat = float(((o - e) ** 2 / e).sum())
        p = float(sps.chi2.sf(stat, cells - 1))
    tv = tv_distance(emp, exact)
    return GofReport(stat, max(cells - 1, 1), p, tv, p < alpha, cells)


def binomial_two_sided(successes: int, total: int, p0: float) -> float:
    """Two-sided p-value for H0: rate = p0 (normal approximation above 1000 trials)."""
    if not 0 <= successes <= total or not 0 < p0 < 1:
        raise ValueError("need 0 <= successes <= total and 0 < p0 < 1")
    if total > NORMAL_APPROX_ABOVE:
        z = (successes - total * p0) / math.sqrt(total * p0 * (1 - p0))
        return float(math.erfc(abs(z) / math.sqrt(2)))
    return float(sps.binomtest(successes, total, p0).pvalue)
