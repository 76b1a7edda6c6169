"""Random sources.

Every sampler takes a ``numpy.random.Generator``. ``make_rng`` accepts a seed
or an existing generator. ``spawn_rng(seed, index)`` derives the stream for the
``index``-th sample of a run from ``SeedSequence(seed, spawn_key=(index,))``, so
sample ``k`` does not depend on how many samples came before it. Same seed,
same platform and build give the same sequence.
"""

from __future__ import annotations

from bisect import bisect_right

import numpy as np


def make_rng(seed=None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def spawn_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def categorical(weights, rng: np.random.Generator) -> int:
    """Index drawn with probability proportional to ``weights``; zero entries never chosen."""
    cum = np.asarray(weights).cumsum()
    k = int(cum.searchsorted(rng.random() * cum[-1], side="right"))
    if k >= len(cum):
        k = int(np.flatnonzero(np.asarray(weights) > 0)[-1])
    return k


def categorical_cum(cum: list[float], rng: np.random.Generator) -> int:
    """Same as ``categorical`` but on a precomputed cumulative list (pure Python, fast)."""
    k = bisect_right(cum, rng.random() * cum[-1])
    if k >= len(cum):
        k = len(cum) - 1
        while k > 0 and cum[k] == cum[k - 1]:
            k -= 1
    return k
