"""Brute-force ground truth for small graphs.

Enumerates every parent assignment over positive-weight edges and keeps the
acyclic ones. Exponential in ``n``; guarded by ``cap``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import EmptySupport, SupportExhausted, TooLarge
from .graph import ROOT, Graph, Tree, TreeKind, canonical_key, is_acyclic, tree_weight

ENUM_CAP = 8
SUPPORT_TOL = 1e-12


@dataclass(frozen=True)
class Entry:
    tree: Tree
    weight: float
    probability: float


@dataclass(frozen=True)
class ExactDistribution:
    kind: TreeKind
    entries: dict  # canonical key -> Entry, in key order
    z: float

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, t) -> bool:
        return canonical_key(t) in self.entries

    def prob(self, t) -> float:
        e = self.entries.get(canonical_key(t))
        return e.probability if e else 0.0

    def trees(self) -> list[Tree]:
        return [e.tree for e in self.entries.values()]

    def restrict(self, edges) -> "ExactDistribution":
        """Distribution over the trees that contain every ``(i, j)`` in ``edges``."""
        kept = [e for e in self.entries.values() if all(e.tree[j - 1] == i for i, j in edges)]
        return _build(self.kind, [(e.tree, e.weight) for e in kept])

    def marginals(self, n: int) -> np.ndarray:
        out = np.zeros((n + 1, n + 1))
        for e in self.entries.values():
            for j, p in enumerate(e.tree, start=1):
                out[p, j] += e.probability
        return out


def _build(kind: TreeKind, weighted: list[tuple[Tree, float]]) -> ExactDistribution:
    z = float(sum(w for _, w in weighted))
    if z <= 0:
        raise EmptySupport(kind.value)
    entries = {
        canonical_key(t): Entry(canonical_key(t), w, w / z)
        for t, w in sorted(weighted, key=lambda tw: canonical_key(tw[0]))
    }
    return ExactDistribution(kind, entries, z)


def enumerate_trees(g: Graph, kind: TreeKind = TreeKind.SPANNING, cap: int = ENUM_CAP) -> list[Tree]:
    """All trees of ``g`` of the given kind with positive weight, sorted by key."""
    if g.n > cap:
        raise TooLarge(g.n, cap)
    kind = TreeKind.parse(kind)
    w = g.weights
    choices = [
        [int(i) for i in np.flatnonzero(w[:, j] > 0) if i != j] for j in range(1, g.n + 1)
    ]
    out = []
    for t in itertools.product(*choices):
        if kind is TreeKind.DEPENDENCY and t.count(ROOT) != 1:
            continue
        if is_acyclic(t):
            out.append(t)
    return sorted(out)


def exact_distribution(
    g: Graph, kind: TreeKind = TreeKind.SPANNING, cap: int = ENUM_CAP
) -> ExactDistribution:
    kind = TreeKind.parse(kind)
    return _build(kind, [(t, tree_weight(g, t)) for t in enumerate_trees(g, kind, cap)])


def exact_marginals(g: Graph, kind: TreeKind = TreeKind.SPANNING, cap: int = ENUM_CAP) -> np.ndarray:
    """Entry ``(i, j)`` is the probability that a random tree contains ``i -> j``."""
    return exact_distribution(g, kind, cap).marginals(g.n)


def exact_swor_conditional(
    g: Graph,
    drawn,
    kind: TreeKind = TreeKind.DEPENDENCY,
    cap: int = ENUM_CAP,
) -> ExactDistribution:
    """Distribution over the trees not in ``drawn``, renormalised by what remains."""
    full = exact_distribution(g, kind, cap)
    seen = {canonical_key(t) for t in drawn}
    rest = [(e.tree, e.weight) for k, e in full.entries.items() if k not in seen]
    z_d = full.z - sum(full.entries[k].weight for k in seen if k in full.entries)
    if not rest or z_d <= SUPPORT_TOL * full.z:
        raise SupportExhausted(len(full))
    dist = _build(full.kind, rest)
    return dist
