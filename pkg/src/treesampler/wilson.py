"""Loop-erased random-walk samplers.

``wilson`` draws spanning trees exactly. ``wilson_rc`` fixes the root child by
raw root-edge weight and then walks on the graph re-rooted at that child; its
output is a dependency tree but NOT from the target distribution, because the
root edge should be drawn by its marginal. ``wilson_reject`` reruns ``wilson``
until the tree has a single root child, which is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import accumulate

import numpy as np

from .errors import NoRootEdge, RetryCapExceeded, Unreachable
from .graph import ROOT, Graph, Tree, normalize_stochastic, validate_graph
from .rng import categorical_cum, make_rng

RETRY_CAP = 10_000


@dataclass
class WalkStats:
    steps_taken: int = 0
    rejections: int = 0


def unreachable_nodes(w: np.ndarray, root: int = ROOT) -> list[int]:
    """Nodes with no positive-weight path to ``root`` (reverse BFS from the root)."""
    pos = w > 0
    reached = np.zeros(len(w), dtype=bool)
    reached[root] = True
    frontier = [root]
    while frontier:
        # an edge i -> j means a walk at j can step to i
        nxt = np.flatnonzero(pos[frontier].any(axis=0) & ~reached)
        reached[nxt] = True
        frontier = nxt.tolist()
    return [int(v) for v in np.flatnonzero(~reached)]


class WilsonSampler:
    """Random-walk spanning-tree sampler with per-column cumulative weights cached.

    ``weights`` is any square matrix; ``root`` is the node the trees hang from.
    A walk at ``u`` steps to ``v`` with probability ``w[v, u] / sum_v' w[v', u]``.
    """

    def __init__(self, weights: np.ndarray, root: int = ROOT):
        self.size = len(weights)
        self.root = root
        # every node has an edge from the root in the common dense case
        others = np.arange(self.size) != root
        if not (weights[root, others] > 0).all():
            missing = [v for v in unreachable_nodes(weights, root) if v != root]
            if missing:
                raise Unreachable(missing[0])
        self.weights = weights
        # cumulative column weights, built the first time a walk reaches the column
        self.cum: list[list[float] | None] = [None] * self.size
        self.order = [u for u in range(self.size) if u != root]

    def sample(self, rng: np.random.Generator, stats: WalkStats | None = None) -> list[int]:
        """Parent list over all nodes (``-1`` at the root)."""
        parent = [-1] * self.size
        in_tree = [False] * self.size
        in_tree[self.root] = True
        cum, w = self.cum, self.weights
        steps = 0
        for i in self.order:
            u = i
            while not in_tree[u]:
                c = cum[u]
                if c is None:
                    c = cum[u] = np.cumsum(w[:, u]).tolist()
                # revisiting u overwrites its pointer, which erases the loop
                v = categorical_cum(c, rng)
                parent[u] = v
                u = v
                steps += 1
            u = i
            while not in_tree[u]:
                in_tree[u] = True
                u = parent[u]
        if stats is not None:
            stats.steps_taken += steps
        return parent


def wilson(g: Graph, rng=None) -> tuple[Tree, WalkStats]:
    """Spanning tree with probability proportional to the product of its edge weights."""
    validate_graph(g)
    stats = WalkStats()
    parent = WilsonSampler(normalize_stochastic(g).weights).sample(make_rng(rng), stats)
    return tuple(parent[1:]), stats


class RootedWilson:
    """Reusable ``wilson`` / ``wilson_rc`` / ``wilson_reject`` for one graph."""

    def __init__(self, g: Graph):
        validate_graph(g)
        self.g = g
        self._spanning: WilsonSampler | None = None
        self._rerooted: dict[int, tuple[WilsonSampler, list[int]]] = {}
        root_w = g.weights[ROOT, 1:]
        self.root_nodes = [int(j) + 1 for j in np.flatnonzero(root_w > 0)]
        self.root_cum = list(accumulate(float(g.weights[ROOT, j]) for j in self.root_nodes))

    @property
    def spanning(self) -> WilsonSampler:
        if self._spanning is None:
            self._spanning = WilsonSampler(normalize_stochastic(self.g).weights)
        return self._spanning

    def rerooted(self, j: int) -> tuple[WilsonSampler, list[int]]:
        """Sampler on the graph without the root, with node ``j`` as the new root.

        Local index 0 is ``j``; the remaining non-root nodes follow in ascending
        order. Returns the sampler and the local-to-original label map.
        """
        if j not in self._rerooted:
            labels = [j] + [v for v in range(1, self.g.n + 1) if v != j]
            sub = np.array(self.g.weights[np.ix_(labels, labels)])
            sub[:, 0] = 0.0
            try:
                self._rerooted[j] = (WilsonSampler(sub, 0), labels)
            except Unreachable as exc:
                raise Unreachable(labels[exc.j]) from None
        return self._rerooted[j]

    def wilson(self, rng: np.random.Generator) -> tuple[Tree, WalkStats]:
        stats = WalkStats()
        parent = self.spanning.sample(rng, stats)
        return tuple(parent[1:]), stats

    def wilson_rc(self, rng: np.random.Generator) -> tuple[Tree, WalkStats]:
        if not self.root_nodes:
            raise NoRootEdge()
        stats = WalkStats()
        j = self.root_nodes[categorical_cum(self.root_cum, rng)]
        sampler, labels = self.rerooted(j)
        local = sampler.sample(rng, stats)
        parents = [0] * self.g.n
        for k, v in enumerate(labels):
            parents[v - 1] = ROOT if k == 0 else labels[local[k]]
        return tuple(parents), stats

    def wilson_reject(self, rng: np.random.Generator, cap: int = RETRY_CAP) -> tuple[Tree, WalkStats]:
        stats = WalkStats()
        sampler = self.spanning
        for _ in range(cap + 1):
            parent = sampler.sample(rng, stats)
            t = tuple(parent[1:])
            if t.count(ROOT) == 1:
                return t, stats
            stats.rejections += 1
        raise RetryCapExceeded(cap)


def wilson_rc(g: Graph, rng=None) -> tuple[Tree, WalkStats]:
    """Dependency tree whose root edge is drawn by raw weight (biased)."""
    return RootedWilson(g).wilson_rc(make_rng(rng))


def wilson_reject(g: Graph, rng=None, cap: int = RETRY_CAP) -> tuple[Tree, WalkStats]:
    """Exact dependency-tree sampler: ``wilson`` with rejection of multi-root-child trees."""
    return RootedWilson(g).wilson_reject(make_rng(rng), cap)
