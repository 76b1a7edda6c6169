"""Sampling trees without replacement.

Each draw is an ancestral pass like ``colbourn`` whose edge probabilities are
renormalised over the trees not drawn yet::

    p(i -> j | D) = (Z * p(i -> j) - sum of w(t) for drawn t containing i -> j) / Z_D

``Z`` and ``Z_D`` are conditioned along with the Laplacian; ``active`` holds the
drawn trees that agree with every edge fixed so far in the current draw.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .colbourn import BatchState, LaplacianState, batch_categorical, build_laplacian, condition, raw_marginals
from .errors import SupportExhausted
from .graph import Graph, Tree, TreeKind, canonical_key, tree_weight
from .rng import categorical, make_rng

NEG_TOL = 1e-9
SUM_TOL = 1e-6
# Z_D below this fraction of the unconditioned Z counts as nothing left.
SUPPORT_TOL = 1e-10


@dataclass
class SworState:
    lap: LaplacianState
    drawn: list[tuple[Tree, float]]
    z_total: float
    z_d: float
    active: list[tuple[Tree, float]] = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.lap.n


def new_swor_state(g: Graph, kind: TreeKind = TreeKind.DEPENDENCY, drawn=()) -> SworState:
    """State ready for a draw given previously drawn trees (weights computed here once)."""
    lap = build_laplacian(g, kind)
    pairs = [(canonical_key(t), tree_weight(g, t)) for t in drawn]
    z_d = lap.z - sum(w for _, w in pairs)
    return SworState(lap, pairs, lap.z, z_d, list(pairs))


def swor_edge_marginals(state: SworState, g: Graph | None, j: int) -> np.ndarray:
    """Probabilities of each head for ``j`` given the fixed edges and the drawn trees."""
    if state.z_d <= SUPPORT_TOL * state.z_total:
        raise SupportExhausted(len(state.drawn), detail=f"Z_D = {state.z_d:.3e}")
    m = state.lap.z * raw_marginals(state.lap, j)
    for t, w in state.active:
        m[t[j - 1]] -= w
    m /= state.z_d
    # subtracting drawn weights cancels; roundoff grows with Z_total / Z_D
    if m.min() < -NEG_TOL * max(1.0, state.z_total / state.z_d):
        raise SupportExhausted(len(state.drawn), detail=f"negative marginal {m.min():.3e}")
    np.maximum(m, 0.0, out=m)
    total = m.sum()
    if total <= SUM_TOL:
        raise SupportExhausted(len(state.drawn), detail="no mass left in column")
    return m


def swor_condition(state: SworState, g: Graph | None, edge: tuple[int, int]) -> None:
    """Fix ``edge`` for the current draw and update Z, active trees and Z_D."""
    i, j = edge
    condition(state.lap, g, edge)
    state.active = [(t, w) for t, w in state.active if t[j - 1] == i]
    state.z_d = state.lap.z - sum(w for _, w in state.active)


@dataclass
class SworResult:
    """Trees with their conditional probabilities; ``exhaustion`` is set when the support ran out."""

    samples: list[tuple[Tree, float]]
    requested: int
    exhaustion: SupportExhausted | None = None

    @property
    def exhausted(self) -> bool:
        return self.exhaustion is not None

    @property
    def trees(self) -> list[Tree]:
        return [t for t, _ in self.samples]


class SworSampler:
    """Keeps the pristine Laplacian; every draw starts from a copy of it."""

    def __init__(self, g: Graph, kind: TreeKind = TreeKind.DEPENDENCY):
        self.g = g
        self.kind = TreeKind.parse(kind)
        self.pristine = build_laplacian(g, self.kind)
        self.drawn: list[tuple[Tree, float]] = []
        self.seen: set[Tree] = set()

    @property
    def z_total(self) -> float:
        return self.pristine.z

    def remaining(self) -> float:
        """Z_D from the cached weights, not from accumulated subtractions."""
        return self.pristine.z - sum(w for _, w in self.drawn)

    def begin_draw(self) -> SworState:
        return SworState(
            self.pristine.copy(), list(self.drawn), self.pristine.z, self.remaining(), list(self.drawn)
        )

    def draw(self, rng: np.random.Generator, trace: list | None = None, on_condition=None) -> tuple[Tree, float]:
        """Draw one unseen tree; returns it with its probability given the earlier draws.

        ``on_condition(state, edge)`` runs after every conditioning step (used by tests).
        """
        state = self.begin_draw()
        z_d0 = state.z_d
        if z_d0 <= SUPPORT_TOL * state.z_total:
            raise SupportExhausted(len(self.drawn))
        n = self.g.n
        parents = [0] * n
        for j in range(1, n + 1):
            m = swor_edge_marginals(state, self.g, j)
            i = categorical(m, rng)
            parents[j - 1] = i
            if trace is not None:
                trace.append(m[i] / m.sum())
            swor_condition(state, self.g, (i, j))
            if on_condition is not None:
                on_condition(state, (i, j))
        t = tuple(parents)
        if t in self.seen:
            raise SupportExhausted(len(self.drawn), detail="redrew an already drawn tree")
        w = tree_weight(self.g, t)
        self.drawn.append((t, w))
        self.seen.add(t)
        return t, w / z_d0


def swor(g: Graph, kind: TreeKind = TreeKind.DEPENDENCY, k: int = 1, rng=None) -> SworResult:
    """Up to ``k`` distinct trees; ``exhausted`` is set when fewer than ``k`` exist."""
    if k < 1:
        raise ValueError("k must be at least 1")
    rng = make_rng(rng)
    sampler = SworSampler(g, kind)
    result = SworResult([], k)
    for _ in range(k):
        try:
            result.samples.append(sampler.draw(rng))
        except SupportExhausted as exc:
            result.exhaustion = SupportExhausted(len(result.samples), detail=exc.detail)
            break
    return result


def swor_batch(
    g: Graph, kind: TreeKind = TreeKind.DEPENDENCY, k: int = 1, rng=None, runs: int = 1
) -> tuple[np.ndarray, np.ndarray]:
    """``runs`` independent ``swor`` runs, vectorised.

    Returns ``(parents, probs)`` of shapes (runs, k, n) and (runs, k). Draws past
    a run's support are marked with parents ``-1`` and probability ``nan``. With
    ``runs=1`` the result matches ``swor`` for the same generator state.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    rng = make_rng(rng)
    pristine = build_laplacian(g, kind)
    n = g.n
    w = g.weights
    z_total = pristine.z
    parents = np.full((runs, k, n), -1, dtype=np.int64)
    probs = np.full((runs, k), np.nan)
    drawn_w = np.zeros((runs, k))
    live = np.ones(runs, dtype=bool)
    for d in range(k):
        z_d0 = z_total - drawn_w[:, :d].sum(axis=1)
        live &= z_d0 > SUPPORT_TOL * z_total
        if not live.any():
            break
        idx = np.flatnonzero(live)
        size = len(idx)
        batch = BatchState.replicate(pristine, size)
        prev = parents[idx, :d]
        prev_w = drawn_w[idx, :d]
        active = np.ones((size, d), dtype=bool)
        z_d = z_d0[idx].copy()
        rows = np.arange(size)
        weight = np.ones(size)
        for j in range(1, n + 1):
            c = j - 1
            m = batch.z[:, None] * batch.raw_marginals(j)
            for e in range(d):
                np.subtract.at(m, (rows, prev[:, e, c]), prev_w[:, e] * active[:, e])
            m /= z_d[:, None]
            tol = NEG_TOL * np.maximum(1.0, z_total / z_d)
            if (m.min(axis=1) < -tol).any():
                raise SupportExhausted(d, detail="negative marginal")
            np.maximum(m, 0.0, out=m)
            if (m.sum(axis=1) <= SUM_TOL).any():
                raise SupportExhausted(d, detail="no mass left in column")
            heads = batch_categorical(m, rng, j)
            parents[idx, d, c] = heads
            weight *= w[heads, j]
            batch.condition(heads, j)
            if d:
                active &= prev[:, :, c] == heads[:, None]
            z_d = batch.z - (prev_w * active).sum(axis=1)
        drawn_w[idx, d] = weight
        probs[idx, d] = weight / z_d0[idx]
    return parents, probs
