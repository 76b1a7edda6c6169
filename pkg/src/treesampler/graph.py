"""Rooted weighted digraphs and parent-array trees.

Node 0 is the root. ``weights[i, j]`` is the weight of the edge ``i -> j``;
a weight of exactly zero means the edge is absent. A tree over ``n`` non-root
nodes is a tuple ``t`` of length ``n`` with ``t[j - 1]`` the parent of node ``j``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    EdgeIntoRoot,
    GraphFormatError,
    IsolatedNode,
    NegativeWeight,
    ParentOutOfRange,
    SelfLoop,
)

Tree = tuple[int, ...]

ROOT = 0


class TreeKind(enum.Enum):
    SPANNING = "spanning"
    DEPENDENCY = "dependency"

    @classmethod
    def parse(cls, value: "str | TreeKind") -> "TreeKind":
        if isinstance(value, TreeKind):
            return value
        return cls(value.lower())


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable (n+1)x(n+1) weight matrix with node 0 as root."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float, copy=True)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] < 2:
            raise GraphFormatError(
                "shape", detail=f"weights must be square with at least 2 rows, got {w.shape}"
            )
        if not np.all(np.isfinite(w)):
            raise GraphFormatError("weights", detail="non-finite weight")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0] - 1

    def scaled(self, c: float) -> "Graph":
        return Graph(self.weights * c)

    def to_json(self) -> dict:
        return {"n": self.n, "weights": self.weights.tolist()}

    @classmethod
    def from_json(cls, obj: dict, validate: bool = True) -> "Graph":
        """Parse the ``{"n": N, "weights": [[...], ...]}`` format."""
        if not isinstance(obj, dict) or "n" not in obj or "weights" not in obj:
            raise GraphFormatError("fields", detail='expected an object with "n" and "weights"')
        n = obj["n"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise GraphFormatError("n", detail=f"n must be a positive integer, got {n!r}")
        rows = obj["weights"]
        if not isinstance(rows, list) or len(rows) != n + 1:
            raise GraphFormatError("shape", detail=f"expected {n + 1} rows")
        for r, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != n + 1:
                raise GraphFormatError("shape", detail=f"row {r} must have {n + 1} entries")
            for x in row:
                if not isinstance(x, (int, float)) or isinstance(x, bool):
                    raise GraphFormatError("weights", detail=f"non-numeric entry {x!r} in row {r}")
        g = cls(np.array(rows, dtype=float))
        if validate:
            validate_graph(g)
        return g

    @classmethod
    def load(cls, path: str | Path, validate: bool = True) -> "Graph":
        try:
            obj = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise GraphFormatError("json", detail=str(exc)) from None
        except OSError as exc:
            raise GraphFormatError("file", detail=str(exc)) from None
        return cls.from_json(obj, validate=validate)


def validate_graph(g: Graph) -> None:
    """Raise the first invariant violation found; return None if ``g`` is usable."""
    w = g.weights
    if (
        (w >= 0).all()
        and not w[:, ROOT].any()
        and not w.diagonal().any()
        and (w[:, 1:].sum(axis=0) > 0).all()
    ):
        return
    neg = np.argwhere(w < 0)
    if len(neg):
        i, j = neg[0]
        raise NegativeWeight(int(i), int(j))
    into_root = np.flatnonzero(w[:, ROOT] != 0)
    if len(into_root):
        raise EdgeIntoRoot(int(into_root[0]))
    loops = np.flatnonzero(np.diag(w) != 0)
    if len(loops):
        raise SelfLoop(int(loops[0]))
    isolated = np.flatnonzero(w[:, 1:].sum(axis=0) <= 0)
    if len(isolated):
        raise IsolatedNode(int(isolated[0]) + 1)


def check_parents(g: Graph, t: Tree) -> None:
    if len(t) != g.n:
        raise ParentOutOfRange(len(t), -1)
    for j, p in enumerate(t, start=1):
        if not 0 <= p <= g.n or p == j:
            raise ParentOutOfRange(j, p)


def tree_weight(g: Graph, t: Tree) -> float:
    check_parents(g, t)
    out = 1.0
    for j, p in enumerate(t, start=1):
        out *= g.weights[p, j]
    return float(out)


def log_tree_weight(g: Graph, t: Tree) -> float:
    """Log-space weight; ``-inf`` when any edge is absent. Avoids underflow for large n."""
    check_parents(g, t)
    total = 0.0
    for j, p in enumerate(t, start=1):
        w = g.weights[p, j]
        if w <= 0:
            return -math.inf
        total += math.log(w)
    return total


def root_children(t: Tree) -> list[int]:
    return [j for j, p in enumerate(t, start=1) if p == ROOT]


def is_acyclic(t: Tree) -> bool:
    """True iff following parents from every node reaches the root."""
    n = len(t)
    state = [0] * (n + 1)  # 0 unseen, 1 on current path, 2 reaches root
    state[ROOT] = 2
    for start in range(1, n + 1):
        path = []
        u = start
        while state[u] == 0:
            state[u] = 1
            path.append(u)
            u = t[u - 1]
        if state[u] == 1:
            return False
        for v in path:
            state[v] = 2
    return True


def is_tree(g: Graph, t: Tree, kind: TreeKind = TreeKind.SPANNING) -> bool:
    check_parents(g, t)
    if any(g.weights[p, j] <= 0 for j, p in enumerate(t, start=1)):
        return False
    if not is_acyclic(t):
        return False
    if TreeKind.parse(kind) is TreeKind.DEPENDENCY:
        return sum(1 for p in t if p == ROOT) == 1
    return True


def canonical_key(t) -> Tree:
    """Hashable, totally ordered key; equal trees map to equal keys."""
    return tuple(int(p) for p in t)


def normalize_stochastic(g: Graph) -> Graph:
    """Scale every non-root column so incoming weights sum to one.

    Tree weights change by a constant factor only, so the tree distribution is
    unchanged.
    """
    w = np.array(g.weights)
    sums = w[:, 1:].sum(axis=0)
    isolated = np.flatnonzero(sums <= 0)
    if len(isolated):
        raise IsolatedNode(int(isolated[0]) + 1)
    w[:, 1:] /= sums
    return Graph(w)
