"""Small named graphs and random graph generators used by tests, selftest and bench."""

from __future__ import annotations

import numpy as np

from .graph import Graph


def g1() -> Graph:
    """One non-root node, root edge weight 2."""
    return Graph(np.array([[0.0, 2.0], [0.0, 0.0]]))


def g2() -> Graph:
    """Two non-root nodes, every allowed edge has weight 1."""
    return Graph(np.array([[0.0, 1.0, 1.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]]))


def g3() -> Graph:
    """Two root edges of weight 1/2; two dependency trees use root->1, one uses root->2.

    Edges: root->1, root->2 (0.5 each); 1->2, 1->3, 2->3, 3->1 (1 each).
    """
    w = np.zeros((4, 4))
    w[0, 1] = w[0, 2] = 0.5
    w[1, 2] = w[1, 3] = w[2, 3] = w[3, 1] = 1.0
    return Graph(w)


def skewed() -> Graph:
    """Complete 3-node graph with one dominant root edge and light cross edges."""
    w = np.array(
        [
            [0.0, 5.0, 0.2, 0.2],
            [0.0, 0.0, 2.0, 1.0],
            [0.0, 0.5, 0.0, 2.0],
            [0.0, 0.5, 1.0, 0.0],
        ]
    )
    return Graph(w)


def random_weights(n: int, rng: np.random.Generator, distribution: str = "uniform") -> np.ndarray:
    """Complete-graph weight matrix with zero root column and diagonal.

    ``uniform`` draws i.i.d. from (0, 1]; ``exponential`` from Exp(1);
    ``softmax-gumbel`` exponentiates standard Gumbel scores scaled by 3 and
    normalises each column, giving the peaked columns typical of trained scorers.
    """
    size = (n + 1, n + 1)
    if distribution == "uniform":
        w = 1.0 - rng.random(size)
    elif distribution == "exponential":
        w = rng.exponential(1.0, size)
        w[w == 0] = np.finfo(float).tiny
    elif distribution == "softmax-gumbel":
        scores = 3.0 * rng.gumbel(size=size)
        w = np.exp(scores - scores.max(axis=0, keepdims=True))
    else:
        raise ValueError(f"unknown weight distribution {distribution!r}")
    w[:, 0] = 0.0
    np.fill_diagonal(w, 0.0)
    if distribution == "softmax-gumbel":
        w[:, 1:] /= w[:, 1:].sum(axis=0)
    return w


def random_graph(n: int, rng: np.random.Generator, distribution: str = "uniform") -> Graph:
    return Graph(random_weights(n, rng, distribution))


def random_sparse_graph(n: int, rng: np.random.Generator, density: float = 0.6) -> Graph:
    """Random graph with some edges removed; every column keeps at least one edge."""
    w = random_weights(n, rng)
    mask = rng.random(w.shape) < density
    w = w * mask
    for j in range(1, n + 1):
        if w[:, j].sum() == 0:
            w[0, j] = 1.0 - rng.random()
    return Graph(w)
