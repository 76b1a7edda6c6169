"""Ancestral tree sampling through the matrix-tree theorem.

Laplacian rows and columns ``0..n-1`` correspond to nodes ``1..n``. For
dependency trees the first row is replaced by the root-edge weights, which makes
``det(L)`` sum over trees with exactly one root child. Edge marginals come from
``B = L^{-T}``; fixing the parent of node ``j`` replaces column ``j - 1`` of
``L``, which is a rank-one update of ``B`` and of ``det(L)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import DegenerateColumn, Singular, SingularUpdate
from .graph import ROOT, Graph, Tree, TreeKind, validate_graph
from .rng import categorical, make_rng

NEG_TOL = 1e-9
SUM_TOL = 1e-6


def laplacian(g: Graph, kind: TreeKind) -> np.ndarray:
    """Spanning or root-constrained Laplacian of ``g`` (n x n)."""
    w = g.weights
    inner = np.array(w[1:, 1:])
    np.fill_diagonal(inner, 0.0)
    lap = -inner
    diag = inner.sum(axis=0)
    if TreeKind.parse(kind) is TreeKind.SPANNING:
        diag = diag + w[ROOT, 1:]
        np.fill_diagonal(lap, diag)
    else:
        np.fill_diagonal(lap, diag)
        lap[0, :] = w[ROOT, 1:]
    return lap


def partition_function(g: Graph, kind: TreeKind) -> float:
    """``Z = det(L)``; 0.0 when no tree of the requested kind exists."""
    lap = laplacian(g, kind)
    z = linalg.determinant(lap)
    if abs(z) <= linalg.SINGULAR_TOL * linalg.singular_scale(lap):
        return 0.0
    return z


@dataclass
class LaplacianState:
    """Laplacian, its transposed inverse and determinant, mutated by conditioning.

    ``w`` holds the weights of the conditioned graph: conditioning on ``i -> j``
    zeroes every other edge into ``j``.
    """

    kind: TreeKind
    l: np.ndarray
    b: np.ndarray
    z: float
    w: np.ndarray
    refresh_every: int
    updates_since_refresh: int = 0
    refreshes: int = field(default=0, compare=False)

    @property
    def n(self) -> int:
        return self.l.shape[0]

    def copy(self) -> "LaplacianState":
        return LaplacianState(
            self.kind,
            self.l.copy(),
            self.b.copy(),
            self.z,
            self.w.copy(),
            self.refresh_every,
            self.updates_since_refresh,
            self.refreshes,
        )

    def refresh(self) -> None:
        """Recompute ``b`` and ``z`` from ``l`` from scratch."""
        try:
            self.b, self.z = linalg.inverse_transpose_det(self.l)
        except Singular:
            raise SingularUpdate(detail="conditioned Laplacian is singular") from None
        self.updates_since_refresh = 0
        self.refreshes += 1


def build_laplacian(
    g: Graph, kind: TreeKind, refresh_every: int | None = None, validate: bool = True
) -> LaplacianState:
    """Fresh state for ``g``. Raises Singular (with ``z == 0``) when no tree exists."""
    if validate:
        validate_graph(g)
    kind = TreeKind.parse(kind)
    lap = laplacian(g, kind)
    try:
        b, z = linalg.inverse_transpose_det(lap)
    except Singular:
        raise Singular(0.0, detail=f"no {kind.value} tree exists") from None
    return LaplacianState(
        kind=kind,
        l=lap,
        b=b,
        z=z,
        w=np.array(g.weights),
        refresh_every=refresh_every or g.n,
    )


def raw_marginals(state: LaplacianState, j: int) -> np.ndarray:
    """Unclamped marginals ``p(i -> j)`` for all heads ``i`` (index 0 is the root)."""
    b = state.b
    c = j - 1
    m = np.empty(b.shape[0] + 1)
    col = b[:, c]
    if state.kind is TreeKind.SPANNING:
        m[ROOT] = b[c, c]
        np.subtract(b[c, c], col, out=m[1:])
    else:
        # row 0 of L holds root weights, so node 1 gets no diagonal/off-diagonal term
        m[ROOT] = b[0, c]
        diag = b[c, c] if c != 0 else 0.0
        np.subtract(diag, col, out=m[1:])
        m[1] = diag
    m *= state.w[:, j]
    m[j] = 0.0
    return m


def edge_marginals_into(state: LaplacianState, g: Graph | None, j: int) -> np.ndarray:
    """Conditional marginals of every edge into ``j``, clamped at zero, summing to one.

    ``g`` is accepted for interface symmetry; the state carries the conditioned weights.
    """
    m = raw_marginals(state, j)
    lo = m.min()
    if lo < -NEG_TOL and state.updates_since_refresh:
        state.refresh()
        m = raw_marginals(state, j)
        lo = m.min()
    if lo < -NEG_TOL:
        raise DegenerateColumn(j, detail=f"negative marginal {lo:.3e}")
    if lo < 0.0:
        np.maximum(m, 0.0, out=m)
    total = m.sum()
    if total <= SUM_TOL or abs(total - 1.0) > SUM_TOL:
        raise DegenerateColumn(j, detail=f"marginals sum to {total:.6g}")
    return m


def conditioned_column(state: LaplacianState, i: int, j: int) -> np.ndarray:
    """Column ``j - 1`` of the Laplacian once ``i -> j`` is the only edge into ``j``."""
    c = j - 1
    col = np.zeros(state.l.shape[0])
    wij = state.w[i, j]
    if state.kind is TreeKind.SPANNING:
        col[c] = wij
        if i != ROOT:
            col[i - 1] -= wij
    elif i == ROOT:
        col[0] = wij
    else:
        if c != 0:
            col[c] += wij
        if i != 1:
            col[i - 1] -= wij
    return col


def condition(state: LaplacianState, g: Graph | None, edge: tuple[int, int]) -> float:
    """Restrict ``state`` to trees containing ``edge``; returns the determinant factor."""
    i, j = edge
    c = j - 1
    new = conditioned_column(state, i, j)
    u = new - state.l[:, c]
    z_old = state.z
    due = state.updates_since_refresh >= state.refresh_every
    factor = linalg.det_lemma_factor(state.b, u, c)
    state.l[:, c] = new
    w = state.w
    keep = w[i, j]
    w[:, j] = 0.0
    w[i, j] = keep
    if due or abs(factor) < linalg.REFRESH_DENOM:
        state.refresh()
    else:
        linalg.sherman_morrison_update(state.b, u, c, denom=factor)
        state.z *= factor
        state.updates_since_refresh += 1
    return state.z / z_old if z_old else factor


class ColbournSampler:
    """Builds the Laplacian once; each draw works on a copy."""

    def __init__(self, g: Graph, kind: TreeKind = TreeKind.DEPENDENCY, refresh_every: int | None = None):
        self.g = g
        self.kind = TreeKind.parse(kind)
        self.state = build_laplacian(g, self.kind, refresh_every)

    @property
    def z(self) -> float:
        return self.state.z

    def sample(self, rng: np.random.Generator, trace: list | None = None) -> Tree:
        """Draw one tree. If ``trace`` is a list, the sampled marginals are appended to it.

        Same arithmetic as ``edge_marginals_into`` then ``condition`` for
        j = 1..n, inlined. Column ``j`` of the weights is read before it is
        conditioned, so the state's weight copy is left alone.
        """
        pristine = self.state
        l, b, z = pristine.l.copy(), pristine.b.copy(), pristine.z
        w = self.g.weights
        n = self.g.n
        spanning = self.kind is TreeKind.SPANNING
        refresh_every, refresh_denom = pristine.refresh_every, linalg.REFRESH_DENOM
        subtract, empty = np.subtract, np.empty
        updates = 0
        parents = [0] * n
        for j in range(1, n + 1):
            c = j - 1
            col = b[:, c]
            m = empty(n + 1)
            if spanning:
                diag = m[ROOT] = b[c, c]
                subtract(diag, col, out=m[1:])
            else:
                m[ROOT] = b[0, c]
                diag = b[c, c] if c else 0.0
                subtract(diag, col, out=m[1:])
                m[1] = diag
            m *= w[:, j]
            m[j] = 0.0
            lo = m.min()
            if lo < -NEG_TOL:
                # slow path with refresh; the weight copy is never written here
                state = LaplacianState(self.kind, l, b, z, w, refresh_every, updates)
                m = edge_marginals_into(state, None, j)
                b, z, updates = state.b, state.z, state.updates_since_refresh
                col = b[:, c]
            elif lo < 0.0:
                np.maximum(m, 0.0, out=m)
            cum = m.cumsum()
            total = cum[-1]
            if total <= SUM_TOL or abs(total - 1.0) > SUM_TOL:
                raise DegenerateColumn(j, detail=f"marginals sum to {total:.6g}")
            i = int(cum.searchsorted(rng.random() * total, "right"))
            if i > n:
                i = int(np.flatnonzero(m > 0)[-1])
            parents[c] = i
            if trace is not None:
                trace.append(m[i] / total)
            if j == n:
                break
            # u = conditioned column - current column, built in place
            u = -l[:, c]
            l[:, c] = 0.0
            wij = w[i, j]
            if spanning:
                u[c] += wij
                l[c, c] = wij
                if i != ROOT:
                    u[i - 1] -= wij
                    l[i - 1, c] = -wij
            elif i == ROOT:
                u[0] += wij
                l[0, c] = wij
            else:
                if c != 0:
                    u[c] += wij
                    l[c, c] = wij
                if i != 1:
                    u[i - 1] -= wij
                    l[i - 1, c] = -wij
            factor = 1.0 + u.dot(col)
            if updates >= refresh_every or abs(factor) < refresh_denom:
                try:
                    b, z = linalg.inverse_transpose_det(l)
                except Singular:
                    raise SingularUpdate(detail="conditioned Laplacian is singular") from None
                updates = 0
            else:
                row = u @ b
                row /= factor
                b -= col[:, None] * row
                z *= factor
                updates += 1
        return tuple(parents)

    def sample_batch(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw ``size`` independent trees at once; returns a (size, n) parent array.

        Same marginals and column updates as ``sample``, vectorised over draws.
        Each step consumes one ``rng.random(size)`` call, so ``size=1`` reproduces
        ``sample`` for the same generator state.
        """
        n = self.g.n
        batch = BatchState.replicate(self.state, size)
        parents = np.zeros((size, n), dtype=np.int64)
        for j in range(1, n + 1):
            m = batch.marginals(j)
            heads = batch_categorical(m, rng, j)
            parents[:, j - 1] = heads
            if j < n:
                batch.condition(heads, j)
        return parents


class BatchState:
    """A stack of independent Laplacian states sharing one graph and kind."""

    def __init__(self, kind: TreeKind, w: np.ndarray, l: np.ndarray, b: np.ndarray, z: np.ndarray):
        self.kind, self.w, self.l, self.b, self.z = kind, w, l, b, z

    @classmethod
    def replicate(cls, state: LaplacianState, size: int) -> "BatchState":
        n = state.n
        return cls(
            state.kind,
            state.w,
            np.broadcast_to(state.l, (size, n, n)).copy(),
            np.broadcast_to(state.b, (size, n, n)).copy(),
            np.full(size, state.z),
        )

    def raw_marginals(self, j: int, b: np.ndarray | None = None) -> np.ndarray:
        b = self.b if b is None else b
        w = self.w
        c = j - 1
        size, n, _ = b.shape
        m = np.empty((size, n + 1))
        col = b[:, :, c]
        diag = b[:, c, c]
        if self.kind is TreeKind.SPANNING:
            m[:, ROOT] = w[ROOT, j] * diag
            m[:, 1:] = w[1:, j] * (diag[:, None] - col)
        else:
            m[:, ROOT] = w[ROOT, j] * b[:, 0, c]
            off = col.copy()
            off[:, 0] = 0.0
            d = diag[:, None] if c != 0 else 0.0
            m[:, 1:] = w[1:, j] * (d - off)
        m[:, j] = 0.0
        return m

    def refresh(self, rows: np.ndarray) -> None:
        try:
            self.b[rows] = np.swapaxes(np.linalg.inv(self.l[rows]), 1, 2)
        except np.linalg.LinAlgError:
            raise SingularUpdate(detail="conditioned Laplacian is singular") from None
        self.z[rows] = np.linalg.det(self.l[rows])

    def marginals(self, j: int) -> np.ndarray:
        """Clamped marginals, refreshing rows whose ``b`` has drifted into negatives."""
        m = self.raw_marginals(j)
        bad = m.min(axis=1) < -NEG_TOL
        if bad.any():
            self.refresh(bad)
            m[bad] = self.raw_marginals(j, self.b[bad])
            if (m.min(axis=1) < -NEG_TOL).any():
                raise DegenerateColumn(j, detail="negative marginal after refresh")
        np.maximum(m, 0.0, out=m)
        if (np.abs(m.sum(axis=1) - 1.0) > SUM_TOL).any():
            raise DegenerateColumn(j, detail="marginals do not sum to one")
        return m

    def condition(self, heads: np.ndarray, j: int) -> None:
        """Row ``s`` keeps only the edge ``heads[s] -> j`` into ``j``."""
        size, n, _ = self.l.shape
        c = j - 1
        rows = np.arange(size)
        wij = self.w[heads, j]
        newcol = np.zeros((size, n))
        nonroot = heads != ROOT
        if self.kind is TreeKind.SPANNING:
            newcol[:, c] = wij
            newcol[rows[nonroot], heads[nonroot] - 1] -= wij[nonroot]
        else:
            newcol[~nonroot, 0] = wij[~nonroot]
            if c != 0:
                newcol[nonroot, c] += wij[nonroot]
            sub = nonroot & (heads != 1)
            newcol[rows[sub], heads[sub] - 1] -= wij[sub]
        u = newcol - self.l[:, :, c]
        col = self.b[:, :, c].copy()
        factor = 1.0 + np.einsum("sk,sk->s", u, col)
        self.l[:, :, c] = newcol
        near = np.abs(factor) < linalg.REFRESH_DENOM
        safe = np.where(near, 1.0, factor)
        rowvec = np.einsum("sk,skm->sm", u, self.b) / safe[:, None]
        self.b -= col[:, :, None] * rowvec[:, None, :]
        self.z *= factor
        if near.any():
            self.refresh(near)


def batch_categorical(m: np.ndarray, rng: np.random.Generator, j: int = 0) -> np.ndarray:
    """Row-wise categorical draw with one uniform per row (matches ``categorical``)."""
    cum = np.cumsum(m, axis=1)
    r = rng.random(len(m)) * cum[:, -1]
    heads = (cum <= r[:, None]).sum(axis=1)
    over = heads >= m.shape[1]
    if over.any():
        heads[over] = [int(np.flatnonzero(row > 0)[-1]) for row in m[over]]
    return heads


def colbourn(g: Graph, kind: TreeKind = TreeKind.DEPENDENCY, rng=None) -> Tree:
    """Sample a tree with probability proportional to its weight, in O(n^3)."""
    return ColbournSampler(g, kind).sample(make_rng(rng))


def mtt_marginals(g: Graph, kind: TreeKind) -> np.ndarray:
    """(n+1)x(n+1) matrix of edge marginals from a fresh Laplacian, roundoff negatives clamped."""
    state = build_laplacian(g, kind)
    out = np.zeros_like(g.weights)
    for j in range(1, g.n + 1):
        out[:, j] = edge_marginals_into(state, g, j)
    return out
