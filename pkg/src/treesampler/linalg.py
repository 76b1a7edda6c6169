"""Dense matrix kernels: LU determinant, transposed inverse, rank-one column updates.

``b`` throughout is the transposed inverse ``L^{-T}`` of some square ``L``. A
column update replaces ``L`` by ``L + u e_j^T``; the inverse then changes by the
Sherman-Morrison formula and the determinant by the matrix determinant lemma.
Both only need ``b[:, j]`` (row ``j`` of ``L^{-1}``).

LU factorisation with partial pivoting is LAPACK ``getrf`` through numpy.
"""

from __future__ import annotations

import numpy as np

from .errors import NonSquare, Singular, SingularUpdate

SINGULAR_TOL = 1e-12
DENOM_TOL = 1e-12
# Denominators below this trigger a from-scratch recompute in the samplers.
REFRESH_DENOM = 1e-6


def _square(m) -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonSquare(tuple(a.shape))
    return a


def determinant(m) -> float:
    """Determinant via partially pivoted LU."""
    a = _square(m)
    if a.shape[0] == 0:
        return 1.0
    return float(np.linalg.det(a))


def singular_scale(a: np.ndarray) -> float:
    """Hadamard bound on ``|det(a)|``: product of row norms."""
    return float(np.sqrt(np.einsum("ij,ij->i", a, a)).prod())


def inverse_transpose_det(m, singular_tol: float = SINGULAR_TOL) -> tuple[np.ndarray, float]:
    """Return ``(m^{-T}, det m)``.

    Raises Singular when ``|det| <= singular_tol * prod(row norms)``.
    """
    a = _square(m)
    det = determinant(a)
    if not np.isfinite(det) or abs(det) <= singular_tol * singular_scale(a):
        raise Singular(det)
    try:
        inv = np.linalg.inv(a)
    except np.linalg.LinAlgError:
        raise Singular(det) from None
    return inv.T.copy(), det


def inverse_transpose(m, singular_tol: float = SINGULAR_TOL) -> np.ndarray:
    return inverse_transpose_det(m, singular_tol)[0]


def det_lemma_factor(b: np.ndarray, u: np.ndarray, j: int) -> float:
    """``det(L + u e_j^T) / det(L)`` in O(n)."""
    return 1.0 + float(u.dot(b[:, j]))


def sherman_morrison_update(
    b: np.ndarray, u: np.ndarray, j: int, denom_tol: float = DENOM_TOL, denom: float | None = None
) -> np.ndarray:
    """Turn ``b = L^{-T}`` into ``(L + u e_j^T)^{-T}`` in place, O(n^2).

    ``denom`` may pass in an already computed ``det_lemma_factor``. Returns ``b``.
    """
    col = b[:, j].copy()
    if denom is None:
        denom = 1.0 + float(u.dot(col))
    if abs(denom) <= denom_tol:
        raise SingularUpdate(j, detail=f"denominator {denom:.3e}")
    row = u @ b
    row /= denom
    b -= col[:, None] * row
    return b
