"""Rank, nullspace and orthonormalization helpers.

Every rank decision in the package goes through :func:`split_rank`, so the
ratio between the smallest retained and the largest discarded singular value
(the *rank gap*) can be tracked globally.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

EPS_ZERO = 1e-9
RANK_RTOL = 1e-8


class RankSplit(NamedTuple):
    rank: int
    gap: float


def split_rank(s: np.ndarray, rtol: float = RANK_RTOL, scale: float = 0.0) -> RankSplit:
    """Count singular values above ``rtol * max(s[0], scale)``.

    ``scale`` protects against a matrix that is pure round-off: if every
    singular value is ~1e-16 relative to the natural size of the problem,
    a purely relative threshold would count noise as rank.
    """
    s = np.asarray(s, dtype=float)
    ref = max(float(s[0]) if s.size else 0.0, float(scale))
    if ref == 0.0:
        return RankSplit(0, np.inf)
    r = int(np.count_nonzero(s > rtol * ref))
    kept = float(s[r - 1]) if r else ref
    dropped = float(s[r]) if r < s.size else 0.0
    return RankSplit(r, kept / dropped if dropped > 0 else np.inf)


def rank(A: np.ndarray, rtol: float = RANK_RTOL, scale: float = 0.0) -> RankSplit:
    A = np.atleast_2d(A)
    if A.size == 0:
        return RankSplit(0, np.inf)
    return split_rank(np.linalg.svd(A, compute_uv=False), rtol, scale)


def nullspace(A: np.ndarray, rtol: float = RANK_RTOL, scale: float = 0.0):
    """Orthonormal basis (as rows) of ker A, plus the rank split used."""
    A = np.atleast_2d(A)
    n = A.shape[1]
    if A.shape[0] == 0 or n == 0:
        return np.eye(n), RankSplit(0, np.inf)
    _, s, vh = np.linalg.svd(A, full_matrices=True)
    split = split_rank(s, rtol, scale)
    return vh[split.rank:].copy(), split


def row_range(A: np.ndarray, rtol: float = RANK_RTOL, scale: float = 0.0):
    """Orthonormal basis (as rows) of the row space of A."""
    A = np.atleast_2d(A)
    if A.size == 0:
        return np.zeros((0, A.shape[1])), RankSplit(0, np.inf)
    _, s, vh = np.linalg.svd(A, full_matrices=False)
    split = split_rank(s, rtol, scale)
    return vh[:split.rank].copy(), split


def gram_schmidt(vectors: np.ndarray, against: np.ndarray | None = None,
                 drop_tol: float = 1e-8) -> np.ndarray:
    """Orthonormalize rows in order, dropping ones already in the span.

    Rows that are already orthonormal (and orthogonal to ``against``) come
    back unchanged up to round-off, which keeps hand-built bases canonical.
    """
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    dim = vectors.shape[1]
    basis = [] if against is None else list(np.atleast_2d(against))
    n_fixed = len(basis)
    for v in vectors:
        size = np.linalg.norm(v)
        if size == 0.0:
            continue
        w = v.copy()
        for _ in range(2):
            for b in basis:
                w -= (b @ w) * b
        nw = np.linalg.norm(w)
        if nw > drop_tol * size:
            basis.append(w / nw)
    out = basis[n_fixed:]
    return np.array(out) if out else np.zeros((0, dim))


def lstsq_min_norm(M: np.ndarray, b: np.ndarray, rtol: float = RANK_RTOL,
                   scale: float = 0.0):
    """Minimum-norm least-squares solution of ``M z = b`` via thresholded SVD.

    Returns ``(z, rank_split)``.
    """
    M = np.atleast_2d(M)
    if M.shape[1] == 0:
        return np.zeros(0), RankSplit(0, np.inf)
    u, s, vh = np.linalg.svd(M, full_matrices=False)
    split = split_rank(s, rtol, scale)
    r = split.rank
    z = vh[:r].T @ ((u[:, :r].T @ b) / s[:r])
    return z, split
