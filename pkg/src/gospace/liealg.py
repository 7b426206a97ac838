"""Compact matrix Lie algebras realized as real skew-symmetric matrices.

Complex matrices are realified with ``A + iB -> [[A, -B], [B, A]]`` and
quaternionic ones by replacing each entry with its 4x4 left-multiplication
matrix. The invariant inner product is ``<X, Y> = -tr(XY)``, which on skew
matrices equals the Frobenius product, so an orthonormal basis turns every
inner product into a plain dot product of coefficient vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np
import scipy.linalg

from .linalg import EPS_ZERO, RANK_RTOL, nullspace, rank

FAMILIES = ("so", "su", "u", "sp")

# Largest |t| * ||X||_F accepted by mat_exp.
MAX_EXP_ARG = 1e5


def realify(Z: np.ndarray) -> np.ndarray:
    """Real 2n x 2n form of a complex n x n matrix."""
    A, B = Z.real, Z.imag
    return np.block([[A, -B], [B, A]])


def quat_left(a: float, b: float, c: float, d: float) -> np.ndarray:
    """Matrix of left multiplication by a + bi + cj + dk on R^4 = H."""
    return np.array([
        [a, -b, -c, -d],
        [b, a, -d, c],
        [c, d, a, -b],
        [d, -c, b, a],
    ], dtype=float)


QUAT_UNITS = tuple(quat_left(*e) for e in np.eye(4))  # 1, i, j, k


def _unit(n: int, i: int, j: int, dtype=float) -> np.ndarray:
    E = np.zeros((n, n), dtype=dtype)
    E[i, j] = 1
    return E


def so_basis(n: int) -> list[np.ndarray]:
    out = []
    for i, j in combinations(range(n), 2):
        M = _unit(n, i, j) - _unit(n, j, i)
        out.append(M / np.sqrt(2.0))
    return out


def u_complex_basis(n: int, traceless: bool = False) -> list[np.ndarray]:
    """Skew-Hermitian n x n basis, orthogonal for Re tr(X Y^*)."""
    out = []
    for i, j in combinations(range(n), 2):
        E = _unit(n, i, j, complex)
        out.append(E - E.T)
        out.append(1j * (E + E.T))
    if traceless:
        for k in range(1, n):
            h = np.zeros(n)
            h[:k] = 1.0
            h[k] = -k
            out.append(1j * np.diag(h))
    else:
        for i in range(n):
            out.append(1j * _unit(n, i, i, complex))
    return out


def sp_complex_basis(n: int) -> list[np.ndarray]:
    """sp(n) = u(2n) ∩ sp(2n, C) as complex 2n x 2n matrices [[A, B], [-conj B, conj A]]."""
    out = []
    zero = np.zeros((n, n), dtype=complex)
    for A in u_complex_basis(n):
        out.append(np.block([[A, zero], [zero, A.conj()]]))
    for i in range(n):
        for j in range(i, n):
            S = _unit(n, i, j, complex)
            S = S + S.T if i != j else S
            for B in (S, 1j * S):
                out.append(np.block([[zero, B], [-B.conj(), zero]]))
    return out


def sp_real_basis(n: int) -> list[np.ndarray]:
    """sp(n) acting on H^n = R^{4n}, entries replaced by quaternion blocks."""
    out = []
    N = 4 * n
    for i in range(n):
        for q in QUAT_UNITS[1:]:
            M = np.zeros((N, N))
            M[4 * i:4 * i + 4, 4 * i:4 * i + 4] = q
            out.append(M)
    for i, j in combinations(range(n), 2):
        for q in QUAT_UNITS:
            M = np.zeros((N, N))
            M[4 * i:4 * i + 4, 4 * j:4 * j + 4] = q
            M[4 * j:4 * j + 4, 4 * i:4 * i + 4] = -q.T
            out.append(M)
    return out


def _normalized(mats) -> np.ndarray:
    # Division by a scalar keeps M.T == -M bit-exact.
    return np.array([M / np.sqrt(np.sum(M * M)) for M in mats])


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """Coefficient vector of an element of ``owner`` in its orthonormal basis."""

    coeffs: np.ndarray
    owner: "LieAlgebraRep"

    def __post_init__(self):
        if np.shape(self.coeffs) != (self.owner.dim,):
            raise ValueError(
                f"expected {self.owner.dim} coefficients, got shape {np.shape(self.coeffs)}")

    @property
    def matrix(self) -> np.ndarray:
        return self.owner.matrix(self.coeffs)


class LieAlgebraRep:
    """A compact Lie algebra given by an orthonormal basis of skew matrices.

    Instances are immutable; coefficient-level methods broadcast over
    leading axes.
    """

    def __init__(self, family: str, n: int, basis: np.ndarray):
        basis = np.ascontiguousarray(basis, dtype=float)
        basis.setflags(write=False)
        self.family = family
        self.n = n
        self.basis = basis
        self.dim = basis.shape[0]
        self.ambient_dim = basis.shape[1]
        self._flat = basis.reshape(self.dim, -1)

    def __repr__(self):
        return f"LieAlgebraRep({self.family}({self.n}), dim={self.dim}, ambient={self.ambient_dim})"

    @property
    def rank(self) -> int:
        return {"so": self.n // 2, "su": self.n - 1, "u": self.n, "sp": self.n}[self.family]

    def matrix(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        N = self.ambient_dim
        return (x @ self._flat).reshape(x.shape[:-1] + (N, N))

    def coeffs(self, M: np.ndarray) -> np.ndarray:
        """Orthogonal projection of ambient matrices onto the algebra."""
        M = np.asarray(M, dtype=float)
        return M.reshape(M.shape[:-2] + (-1,)) @ self._flat.T

    def bracket(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        X, Y = self.matrix(x), self.matrix(y)
        return self.coeffs(X @ Y - Y @ X)

    def inner(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.sum(np.asarray(x) * np.asarray(y), axis=-1)

    def element(self, coeffs) -> AlgebraElement:
        return AlgebraElement(np.asarray(coeffs, dtype=float), self)

    def random(self, rng: np.random.Generator, size=None) -> np.ndarray:
        shape = (self.dim,) if size is None else tuple(np.atleast_1d(size)) + (self.dim,)
        return rng.standard_normal(shape)

    def membership_residual(self, M: np.ndarray) -> float:
        """Distance of ambient matrices from the span of the basis."""
        M = np.asarray(M, dtype=float)
        return float(np.max(np.abs(M - self.matrix(self.coeffs(M))), initial=0.0))

    def closure_residual(self) -> float:
        """Largest re-expansion error of a basis bracket [B_i, B_j]."""
        worst = 0.0
        B = self.basis
        for i in range(self.dim):
            C = B[i] @ B[i + 1:] - B[i + 1:] @ B[i]
            if len(C):
                worst = max(worst, self.membership_residual(C))
        return worst

    def gram_residual(self) -> float:
        G = self._flat @ self._flat.T
        return float(np.max(np.abs(G - np.eye(self.dim))))


@lru_cache(maxsize=None)
def build_algebra(family: str, n: int) -> LieAlgebraRep:
    """so(n), su(n), u(n) or sp(n) with an orthonormal skew-symmetric basis."""
    if family not in FAMILIES:
        raise ValueError(f"unsupported family {family!r}; expected one of {FAMILIES}")
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if family == "su" and n < 2:
        raise ValueError("su(n) requires n >= 2")
    if family == "so":
        if n < 2:
            raise ValueError("so(n) requires n >= 2")
        mats = so_basis(n)
    elif family == "sp":
        mats = sp_real_basis(n)
    else:
        mats = [realify(Z) for Z in u_complex_basis(n, traceless=(family == "su"))]
    return LieAlgebraRep(family, int(n), _normalized(mats))


def expected_dim(family: str, n: int) -> int:
    return {"so": n * (n - 1) // 2, "su": n * n - 1, "u": n * n, "sp": n * (2 * n + 1)}[family]


def _same_owner(X: AlgebraElement, Y: AlgebraElement) -> LieAlgebraRep:
    if X.owner is not Y.owner:
        raise ValueError(f"elements live in different algebras: {X.owner!r} vs {Y.owner!r}")
    return X.owner


def bracket(X: AlgebraElement, Y: AlgebraElement) -> AlgebraElement:
    g = _same_owner(X, Y)
    return g.element(g.bracket(X.coeffs, Y.coeffs))


def inner(X: AlgebraElement, Y: AlgebraElement) -> float:
    """Invariant form -tr(XY), evaluated on the realized matrices."""
    _same_owner(X, Y)
    return float(-np.trace(X.matrix @ Y.matrix))


def nullspace_in_subspace(x: AlgebraElement, S: np.ndarray, tol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis (rows, owner coefficients) of {xi in span S : [xi, x] = 0}."""
    g = x.owner
    S = np.atleast_2d(np.asarray(S, dtype=float))
    if S.shape[0] == 0:
        return np.zeros((0, g.dim))
    if S.shape[1] != g.dim:
        raise ValueError(f"subspace rows must have {g.dim} coefficients")
    if rank(S).rank < S.shape[0]:
        raise ValueError("subspace basis is rank deficient")
    images = g.bracket(S, np.broadcast_to(x.coeffs, S.shape))
    # Column i is [S_i, x]; the kernel lives in S-coordinates.
    ker, _ = nullspace(images.T, tol, scale=np.linalg.norm(x.coeffs))
    if ker.shape[0] == 0:
        return np.zeros((0, g.dim))
    q, _ = np.linalg.qr((ker @ S).T)
    return q.T


def mat_exp(X, t: float = 1.0) -> np.ndarray:
    """exp(tX) for an algebra element or a skew ambient matrix."""
    M = X.matrix if isinstance(X, AlgebraElement) else np.asarray(X, dtype=float)
    arg = abs(t) * np.linalg.norm(M)
    if arg > MAX_EXP_ARG:
        raise ValueError(f"|t|*||X|| = {arg:.3g} exceeds the supported bound {MAX_EXP_ARG:g}")
    return scipy.linalg.expm(t * M)


def jacobi_residual(g: LieAlgebraRep, x, y, z) -> float:
    r = g.bracket(x, g.bracket(y, z)) + g.bracket(y, g.bracket(z, x)) + g.bracket(z, g.bracket(x, y))
    return float(np.max(np.abs(r)))


def invariance_residual(g: LieAlgebraRep, x, y, z) -> float:
    """|<[z, x], y> + <x, [z, y]>|."""
    return float(np.max(np.abs(g.inner(g.bracket(z, x), y) + g.inner(x, g.bracket(z, y)))))


__all__ = [
    "AlgebraElement", "LieAlgebraRep", "build_algebra", "bracket", "inner",
    "nullspace_in_subspace", "mat_exp", "realify", "quat_left", "expected_dim",
    "jacobi_residual", "invariance_residual", "EPS_ZERO",
]
