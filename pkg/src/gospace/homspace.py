"""Catalog of homogeneous spaces G/H with a chain h ⊂ k ⊂ g, metrics and Hamiltonians.

Every space carries an *adapted* orthonormal frame of g ordered as
``h | l | m``; points, gradients and algebra elements are coefficient
vectors in that frame, so projections onto h, l, m, v = l ⊕ m and
k = h ⊕ l are index slices.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import NamedTuple, Union

import numpy as np

from .linalg import EPS_ZERO, gram_schmidt
from .liealg import (
    LieAlgebraRep,
    QUAT_UNITS,
    build_algebra,
    realify,
    so_basis,
    sp_complex_basis,
    sp_real_basis,
    u_complex_basis,
)
from .polynomial import InvariantPolynomial


class CatalogError(ValueError):
    pass


FLAG_NAMES = {
    "lh_commute": "[l,h]=0",
    "ll_closed": "[l,l]⊂l",
    "l_abelian": "l abelian",
    "symmetric": "(g,k) symmetric",
}


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    table_row: int | None
    g: str
    k: str
    h: str
    params: dict  # name -> minimum value
    flags: frozenset = frozenset()
    base_point: bool = False
    supported: bool = True
    note: str = ""

    @property
    def minimal_params(self) -> dict:
        return dict(self.params)

    def manifest(self) -> dict:
        return {
            "id": self.id,
            "table_row": self.table_row,
            "chain": {"g": self.g, "k": self.k, "h": self.h},
            "params": {name: {"min": lo} for name, lo in self.params.items()},
            "flags": sorted(self.flags),
            "base_point": self.base_point,
            "supported": self.supported,
            "note": self.note,
        }


_SYM = frozenset({"symmetric"})
_SPLIT = frozenset({"lh_commute", "ll_closed", "l_abelian", "symmetric"})

CATALOG: dict[str, CatalogEntry] = {e.id: e for e in [
    CatalogEntry("row1", 1, "so(2n+1)", "so(2n)", "u(n)", {"n": 2}, _SYM),
    CatalogEntry("row2", 2, "so(4n+1)", "so(4n)", "su(2n)", {"n": 1}, _SYM),
    CatalogEntry("row3", 3, "so(8)", "so(7)", "g2", {}, supported=False,
                 note="needs a g2 construction"),
    CatalogEntry("row4", 4, "so(9)", "so(8)", "spin(7)", {}, supported=False,
                 note="needs the spin representation"),
    CatalogEntry("row5", 5, "su(n+1)", "u(n)", "su(n)", {"n": 2}, _SPLIT, base_point=True),
    CatalogEntry("row6", 6, "su(2n+1)", "u(2n)", "u(1)+sp(n)", {"n": 2}, _SYM),
    CatalogEntry("row7", 7, "su(2n+1)", "u(2n)", "sp(n)", {"n": 2}, _SYM),
    CatalogEntry("row8", 8, "sp(n+1)", "sp(1)+sp(n)", "u(1)+sp(n)", {"n": 1}, _SYM),
    CatalogEntry("row9", 9, "sp(n+1)", "sp(1)+sp(n)", "sp(n)", {"n": 1},
                 frozenset({"lh_commute", "ll_closed", "symmetric"}), base_point=True),
    CatalogEntry("row10", 10, "su(2r+n)", "su(r)+su(r+n)+R", "su(r)+su(r+n)",
                 {"r": 2, "n": 1}, _SPLIT),
    CatalogEntry("row11", 11, "so(4r+2)", "u(2r+1)", "su(2r+1)", {"r": 2}, _SPLIT),
    CatalogEntry("row12", 12, "e6", "so(10)+R", "so(10)", {}, supported=False,
                 note="needs an e6 construction"),
    CatalogEntry("row13", 13, "so(9)", "so(7)+so(2)", "g2+so(2)", {}, supported=False,
                 note="needs a g2 construction"),
    CatalogEntry("row14", 14, "so(10)", "so(8)+so(2)", "spin(7)+so(2)", {}, supported=False,
                 note="needs the spin representation"),
    CatalogEntry("row15", 15, "so(11)", "so(8)+so(3)", "spin(7)+so(3)", {}, supported=False,
                 note="needs the spin representation"),
    CatalogEntry("sphere", None, "so(n+1)", "so(n)", "so(n)", {"n": 2}, _SYM, base_point=True,
                 note="symmetric pair as a triple with K = H"),
    CatalogEntry("so-un", None, "so(2n+1)", "u(n)", "su(n)", {"n": 2},
                 frozenset({"lh_commute", "ll_closed", "l_abelian"}),
                 note="triple behind SO(2n+1)/U(n) and SO(2n+1)/SU(n)"),
    CatalogEntry("so-group", None, "so(n)", "0", "0", {"n": 2},
                 note="the group itself, H trivial"),
]}

TABLE1_ROWS = tuple(e.id for e in CATALOG.values() if e.table_row is not None)
SUPPORTED_ROWS = tuple(i for i in TABLE1_ROWS if CATALOG[i].supported)

DEFAULT_MAX_AMBIENT = 30


def catalog_manifest() -> list[dict]:
    return [e.manifest() for e in CATALOG.values()]


# -- embeddings -------------------------------------------------------------

def _pad(M: np.ndarray, N: int, offset: int = 0) -> np.ndarray:
    out = np.zeros((N, N), dtype=M.dtype)
    k = M.shape[0]
    out[offset:offset + k, offset:offset + k] = M
    return out


def _u_in_so(Z: np.ndarray, N: int) -> np.ndarray:
    """P + iQ -> [[P, Q], [-Q, P]] padded with zeros to N x N."""
    P, Q = Z.real, Z.imag
    return _pad(np.block([[P, Q], [-Q, P]]), N)


def _center(sizes: tuple[int, int], n_total: int) -> np.ndarray:
    """Traceless i*diag(s2,...,s2, -s1,...,-s1): centralizes su(s1) + su(s2)."""
    s1, s2 = sizes
    d = np.zeros(n_total)
    d[:s1] = s2
    d[s1:s1 + s2] = -s1
    return 1j * np.diag(d)


def _build_row(cid: str, p: dict):
    """Return (g, h_mats, l_mats, base_point) for a catalog entry."""
    if cid == "row1":
        n = p["n"]
        g = build_algebra("so", 2 * n + 1)
        N = g.ambient_dim
        h = [_u_in_so(Z, N) for Z in u_complex_basis(n)]
        l = [_pad(M, N) for M in so_basis(2 * n)]
        return g, h, l, None
    if cid == "row2":
        n = p["n"]
        g = build_algebra("so", 4 * n + 1)
        N = g.ambient_dim
        h = [_u_in_so(Z, N) for Z in u_complex_basis(2 * n, traceless=True)]
        l = [_pad(M, N) for M in so_basis(4 * n)]
        return g, h, l, None
    if cid == "so-un":
        n = p["n"]
        g = build_algebra("so", 2 * n + 1)
        N = g.ambient_dim
        h = [_u_in_so(Z, N) for Z in u_complex_basis(n, traceless=True)]
        l = [_u_in_so(1j * np.eye(n), N)]
        return g, h, l, None
    if cid == "row11":
        r = p["r"]
        g = build_algebra("so", 4 * r + 2)
        N = g.ambient_dim
        h = [_u_in_so(Z, N) for Z in u_complex_basis(2 * r + 1, traceless=True)]
        l = [_u_in_so(1j * np.eye(2 * r + 1), N)]
        return g, h, l, None
    if cid == "row5":
        n = p["n"]
        g = build_algebra("su", n + 1)
        h = [realify(_pad(Z, n + 1, 1)) for Z in u_complex_basis(n, traceless=True)]
        l = [realify(_center((1, n), n + 1))]
        return g, h, l, _e0(g)
    if cid in ("row6", "row7"):
        n = p["n"]
        g = build_algebra("su", 2 * n + 1)
        c = realify(_center((1, 2 * n), 2 * n + 1))
        sp = [realify(_pad(Z, 2 * n + 1, 1)) for Z in sp_complex_basis(n)]
        su = [realify(_pad(Z, 2 * n + 1, 1)) for Z in u_complex_basis(2 * n, traceless=True)]
        if cid == "row6":
            return g, [c] + sp, su, None
        return g, sp, [c] + su, None
    if cid in ("row8", "row9"):
        n = p["n"]
        g = build_algebra("sp", n + 1)
        N = g.ambient_dim
        sp_n = [_pad(M, N, 4) for M in sp_real_basis(n)]
        slot0 = [_pad(q, N) for q in QUAT_UNITS[1:]]
        if cid == "row8":
            return g, [slot0[0]] + sp_n, slot0[1:], None
        return g, sp_n, slot0, _e0(g)
    if cid == "row10":
        r, n = p["r"], p["n"]
        size = 2 * r + n
        g = build_algebra("su", size)
        h = [realify(_pad(Z, size, 0)) for Z in u_complex_basis(r, traceless=True)]
        h += [realify(_pad(Z, size, r)) for Z in u_complex_basis(r + n, traceless=True)]
        l = [realify(_center((r, r + n), size))]
        return g, h, l, None
    if cid == "sphere":
        n = p["n"]
        g = build_algebra("so", n + 1)
        h = [_pad(M, n + 1, 1) for M in so_basis(n)] if n >= 2 else []
        return g, h, [], _e0(g)
    if cid == "so-group":
        g = build_algebra("so", p["n"])
        return g, [], [], None
    raise CatalogError(f"no construction for {cid!r}")


def _e0(g: LieAlgebraRep) -> np.ndarray:
    e = np.zeros(g.ambient_dim)
    e[0] = 1.0
    return e


# -- the space ----------------------------------------------------------------

class HomogeneousSpace:
    """G/H with reductive decomposition g = h ⊕ l ⊕ m in an adapted frame."""

    def __init__(self, catalog_id: str, params: dict, g: LieAlgebraRep,
                 frame: np.ndarray, dims: tuple[int, int, int],
                 base_point: np.ndarray | None = None):
        frame = np.array(frame, dtype=float)
        frame.setflags(write=False)
        self.catalog_id = catalog_id
        self.params = dict(params)
        self.g = g
        self.frame = frame  # rows: adapted basis in g-coefficients
        self.dim = g.dim
        self.dim_h, self.dim_l, self.dim_m = dims
        self.base_point = base_point
        self.h = slice(0, self.dim_h)
        self.l = slice(self.dim_h, self.dim_h + self.dim_l)
        self.m = slice(self.dim_h + self.dim_l, self.dim)
        self.v = slice(self.dim_h, self.dim)
        self.k = slice(0, self.dim_h + self.dim_l)
        self.flags: frozenset = frozenset()

    def __repr__(self):
        return (f"HomogeneousSpace({self.label}, dim h={self.dim_h}, "
                f"dim l={self.dim_l}, dim m={self.dim_m})")

    @property
    def label(self) -> str:
        ps = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.catalog_id}[{ps}]"

    @property
    def dim_v(self) -> int:
        return self.dim_l + self.dim_m

    @property
    def entry(self) -> CatalogEntry:
        return CATALOG[self.catalog_id]

    def part(self, name: str) -> slice:
        return {"h": self.h, "l": self.l, "m": self.m, "v": self.v, "k": self.k,
                "g": slice(0, self.dim)}[name]

    @staticmethod
    def acting_part(domain: str) -> str:
        """Subalgebra acting on a domain: h on v, k on m."""
        return {"v": "h", "m": "k"}[domain]

    def basis(self, name: str) -> np.ndarray:
        """Rows of the adapted frame spanning a part, in g-coefficients."""
        return self.frame[self.part(name)]

    def project(self, x: np.ndarray, name: str) -> np.ndarray:
        out = np.zeros_like(np.asarray(x, dtype=float))
        sl = self.part(name)
        out[..., sl] = np.asarray(x)[..., sl]
        return out

    def embed(self, coords, name: str = "v") -> np.ndarray:
        """Full adapted vector from coordinates on one part."""
        coords = np.asarray(coords, dtype=float)
        sl = self.part(name)
        out = np.zeros(coords.shape[:-1] + (self.dim,))
        out[..., sl] = coords
        return out

    def to_g(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x) @ self.frame

    def from_g(self, y: np.ndarray) -> np.ndarray:
        return np.asarray(y) @ self.frame.T

    def matrix(self, x: np.ndarray) -> np.ndarray:
        return self.g.matrix(self.to_g(x))

    def coeffs(self, M: np.ndarray) -> np.ndarray:
        return self.from_g(self.g.coeffs(M))

    @cached_property
    def structure_constants(self) -> np.ndarray:
        """C[i, j, k] = <e_k, [e_i, e_j]> in the adapted frame."""
        mats = self.matrix(np.eye(self.dim))
        C = np.empty((self.dim, self.dim, self.dim))
        for i in range(self.dim):
            comm = mats[i] @ mats - mats @ mats[i]
            C[i] = self.coeffs(comm)
        C.setflags(write=False)
        return C

    def bracket(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.einsum("...i,...j,ijk->...k", x, y, self.structure_constants)

    def ad(self, x: np.ndarray) -> np.ndarray:
        """Matrix of y -> [x, y]."""
        return np.einsum("i,ijk->kj", x, self.structure_constants)

    def random_vector(self, rng: np.random.Generator, name: str = "v") -> np.ndarray:
        sl = self.part(name)
        x = np.zeros(self.dim)
        x[sl] = rng.standard_normal(sl.stop - sl.start)
        return x

    def orbit_residuals(self) -> dict[str, float]:
        """Structural residuals checked at construction."""
        C = self.structure_constants
        h, m, v, k = self.h, self.m, self.v, self.k
        res = {
            "gram": float(np.max(np.abs(self.frame @ self.frame.T - np.eye(self.dim)))),
            "reductive": _block_max(C[h, v][..., h]),
            "k_closed": _block_max(C[k, k][..., m]),
            "h_closed": _block_max(C[h, h][..., v]),
        }
        return res

    def measured_flags(self, tol: float = EPS_ZERO) -> dict[str, float]:
        C = self.structure_constants
        h, l, m = self.h, self.l, self.m
        return {
            "lh_commute": _block_max(C[l, h]),
            "ll_closed": _block_max(C[l, l][..., _compl(self, l)]),
            "l_abelian": _block_max(C[l, l]),
            "symmetric": _block_max(C[m, m][..., m]) if self.dim_m else 0.0,
        }

    def base_point_residual(self) -> float:
        if self.base_point is None:
            return 0.0
        H = self.matrix(np.eye(self.dim)[self.h])
        return float(np.max(np.abs(H @ self.base_point), initial=0.0))


def _compl(space: HomogeneousSpace, sl: slice) -> np.ndarray:
    idx = np.arange(space.dim)
    return idx[(idx < sl.start) | (idx >= sl.stop)]


def _block_max(a: np.ndarray) -> float:
    return float(np.max(np.abs(a), initial=0.0))


def resolve_params(catalog_id: str, params: dict | None = None) -> dict:
    if catalog_id not in CATALOG:
        raise CatalogError(f"unknown catalog id {catalog_id!r}; known: {sorted(CATALOG)}")
    entry = CATALOG[catalog_id]
    if not entry.supported:
        raise CatalogError(f"{catalog_id} ({entry.g} ⊃ {entry.k} ⊃ {entry.h}) is not supported: {entry.note}")
    params = dict(params or {})
    unknown = set(params) - set(entry.params)
    if unknown:
        raise CatalogError(f"{catalog_id} takes parameters {sorted(entry.params)}, got {sorted(unknown)}")
    out = {}
    for name, lo in entry.params.items():
        val = params.get(name, lo)
        if int(val) != val or val < lo:
            raise CatalogError(f"{catalog_id}: parameter {name}={val} must be an integer >= {lo}")
        out[name] = int(val)
    return out


def build_space(catalog_id: str, params: dict | None = None, *,
                max_ambient: int | None = DEFAULT_MAX_AMBIENT) -> HomogeneousSpace:
    """Construct and verify a catalog entry; raises CatalogError on any failed invariant."""
    p = resolve_params(catalog_id, params)
    return _build_space(catalog_id, tuple(sorted(p.items())), max_ambient)


@lru_cache(maxsize=64)
def _build_space(catalog_id: str, items: tuple, max_ambient: int | None) -> HomogeneousSpace:
    p = dict(items)
    g, h_mats, l_mats, base = _build_row(catalog_id, p)
    if max_ambient is not None and g.ambient_dim > max_ambient:
        raise CatalogError(f"{catalog_id}{p}: ambient size {g.ambient_dim} exceeds {max_ambient}")
    for name, mats in (("h", h_mats), ("l", l_mats)):
        if len(mats):
            res = g.membership_residual(np.array(mats))
            if res > EPS_ZERO:
                raise CatalogError(f"{catalog_id}: {name} generators leave g (residual {res:.3g})")
    h_co = g.coeffs(np.array(h_mats)) if len(h_mats) else np.zeros((0, g.dim))
    l_co = g.coeffs(np.array(l_mats)) if len(l_mats) else np.zeros((0, g.dim))
    h_b = gram_schmidt(h_co)
    l_b = gram_schmidt(l_co, against=h_b)
    m_b = gram_schmidt(np.eye(g.dim), against=np.vstack([h_b, l_b]))
    frame = np.vstack([h_b, l_b, m_b])
    if frame.shape[0] != g.dim:
        raise CatalogError(f"{catalog_id}: adapted frame has {frame.shape[0]} rows, expected {g.dim}")
    space = HomogeneousSpace(catalog_id, p, g, frame, (len(h_b), len(l_b), len(m_b)), base)

    for name, res in space.orbit_residuals().items():
        if res > EPS_ZERO:
            raise CatalogError(f"{space.label}: invariant {name} fails (residual {res:.3g})")
    measured = space.measured_flags()
    for flag in CATALOG[catalog_id].flags:
        if measured[flag] > EPS_ZERO:
            raise CatalogError(f"{space.label}: cataloged flag {FLAG_NAMES[flag]} fails "
                               f"(residual {measured[flag]:.3g})")
    if space.base_point_residual() > EPS_ZERO:
        raise CatalogError(f"{space.label}: base point not fixed by H")
    space.flags = frozenset(
        f for f, r in measured.items()
        if r <= EPS_ZERO and (space.dim_m if f == "symmetric" else space.dim_l))
    return space


# -- metrics ----------------------------------------------------------------

@dataclass(frozen=True)
class Normal:
    def describe(self) -> dict:
        return {"variant": "normal"}


@dataclass(frozen=True)
class Lambda:
    lam: float

    def describe(self) -> dict:
        return {"variant": "lambda", "lambda": self.lam}


@dataclass(frozen=True)
class FiberOperator:
    A_l: tuple  # rows of a symmetric matrix on l
    lam_m: float = 1.0

    @classmethod
    def diag(cls, values, lam_m: float = 1.0) -> "FiberOperator":
        return cls(tuple(tuple(float(v) if i == j else 0.0 for j in range(len(values)))
                         for i, v in enumerate(values)), lam_m)

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.A_l, dtype=float)

    def describe(self) -> dict:
        return {"variant": "fiber", "A_l": [list(r) for r in self.A_l], "lambda_m": self.lam_m}


MetricSpec = Union[Normal, Lambda, FiberOperator]


class MetricOperators(NamedTuple):
    I: np.ndarray
    A: np.ndarray


def ad_h_on_v(space: HomogeneousSpace) -> np.ndarray:
    """Stack of the matrices of y -> [eta, y] on v, one per basis eta of h."""
    return np.transpose(space.structure_constants[space.h, space.v][..., space.v], (0, 2, 1))


def metric_invariance_residual(space: HomogeneousSpace, I: np.ndarray) -> float:
    D = ad_h_on_v(space)
    if not len(D):
        return 0.0
    return float(np.max(np.abs(D @ I - I @ D)))


def metric_operator(space: HomogeneousSpace, spec: MetricSpec) -> MetricOperators:
    """I and A = I^{-1} as matrices on v (l-block first, then m)."""
    dl, dm = space.dim_l, space.dim_m
    if isinstance(spec, Normal):
        I_l, A_l, I_m, A_m = np.eye(dl), np.eye(dl), np.eye(dm), np.eye(dm)
    elif isinstance(spec, Lambda):
        if not spec.lam > 0:
            raise ValueError(f"lambda must be positive, got {spec.lam}")
        I_l, A_l = spec.lam * np.eye(dl), np.eye(dl) / spec.lam
        I_m, A_m = np.eye(dm), np.eye(dm)
    elif isinstance(spec, FiberOperator):
        if dl == 0:
            raise ValueError(f"{space.label}: fiber operator needs a nontrivial l")
        I_l = spec.matrix
        if I_l.shape != (dl, dl):
            raise ValueError(f"A_l must be {dl}x{dl}, got {I_l.shape}")
        if np.max(np.abs(I_l - I_l.T)) > 0:
            raise ValueError("A_l must be symmetric")
        if np.linalg.eigvalsh(I_l)[0] <= 0 or not spec.lam_m > 0:
            raise ValueError("fiber operator must be positive definite")
        A_l = np.linalg.inv(I_l)
        A_l = (A_l + A_l.T) / 2
        I_m, A_m = spec.lam_m * np.eye(dm), np.eye(dm) / spec.lam_m
    else:
        raise TypeError(f"unknown metric spec {spec!r}")
    I = _blockdiag(I_l, I_m)
    res = metric_invariance_residual(space, I)
    if res > EPS_ZERO:
        raise ValueError(f"{space.label}: metric is not Ad_H-invariant (residual {res:.3g})")
    return MetricOperators(I, _blockdiag(A_l, A_m))


def _blockdiag(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n, m = a.shape[0], b.shape[0]
    out = np.zeros((n + m, n + m))
    out[:n, :n] = a
    out[n:, n:] = b
    return out


# -- Hamiltonians -------------------------------------------------------------

class Hamiltonians(NamedTuple):
    h_A: InvariantPolynomial
    h_0: InvariantPolynomial
    delta: InvariantPolynomial


def quadratic(space: HomogeneousSpace, Q: np.ndarray, label: str,
              domain: str = "v", **meta) -> InvariantPolynomial:
    """x -> 1/2 <Q x_dom, x_dom> for a symmetric Q on the domain."""
    sl = space.part(domain)
    Q = np.array(Q, dtype=float)

    def value(x):
        y = np.asarray(x)[sl]
        return 0.5 * y @ Q @ y

    def gradient(x):
        out = np.zeros(space.dim)
        out[sl] = Q @ np.asarray(x)[sl]
        return out

    return InvariantPolynomial(label, 2, value, gradient, space, domain, dict(meta))


def hamiltonian(space: HomogeneousSpace, metric: MetricSpec) -> Hamiltonians:
    ops = metric_operator(space, metric)
    dl = space.dim_l
    delta_Q = _blockdiag(np.eye(dl), np.zeros((space.dim_m, space.dim_m)))
    return Hamiltonians(
        quadratic(space, ops.A, "h_A", metric=metric),
        quadratic(space, np.eye(space.dim_v), "h_0"),
        quadratic(space, delta_Q, "delta"),
    )


class PerturbedHamiltonian(NamedTuple):
    poly: InvariantPolynomial
    min_eigenvalue: float


def perturbed_hamiltonian(space: HomogeneousSpace, lam: float, A_l) -> PerturbedHamiltonian:
    """h_lam(x) + 1/2 <x_l, A_l x_l>, rejected unless positive definite."""
    if space.dim_l == 0:
        raise ValueError(f"{space.label}: perturbation needs a nontrivial l")
    A_l = np.atleast_2d(np.asarray(A_l, dtype=float))
    if A_l.shape != (space.dim_l, space.dim_l) or np.max(np.abs(A_l - A_l.T)) > 0:
        raise ValueError(f"A_l must be a symmetric {space.dim_l}x{space.dim_l} matrix")
    Q = metric_operator(space, Lambda(lam)).A
    Q[:space.dim_l, :space.dim_l] += A_l
    lo = float(np.linalg.eigvalsh(Q)[0])
    if lo <= 0:
        raise ValueError(f"h_(lambda,A) is not positive definite: smallest eigenvalue {lo:.6g}")
    poly = quadratic(space, Q, "h_lambda_A", lam=lam, A_l=A_l)
    return PerturbedHamiltonian(poly, lo)
