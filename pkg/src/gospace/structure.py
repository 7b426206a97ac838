"""Generic isotropy dimensions, ddim, dind and complexity of invariant algebras.

For a reduction (acting subalgebra s, domain d = s^perp) and generic x in d:

    ddim = dim d - dim s + dim s_x  (= dim j_x)
    dind = dim g_x - dim s_x        (= dim ker Lambda_x)
    complexity = (ddim - dind) / 2

The right-hand equalities are computed independently and cross-checked.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .homspace import HomogeneousSpace
from .linalg import RANK_RTOL, nullspace, rank, row_range

MAX_SAMPLES = 64


@dataclass
class PointDims:
    dim_gx: int
    dim_sx: int
    dim_jx: int
    dim_ker_lambda: int
    dim_pr_gx: int
    gap: float


@dataclass
class ComplexityReport:
    space_id: str
    submodule: str
    dim_g: int
    dim_h: int
    dim_v: int
    dim_gx: int
    dim_hx: int
    dim_jx: int
    dim_ker_lambda: int
    ddim: int
    dind: int
    complexity: int | None
    n_samples: int
    seed: int
    rank_gap: float
    issues: list[str] = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return not self.issues

    def to_dict(self) -> dict:
        return {
            "space": self.space_id,
            "submodule": self.submodule,
            "dims": {"g": self.dim_g, "acting": self.dim_h, "domain": self.dim_v},
            "generic": {"g_x": self.dim_gx, "h_x": self.dim_hx, "j_x": self.dim_jx,
                        "ker_lambda": self.dim_ker_lambda},
            "ddim": self.ddim,
            "dind": self.dind,
            "complexity": self.complexity,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "rank_gap": self.rank_gap,
            "consistent": self.consistent,
            "issues": list(self.issues),
        }


def _reduction(space: HomogeneousSpace, submodule: str) -> tuple[slice, slice]:
    if submodule not in ("v", "m"):
        raise ValueError(f"submodule must be 'v' or 'm', got {submodule!r}")
    dom = space.part(submodule)
    if dom.stop == dom.start:
        raise ValueError(f"{space.label}: submodule {submodule} is zero")
    return space.part(space.acting_part(submodule)), dom


def isotropy_dimensions(space: HomogeneousSpace, x, acting: str = "h",
                        rtol: float = RANK_RTOL) -> tuple[int, int]:
    """(dim g_x, dim s_x) with s the acting subalgebra (h by default)."""
    x = np.asarray(x, dtype=float)
    scale = np.linalg.norm(x)
    if not scale > 0:
        raise ValueError("x must be nonzero")
    ad_x = space.ad(x)
    s = space.part(acting)
    gx = space.dim - rank(ad_x, rtol, scale).rank
    sx = (s.stop - s.start) - rank(ad_x[:, s], rtol, scale).rank
    return gx, sx


def point_dims(space: HomogeneousSpace, x: np.ndarray, submodule: str = "v",
               rtol: float = RANK_RTOL) -> PointDims:
    """All isotropy-related dimensions at one point, each from its own SVD."""
    act, dom = _reduction(space, submodule)
    scale = np.linalg.norm(x)
    ad_x = space.ad(x)
    gaps = []

    g_ker, split = nullspace(ad_x, rtol, scale)
    gaps.append(split.gap)
    split = rank(ad_x[:, act], rtol, scale)
    gaps.append(split.gap)
    dim_sx = (act.stop - act.start) - split.rank

    # j_x: orthogonal complement in the domain of [x, s].
    image = ad_x[dom, act].T                  # rows: [x, eta_a] restricted to domain
    img_basis, split = row_range(image, rtol, scale)
    gaps.append(split.gap)
    dom_dim = dom.stop - dom.start
    J = nullspace(img_basis, rtol, 1.0)[0] if img_basis.shape[0] else np.eye(dom_dim)

    # Lambda_x(eta1, eta2) = -<x, [eta1, eta2]> on j_x.
    L = -np.einsum("k,ijk->ij", x, space.structure_constants)[dom, dom]
    split = rank(J @ L @ J.T, rtol, scale)
    gaps.append(split.gap)
    ker_lambda = J.shape[0] - split.rank

    # pr_domain g_x, which should coincide with ker Lambda_x.
    split = rank(g_ker[:, dom], rtol, 1.0) if g_ker.shape[0] else None
    if split is not None:
        gaps.append(split.gap)
    pr_gx = split.rank if split is not None else 0

    return PointDims(g_ker.shape[0], dim_sx, J.shape[0], ker_lambda, pr_gx, min(gaps))


def generic_dims(space: HomogeneousSpace, n_samples: int = 8, seed: int = 0,
                 submodule: str = "v", rtol: float = RANK_RTOL) -> ComplexityReport:
    """ddim, dind and complexity from generic samples in the chosen domain.

    Generic values are the minima over samples; at least half of the samples
    must attain them, otherwise more are drawn (up to 64 in total).
    """
    if n_samples < 4:
        raise ValueError("n_samples must be >= 4")
    act, dom = _reduction(space, submodule)
    rng = np.random.default_rng(seed)
    pts: list[PointDims] = []

    def draw():
        x = space.random_vector(rng, submodule)
        pts.append(point_dims(space, x / np.linalg.norm(x), submodule, rtol))

    for _ in range(n_samples):
        draw()
    issues = []
    while True:
        key_min = min((p.dim_gx, p.dim_sx) for p in pts)
        generic = [p for p in pts if (p.dim_gx, p.dim_sx) == key_min]
        if 2 * len(generic) >= len(pts):
            break
        if len(pts) >= MAX_SAMPLES:
            issues.append(f"generic isotropy attained by only {len(generic)}/{len(pts)} samples")
            break
        draw()

    dim_gx, dim_hx = key_min
    dim_s = act.stop - act.start
    dim_d = dom.stop - dom.start
    ddim = dim_d - dim_s + dim_hx
    dind = dim_gx - dim_hx
    for i, p in enumerate(generic):
        if p.dim_jx != ddim:
            issues.append(f"sample {i}: dim j_x = {p.dim_jx} but ddim formula gives {ddim}")
        if p.dim_ker_lambda != dind:
            issues.append(f"sample {i}: dim ker Lambda_x = {p.dim_ker_lambda} but dind formula gives {dind}")
        if p.dim_pr_gx != p.dim_ker_lambda:
            issues.append(f"sample {i}: dim pr g_x = {p.dim_pr_gx} differs from dim ker Lambda_x")
    if (ddim - dind) % 2 or ddim < dind:
        issues.append(f"ddim - dind = {ddim - dind} is not a nonnegative even integer")
        complexity = None
    else:
        complexity = (ddim - dind) // 2
    dim_jx = generic[0].dim_jx
    ker_lambda = generic[0].dim_ker_lambda
    return ComplexityReport(
        space.label, submodule, space.dim, dim_s, dim_d, dim_gx, dim_hx, dim_jx, ker_lambda,
        ddim, dind, complexity, len(pts), seed, float(min(p.gap for p in pts)), issues)


def complexity_on_submodule(space: HomogeneousSpace, submodule: str = "m", n_samples: int = 8,
                            seed: int = 0) -> ComplexityReport:
    """Same pipeline with (h, v) replaced by (k, m) when submodule is 'm'."""
    return generic_dims(space, n_samples, seed, submodule)


def isotropy_inequality(space: HomogeneousSpace, n_samples: int = 8,
                        seed: int = 0) -> tuple[int, int]:
    """Generic (dim g_x, dim g_{x_m}) over the same samples x in v."""
    if space.dim_m == 0:
        raise ValueError(f"{space.label}: m is zero")
    rng = np.random.default_rng(seed)
    full, mpart = [], []
    for _ in range(n_samples):
        x = space.random_vector(rng, "v")
        x /= np.linalg.norm(x)
        xm = space.project(x, "m")
        full.append(isotropy_dimensions(space, x)[0])
        mpart.append(isotropy_dimensions(space, xm / np.linalg.norm(xm))[0])
    return min(full), min(mpart)


def _wedge(N: int, i: int, j: int) -> np.ndarray:
    M = np.zeros((N, N))
    M[i - 1, j - 1], M[j - 1, i - 1] = -1.0, 1.0
    return M


def unitary_witness(space: HomogeneousSpace, alphas, betas) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic point x_m = x1 + x2 in m for the (so(2n+1), u(n)) triple, n even.

    x1 = sum_k alpha_k (E_{2k-1}^E_{2k} - E_{2m+2k-1}^E_{2m+2k}),
    x2 = sum_i beta_i E_i^E_{4m+1},  m = n/2.
    Returns the adapted coordinates of (x1, x2). For odd n the pattern
    leaves m, so it is rejected.
    """
    if space.catalog_id != "so-un":
        raise ValueError("the witness is defined for the so-un triple only")
    n = space.params["n"]
    if n % 2:
        raise ValueError(f"witness pattern leaves m for odd n (n={n})")
    m, N = n // 2, 2 * n + 1
    alphas, betas = np.asarray(alphas, float), np.asarray(betas, float)
    if alphas.shape != (m,) or betas.shape != (4 * m,):
        raise ValueError(f"need {m} alphas and {4 * m} betas")
    x1 = sum(a * (_wedge(N, 2 * k - 1, 2 * k) - _wedge(N, 2 * m + 2 * k - 1, 2 * m + 2 * k))
             for k, a in enumerate(alphas, 1))
    x2 = sum(b * _wedge(N, i, 4 * m + 1) for i, b in enumerate(betas, 1))
    c1, c2 = space.coeffs(x1), space.coeffs(x2)
    for c in (c1, c2):
        if np.linalg.norm(c[space.k]) > 1e-12 * max(np.linalg.norm(c), 1.0):
            raise ValueError("witness has a component in k")
    return c1, c2
