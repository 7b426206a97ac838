"""Geodesic-orbit tests: geodesic lemma, Hamiltonian centrality, Gordon's split condition.

All residuals are normalized so they are invariant under x -> c x.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .homspace import (
    FiberOperator,
    HomogeneousSpace,
    Lambda,
    MetricSpec,
    Normal,
    metric_invariance_residual,
    metric_operator,
)
from .linalg import EPS_ZERO, RANK_RTOL, lstsq_min_norm, rank

ACCEPT_TOL = 1e-8
REJECT_TOL = 1e-4
DEFAULT_SAMPLES = 8
MAX_RESAMPLE = 64


class Verdict(str, Enum):
    GO = "GO"
    NOT_GO = "NOT_GO"
    INDETERMINATE = "INDETERMINATE"


def classify(residuals, accept_tol: float = ACCEPT_TOL, reject_tol: float = REJECT_TOL) -> Verdict:
    residuals = np.asarray(residuals, dtype=float)
    if np.any(residuals > reject_tol):
        return Verdict.NOT_GO
    if np.all(residuals < accept_tol):
        return Verdict.GO
    return Verdict.INDETERMINATE


@dataclass
class GeodesicGenerator:
    F: np.ndarray         # adapted coordinates, supported on h
    residual: float
    rank: int             # rank of the least-squares system
    X: np.ndarray         # normalized input


def _as_v(space: HomogeneousSpace, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.shape == (space.dim_v,):
        X = space.embed(X, "v")
    if X.shape != (space.dim,):
        raise ValueError(f"expected a vector of length {space.dim} or {space.dim_v}")
    if np.max(np.abs(X[space.h]), initial=0.0) > EPS_ZERO * max(1.0, np.linalg.norm(X)):
        raise ValueError("vector has a component in h")
    X = space.project(X, "v")
    if not np.linalg.norm(X) > 0:
        raise ValueError("vector must be nonzero")
    return X


def solve_geodesic_generator(space: HomogeneousSpace, metric: MetricSpec, X) -> GeodesicGenerator:
    """Least-squares F in h with ([X + F, Y]_v, X)_I = 0 for all Y in v.

    The residual vector has entries r_j = <I X, [X + F, Y_j]> over the
    orthonormal basis Y_j of v; the reported residual is ||r|| / ||X||^2 for
    X scaled to unit I-norm.
    """
    ops = metric_operator(space, metric)
    X = _as_v(space, X)
    Xv = X[space.v]
    X = X / np.sqrt(Xv @ ops.I @ Xv)
    Xv = X[space.v]
    IX = ops.I @ Xv
    C = space.structure_constants
    # P[i, j] = <I X, [e_i, Y_j]> for e_i in g, Y_j in v.
    P = C[:, space.v][..., space.v] @ IX
    b = X @ P
    M = P[space.h].T
    z, split = lstsq_min_norm(M, -b, RANK_RTOL, scale=1.0)
    r = b + M @ z
    F = space.embed(z, "h")
    return GeodesicGenerator(F, float(np.linalg.norm(r) / (Xv @ Xv)), split.rank, X)


@dataclass
class CentralityResult:
    residual: float       # min_a ||[a + A x, x]|| / ||x||^2
    h_part: float         # ||[x, A x]_h|| / ||x||^2, zero by Ad_H-invariance
    a: np.ndarray


def centrality_residual(space: HomogeneousSpace, metric: MetricSpec, x) -> CentralityResult:
    """How far A x = grad h_A(x) is from pr_v g_x, measured as min over a in h."""
    ops = metric_operator(space, metric)
    inv = metric_invariance_residual(space, ops.I)
    if inv > EPS_ZERO:
        raise ValueError(f"metric is not Ad_H-invariant (residual {inv:.3g})")
    x = _as_v(space, x)
    x = x / np.linalg.norm(x)
    Ax = space.embed(ops.A @ x[space.v], "v")
    ad_x = space.ad(x)                      # y -> [x, y]
    target = -ad_x @ Ax                     # [Ax, x]
    M = -ad_x[:, space.h]                   # a -> [a, x]
    z, _ = lstsq_min_norm(M, -target, RANK_RTOL, scale=1.0)
    res = target + M @ z
    h_part = np.linalg.norm(space.bracket(x, Ax)[space.h])
    return CentralityResult(float(np.linalg.norm(res)), float(h_part), space.embed(z, "h"))


@dataclass
class GordonResult:
    residual_l: float
    residual_m: float
    a: np.ndarray

    @property
    def residual(self) -> float:
        return float(np.hypot(self.residual_l, self.residual_m))


def gordon_check(space: HomogeneousSpace, metric, x) -> GordonResult:
    """Joint least squares for [a, x_l] = 0 and [a + x_l, x_m] = 0 over a in h.

    ``metric`` is a positive lambda or a Normal/Lambda spec; the condition
    does not depend on its value. Other metric families are rejected.
    """
    if isinstance(metric, FiberOperator):
        raise ValueError("Gordon's condition applies to the lambda-deformed family only")
    if isinstance(metric, Lambda):
        metric = metric.lam
    if isinstance(metric, Normal):
        metric = 1.0
    if not float(metric) > 0:
        raise ValueError("lambda must be positive")
    if space.dim_l == 0:
        raise ValueError(f"{space.label}: Gordon's condition needs a triple with l != 0")
    x = _as_v(space, x)
    x = x / np.linalg.norm(x)
    xl, xm = space.project(x, "l"), space.project(x, "m")
    ad_l, ad_m = space.ad(xl), space.ad(xm)
    # [a, x_l] = -ad_l a ; [a + x_l, x_m] = -ad_m a - ad_m x_l
    M = np.vstack([-ad_l[:, space.h], -ad_m[:, space.h]])
    b = np.concatenate([np.zeros(space.dim), -ad_m @ xl])
    z, _ = lstsq_min_norm(M, -b, RANK_RTOL, scale=1.0)
    r = b + M @ z
    n = space.dim
    return GordonResult(float(np.linalg.norm(r[:n])), float(np.linalg.norm(r[n:])),
                        space.embed(z, "h"))


def natural_reductivity_residual(space: HomogeneousSpace, metric: MetricSpec) -> float:
    """max over basis triples of v of |([X,Y]_v, Z) + (Y, [X,Z]_v)| / ||I||."""
    I = metric_operator(space, metric).I
    C = space.structure_constants[space.v][:, space.v][..., space.v]  # [X_i, Y_j] -> k
    CI = C @ I                              # ([X_i, Y_j]_v, Z_k)
    T = CI + np.transpose(CI, (0, 2, 1))
    return float(np.max(np.abs(T), initial=0.0) / np.linalg.norm(I, 2)) if space.dim_v else 0.0


def generic_isotropy_h(space: HomogeneousSpace, x: np.ndarray) -> int:
    """dim h_x at x (used to flag non-generic samples)."""
    ad_x = space.ad(x)
    split = rank(ad_x[:, space.h], scale=np.linalg.norm(x))
    return space.dim_h - split.rank


@dataclass
class Sample:
    x: np.ndarray
    solver_output: np.ndarray
    residual: float
    rank: int = 0


@dataclass
class GoCertificate:
    space_id: str
    metric: MetricSpec
    samples: list[Sample]
    verdict: Verdict
    thresholds: tuple[float, float]
    seed: int
    degenerate_dropped: int = 0
    label: str = "sampled certificate"

    @property
    def residuals(self) -> np.ndarray:
        return np.array([s.residual for s in self.samples])

    def to_dict(self) -> dict:
        return {
            "space": self.space_id,
            "metric": self.metric.describe(),
            "verdict": self.verdict.value,
            "kind": self.label,
            "accept_tol": self.thresholds[0],
            "reject_tol": self.thresholds[1],
            "seed": self.seed,
            "residuals": [float(r) for r in self.residuals],
            "max_residual": float(self.residuals.max()),
            "degenerate_dropped": self.degenerate_dropped,
        }


def sample_generic(space: HomogeneousSpace, n_samples: int, rng: np.random.Generator,
                   part: str = "v") -> tuple[list[np.ndarray], int]:
    """Unit Gaussian samples in ``part``, dropping ones with a jump in dim h_x."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    draws = []
    for _ in range(n_samples):
        x = space.random_vector(rng, part)
        draws.append(x / np.linalg.norm(x))
    hx = [generic_isotropy_h(space, x) for x in draws]
    floor = min(hx)
    kept = [x for x, d in zip(draws, hx) if d == floor]
    dropped = 0
    tries = 0
    while len(kept) < n_samples and tries < MAX_RESAMPLE:
        tries += 1
        x = space.random_vector(rng, part)
        x /= np.linalg.norm(x)
        d = generic_isotropy_h(space, x)
        if d == floor:
            kept.append(x)
        else:
            dropped += 1
    return kept, dropped + (len(draws) - sum(d == floor for d in hx))


def go_check(space: HomogeneousSpace, metric: MetricSpec, n_samples: int = DEFAULT_SAMPLES,
             seed: int = 0, accept_tol: float = ACCEPT_TOL,
             reject_tol: float = REJECT_TOL) -> GoCertificate:
    """Sampled g.o. certificate from the geodesic lemma."""
    rng = np.random.default_rng(seed)
    xs, dropped = sample_generic(space, n_samples, rng)
    samples = []
    for x in xs:
        sol = solve_geodesic_generator(space, metric, x)
        samples.append(Sample(sol.X, sol.F, sol.residual, sol.rank))
    verdict = classify([s.residual for s in samples], accept_tol, reject_tol)
    return GoCertificate(space.label, metric, samples, verdict, (accept_tol, reject_tol),
                         seed, dropped)


@dataclass
class CrossValidation:
    """Per-sample residuals of the three criteria and their verdicts."""

    space_id: str
    metric: MetricSpec
    geodesic: list[float]
    centrality: list[float]
    gordon: list[float] | None
    verdicts: dict[str, Verdict] = field(default_factory=dict)
    seed: int = 0

    @property
    def agree(self) -> bool:
        vs = set(self.verdicts.values())
        return len(vs) == 1 and Verdict.INDETERMINATE not in vs

    @property
    def verdict(self) -> Verdict:
        vs = set(self.verdicts.values())
        return vs.pop() if len(vs) == 1 else Verdict.INDETERMINATE

    def to_dict(self) -> dict:
        out = {
            "space": self.space_id,
            "metric": self.metric.describe(),
            "seed": self.seed,
            "verdict": self.verdict.value,
            "agree": self.agree,
            "criteria": {},
        }
        for name, res in (("geodesic_lemma", self.geodesic), ("centrality", self.centrality),
                          ("gordon", self.gordon)):
            if res is None:
                continue
            out["criteria"][name] = {
                "verdict": self.verdicts[name].value,
                "residuals": [float(r) for r in res],
                "max_residual": float(max(res)),
            }
        return out


def cross_validate(space: HomogeneousSpace, metric: MetricSpec, n_samples: int = DEFAULT_SAMPLES,
                   seed: int = 0, accept_tol: float = ACCEPT_TOL,
                   reject_tol: float = REJECT_TOL) -> CrossValidation:
    """Run the three criteria on the same samples.

    The geodesic lemma is evaluated at X, centrality at x = I X, and Gordon's
    split condition (lambda family on triples only) at x.
    """
    cert = go_check(space, metric, n_samples, seed, accept_tol, reject_tol)
    I = metric_operator(space, metric).I
    geodesic = [s.residual for s in cert.samples]
    central = []
    gordon = [] if space.dim_l and not isinstance(metric, FiberOperator) else None
    for s in cert.samples:
        x = space.embed(I @ s.x[space.v], "v")
        central.append(centrality_residual(space, metric, x).residual)
        if gordon is not None:
            gordon.append(gordon_check(space, metric, x).residual)
    cv = CrossValidation(space.label, metric, geodesic, central, gordon, seed=seed)
    cv.verdicts["geodesic_lemma"] = cert.verdict
    cv.verdicts["centrality"] = classify(central, accept_tol, reject_tol)
    if gordon is not None:
        cv.verdicts["gordon"] = classify(gordon, accept_tol, reject_tol)
    return cv
