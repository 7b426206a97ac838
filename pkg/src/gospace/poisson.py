"""Reduced Lie-Poisson bracket on invariant polynomials and commutative families."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .goverify import ACCEPT_TOL
from .homspace import HomogeneousSpace, Normal, hamiltonian, quadratic
from .linalg import RANK_RTOL, nullspace, rank, row_range
from .polynomial import InvariantPolynomial
from .structure import generic_dims


class NonCommutingFamilyError(ValueError):
    pass


@dataclass
class PolynomialFamily:
    members: list[InvariantPolynomial]
    recipe: list
    space: HomogeneousSpace
    domain: str = "v"

    def __post_init__(self):
        for f in self.members:
            if f.space is not self.space or f.domain != self.domain:
                raise ValueError(f"{f.label} does not share the family domain")

    def __len__(self):
        return len(self.members)

    @property
    def labels(self) -> list[str]:
        return [f.label for f in self.members]


def lie_poisson_bracket(f: InvariantPolynomial, g: InvariantPolynomial, x) -> float:
    """{f, g}(x) = -<x, [grad f(x), grad g(x)]>."""
    if f.space is not g.space or f.domain != g.domain:
        raise ValueError(f"{f.label} and {g.label} live on different domains")
    sp = f.space
    x = np.asarray(x, dtype=float)
    return float(-x @ sp.bracket(f.gradient(x), g.gradient(x)))


# -- recipes ----------------------------------------------------------------

def trace_power(space: HomogeneousSpace, power: int, domain: str = "v") -> InvariantPolynomial:
    """x -> tr(x^power) of the realized matrix of the domain part of x.

    Under <A, B> = -tr(AB) the gradient is -power * pr_domain(x^(power-1)).
    """
    sl = space.part(domain)

    def value(x):
        X = space.matrix(space.project(x, domain))
        return float(np.trace(np.linalg.matrix_power(X, power)))

    def gradient(x):
        X = space.matrix(space.project(x, domain))
        out = np.zeros(space.dim)
        out[sl] = -power * space.coeffs(np.linalg.matrix_power(X, power - 1))[sl]
        return out

    return InvariantPolynomial(f"tr(x^{power})", power, value, gradient, space, domain)


def linear(space: HomogeneousSpace, eta: np.ndarray, label: str,
           domain: str = "v") -> InvariantPolynomial:
    eta = np.array(eta, dtype=float)
    eta.setflags(write=False)
    return InvariantPolynomial(label, 1, lambda x: float(eta @ x), lambda x: eta.copy(),
                               space, domain, {"eta": eta})


def _quadratic_on_l(space: HomogeneousSpace, A: np.ndarray, label: str) -> InvariantPolynomial:
    Q = np.zeros((space.dim_v, space.dim_v))
    Q[:space.dim_l, :space.dim_l] = A
    return quadratic(space, Q, label, "v", A_l=A)


def build_family(space: HomogeneousSpace, recipe: Iterable, domain: str = "v") -> PolynomialFamily:
    """Build a family from recipe items.

    Items: ``"h0"``, ``"delta"``, ``("q_A", A)``, ``"linear_on_l"``,
    ``("linear", eta)``, ``("traces", k_max)`` (tr x^2, ..., tr x^(2 k_max)),
    ``("hamiltonian", metric)``, ``("m_traces_l_linear", k_max)`` (traces on m
    extended to v, plus linear functions on l).
    """
    recipe = list(recipe)
    members = []
    for item in recipe:
        name, arg = (item, None) if isinstance(item, str) else (item[0], item[1])
        needs_l = name in ("delta", "q_A", "linear_on_l", "m_traces_l_linear")
        if needs_l and space.dim_l == 0:
            raise ValueError(f"recipe {name!r} needs a nontrivial l on {space.label}")
        if domain != "v" and name not in ("traces", "linear"):
            raise ValueError(f"recipe {name!r} lives on v, not {domain}")
        if name == "h0":
            members.append(quadratic(space, np.eye(space.dim_v), "h_0"))
        elif name == "delta":
            members.append(hamiltonian(space, Normal()).delta)
        elif name == "q_A":
            A = np.atleast_2d(np.asarray(arg, dtype=float))
            if A.shape != (space.dim_l, space.dim_l):
                raise ValueError(f"q_A needs a {space.dim_l}x{space.dim_l} matrix")
            members.append(_quadratic_on_l(space, (A + A.T) / 2, "q_A"))
        elif name == "linear_on_l":
            for i in range(space.dim_l):
                members.append(linear(space, np.eye(space.dim)[space.l.start + i], f"l_{i}"))
        elif name == "linear":
            members.append(linear(space, arg, "linear", domain))
        elif name == "traces":
            members += [trace_power(space, 2 * i, domain) for i in range(1, int(arg) + 1)]
        elif name == "hamiltonian":
            members.append(hamiltonian(space, arg).h_A)
        elif name == "m_traces_l_linear":
            members += [_extend_to_v(trace_power(space, 2 * i, "m")) for i in range(1, int(arg) + 1)]
            for i in range(space.dim_l):
                members.append(linear(space, np.eye(space.dim)[space.l.start + i], f"l_{i}"))
        else:
            raise ValueError(f"unknown recipe item {name!r}")
    return PolynomialFamily(members, recipe, space, domain)


def _extend_to_v(f: InvariantPolynomial) -> InvariantPolynomial:
    """View a polynomial on m as a function on v through x -> x_m."""
    if f.domain == "v":
        return f
    return InvariantPolynomial(f.label + "|m", f.degree, f.value, f.gradient, f.space, "v",
                               {"extended_from": f.domain})


# -- checks -------------------------------------------------------------------

@dataclass
class CommutativityReport:
    residual: float
    worst_pair: tuple[str, str] | None
    n_samples: int
    seed: int
    pair_residuals: dict = field(default_factory=dict)


def _samples(space: HomogeneousSpace, domain: str, n: int, seed: int) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        x = space.random_vector(rng, domain)
        out.append(x / np.linalg.norm(x))
    return out


def commutativity_residual(family: PolynomialFamily, n_samples: int = 8,
                           seed: int = 0) -> CommutativityReport:
    """max over pairs and samples of |{f_i, f_j}(x)| / (|grad f_i| |grad f_j| |x|)."""
    if not family.members:
        raise ValueError("empty family")
    worst, worst_pair = 0.0, None
    pairs = {}
    fs = family.members
    for x in _samples(family.space, family.domain, n_samples, seed):
        grads = [f.gradient(x) for f in fs]
        for i in range(len(fs)):
            for j in range(i + 1, len(fs)):
                scale = np.linalg.norm(grads[i]) * np.linalg.norm(grads[j]) * np.linalg.norm(x)
                if scale == 0:
                    continue
                val = abs(lie_poisson_bracket(fs[i], fs[j], x)) / scale
                key = (fs[i].label, fs[j].label)
                pairs[key] = max(pairs.get(key, 0.0), val)
                if val >= worst:
                    worst, worst_pair = val, key
    return CommutativityReport(worst, worst_pair, n_samples, seed, pairs)


@dataclass
class CompletenessReport:
    ddim_B: int
    target: int
    complete: bool
    commutativity: float

    def to_dict(self) -> dict:
        return {"ddim_B": self.ddim_B, "target": self.target, "complete": self.complete,
                "commutativity_residual": self.commutativity}


def family_rank(family: PolynomialFamily, n_samples: int = 8, seed: int = 0) -> int:
    """Generic rank of the gradient matrix: max over samples."""
    best = 0
    for x in _samples(family.space, family.domain, n_samples, seed):
        G = np.array([f.gradient(x) for f in family.members])
        best = max(best, rank(G, RANK_RTOL, 1.0).rank)
    return best


def completeness_check(space: HomogeneousSpace, family: PolynomialFamily, n_samples: int = 8,
                       seed: int = 0, accept_tol: float = ACCEPT_TOL) -> CompletenessReport:
    """Compare the family's rank with (ddim + dind) / 2 of the domain's invariant algebra."""
    if family.space is not space:
        raise ValueError("family belongs to another space")
    comm = commutativity_residual(family, n_samples, seed)
    if comm.residual >= accept_tol:
        raise NonCommutingFamilyError(
            f"family does not commute: {comm.worst_pair} gives {comm.residual:.3g}")
    report = generic_dims(space, max(n_samples, 4), seed, family.domain)
    target2 = report.ddim + report.dind
    target = target2 // 2
    ddim_B = family_rank(family, n_samples, seed)
    return CompletenessReport(ddim_B, target, ddim_B == target and target2 % 2 == 0, comm.residual)


def centrality_residuals(f: InvariantPolynomial, n_samples: int = 8, seed: int = 0) -> list[float]:
    """Relative distance of grad f(x) from pr_domain g_x at random x."""
    sp = f.space
    dom = sp.part(f.domain)
    out = []
    for x in _samples(sp, f.domain, n_samples, seed):
        ker, _ = nullspace(sp.ad(x), RANK_RTOL, 1.0)
        P, _ = row_range(ker[:, dom], RANK_RTOL, 1.0) if ker.shape[0] else (np.zeros((0, dom.stop - dom.start)), None)
        grad = f.gradient(x)[dom]
        nrm = np.linalg.norm(grad)
        if nrm == 0:
            out.append(0.0)
            continue
        out.append(float(np.linalg.norm(grad - P.T @ (P @ grad)) / nrm))
    return out


def centrality_test(f: InvariantPolynomial, space: HomogeneousSpace | None = None,
                    n_samples: int = 8, seed: int = 0, accept_tol: float = ACCEPT_TOL) -> bool:
    if space is not None and f.space is not space:
        raise ValueError("polynomial belongs to another space")
    return max(centrality_residuals(f, n_samples, seed)) < accept_tol
