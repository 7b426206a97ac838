"""Homogeneous geodesics exp(t(X+F))·o in the defining representation."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .goverify import Verdict, go_check, solve_geodesic_generator, ACCEPT_TOL
from .homspace import HomogeneousSpace, MetricSpec
from .liealg import mat_exp

T_MAX = 200.0
N_STEPS = 4096
AMPLITUDE_TOL = 1e-8
RATIO_TOL = 1e-9
MAX_DENOMINATOR = 64
# Ratios within this distance of a small-denominator fraction, yet outside
# RATIO_TOL, are reported as ambiguous.
AMBIGUITY_TOL = 1e-6


@dataclass
class Trajectory:
    space_id: str
    generator: np.ndarray     # Z = X + F, adapted coordinates
    Z: np.ndarray             # ambient matrix of Z
    times: np.ndarray
    points: np.ndarray        # (n_steps, ambient_dim)
    metric: MetricSpec
    seed: int | None = None

    def norm_error(self) -> float:
        return float(np.max(np.abs(np.linalg.norm(self.points, axis=1) - 1.0)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t"] + [f"x{i}" for i in range(self.points.shape[1])])
        for t, p in zip(self.times, self.points):
            w.writerow([f"{t:.17g}"] + [f"{c:.17g}" for c in p])
        return buf.getvalue()


def _require_base_point(space: HomogeneousSpace) -> np.ndarray:
    if space.base_point is None:
        raise ValueError(f"{space.label} has no cataloged base point")
    return space.base_point


def orbit_trajectory(space: HomogeneousSpace, metric: MetricSpec, X, t_max: float = T_MAX,
                     n_steps: int = N_STEPS, seed: int | None = None) -> Trajectory:
    """gamma(t_k) = exp(t_k Z)·o on a uniform grid over [0, t_max]."""
    o = _require_base_point(space)
    cert = go_check(space, metric)
    if cert.verdict is not Verdict.GO:
        raise ValueError(f"{space.label} with {metric} is {cert.verdict.value}; orbits are not geodesics")
    sol = solve_geodesic_generator(space, metric, X)
    if sol.residual >= ACCEPT_TOL:
        raise ValueError(f"geodesic lemma not solvable at X (residual {sol.residual:.3g})")
    gen = sol.X + sol.F
    Zm = space.matrix(gen)
    times = np.linspace(0.0, t_max, n_steps)
    points = np.array([mat_exp(Zm, t) @ o for t in times])
    traj = Trajectory(space.label, gen, Zm, times, points, metric, seed)
    err = traj.norm_error()
    if err > 1e-9:
        raise RuntimeError(f"trajectory left the unit sphere (error {err:.3g})")
    return traj


def planarity_residual(traj: Trajectory) -> float:
    """RMS distance to the best 2-plane through the origin, over mean point norm."""
    P = traj.points if isinstance(traj, Trajectory) else np.asarray(traj)
    if P.shape[0] < 16:
        raise ValueError("planarity needs at least 16 points")
    s = np.linalg.svd(P, compute_uv=False)
    off = np.sum(s[2:] ** 2)
    return float(np.sqrt(off / P.shape[0]) / np.mean(np.linalg.norm(P, axis=1)))


@dataclass
class ClosureEstimate:
    dim: int
    frequencies: list[float]
    indeterminate: bool = False
    ambiguous_ratio: float | None = None

    def to_dict(self) -> dict:
        return {"dim": self.dim, "frequencies": self.frequencies,
                "indeterminate": self.indeterminate, "ambiguous_ratio": self.ambiguous_ratio}


def active_frequencies(Zm: np.ndarray, o: np.ndarray, amp_tol: float = AMPLITUDE_TOL,
                       cluster_tol: float = RATIO_TOL) -> list[float]:
    """Distinct positive frequencies of a skew matrix whose invariant planes carry o."""
    theta, U = np.linalg.eigh(-1j * Zm)
    amps = np.abs(U.conj().T @ o) ** 2
    scale = max(np.max(np.abs(theta)), 1e-300)
    freqs: list[list[float]] = []   # [theta, weight]
    for th, a in sorted(zip(np.abs(theta), amps)):
        if th <= cluster_tol * scale:
            continue
        if freqs and th - freqs[-1][0] <= cluster_tol * scale:
            freqs[-1][1] += a
        else:
            freqs.append([th, a])
    return [f for f, w in freqs if np.sqrt(w) > amp_tol]


def closure_dim_estimate(space: HomogeneousSpace, Z, ratio_tol: float = RATIO_TOL,
                         max_denominator: int = MAX_DENOMINATOR) -> ClosureEstimate:
    """Dimension of the torus filled by exp(tZ)·o, from the spectrum of Z.

    Frequencies are grouped into classes of pairwise rational dependence
    (continued fractions, bounded denominator); the number of classes is
    the estimate.
    """
    o = _require_base_point(space)
    Z = np.asarray(Z, dtype=float)
    Zm = Z if Z.ndim == 2 else space.matrix(Z)
    if not np.linalg.norm(Zm) > 0:
        raise ValueError("Z must be nonzero")
    freqs = active_frequencies(Zm, o)
    parent = list(range(len(freqs)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    ambiguous = None
    for i in range(len(freqs)):
        for j in range(i):
            ratio = freqs[j] / freqs[i]          # freqs ascending, ratio <= 1
            approx = Fraction(ratio).limit_denominator(max_denominator)
            err = abs(ratio - float(approx))
            if err <= ratio_tol:
                parent[find(i)] = find(j)
            elif err <= AMBIGUITY_TOL and ambiguous is None:
                ambiguous = ratio
    classes = len({find(i) for i in range(len(freqs))})
    return ClosureEstimate(classes, [float(f) for f in freqs], ambiguous is not None, ambiguous)
