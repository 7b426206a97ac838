"""Evaluator/gradient pairs for invariant polynomials on v (or on m)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable

import numpy as np

if TYPE_CHECKING:
    from .homspace import HomogeneousSpace


@dataclass(frozen=True, eq=False)
class InvariantPolynomial:
    """A polynomial on ``space``'s domain with an exact gradient.

    Points and gradients are full adapted coordinate vectors (length
    ``dim g``) supported on the domain.
    """

    label: str
    degree: int
    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    space: "HomogeneousSpace"
    domain: str = "v"
    meta: dict = field(default_factory=dict)

    def __call__(self, x: np.ndarray) -> float:
        return float(self.value(x))

    def fd_gradient(self, x: np.ndarray, step: float = 1e-5) -> np.ndarray:
        """Central finite differences along the domain basis directions."""
        sl = self.space.part(self.domain)
        g = np.zeros_like(x, dtype=float)
        for i in range(sl.start, sl.stop):
            e = np.zeros_like(x, dtype=float)
            e[i] = step
            g[i] = (self.value(x + e) - self.value(x - e)) / (2 * step)
        return g

    def gradient_error(self, x: np.ndarray, step: float = 1e-5) -> float:
        exact = self.gradient(x)
        fd = self.fd_gradient(x, step)
        return float(np.linalg.norm(exact - fd) / max(np.linalg.norm(exact), 1e-300))

    def invariance_residual(self, x: np.ndarray, acting: str | None = None) -> float:
        """max over acting basis eta of |<grad f(x), [eta, x]>|, normalized."""
        sp = self.space
        act = sp.part(acting or sp.acting_part(self.domain))
        grad = self.gradient(x)
        if act.stop == act.start:
            return 0.0
        etas = np.eye(sp.dim)[act]
        moved = sp.bracket(etas, np.broadcast_to(x, etas.shape))
        scale = max(np.linalg.norm(grad) * np.linalg.norm(x), 1e-300)
        return float(np.max(np.abs(moved @ grad)) / scale)
