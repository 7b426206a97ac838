"""Numerical verification of geodesic-orbit homogeneous spaces.

Builds compact Lie algebras and homogeneous spaces G/H from a catalog,
checks the g.o. property of invariant metrics by three independent
criteria, computes complexity data of invariant polynomial algebras and
evaluates homogeneous geodesics in the defining representation.
"""

from .liealg import LieAlgebraRep, build_algebra, mat_exp
from .homspace import (
    CATALOG,
    CatalogError,
    FiberOperator,
    HomogeneousSpace,
    Lambda,
    Normal,
    build_space,
    hamiltonian,
    metric_operator,
    perturbed_hamiltonian,
)
from .goverify import (
    Verdict,
    centrality_residual,
    cross_validate,
    go_check,
    gordon_check,
    natural_reductivity_residual,
    solve_geodesic_generator,
)
from .structure import complexity_on_submodule, generic_dims, isotropy_dimensions
from .poisson import (
    build_family,
    centrality_test,
    commutativity_residual,
    completeness_check,
    lie_poisson_bracket,
)
from .flow import closure_dim_estimate, orbit_trajectory, planarity_residual

__version__ = "0.1.0"

__all__ = [
    "CATALOG", "CatalogError", "FiberOperator", "HomogeneousSpace", "Lambda",
    "LieAlgebraRep", "Normal", "Verdict", "build_algebra", "build_family", "build_space",
    "centrality_residual", "centrality_test", "closure_dim_estimate", "commutativity_residual",
    "completeness_check", "complexity_on_submodule", "cross_validate", "generic_dims",
    "go_check", "gordon_check", "hamiltonian", "isotropy_dimensions", "lie_poisson_bracket",
    "mat_exp", "metric_operator", "natural_reductivity_residual", "orbit_trajectory",
    "perturbed_hamiltonian", "planarity_residual", "solve_geodesic_generator",
    "__version__",
]
