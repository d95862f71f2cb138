"""Sharpened subspace perturbation bounds via affine spectrum transforms.

Compare the span of r consecutive eigenvectors of two symmetric matrices.
The classical bound needs both eigenvalue blocks to live on the same part of
the spectrum; transforming one matrix as c1 * Phi + c0 * I before comparing
removes that restriction and tightens the result.  This package solves for
the sharpest transform, exposes the pieces (separations, feasibility,
solvers, subspace distances), and ships the experiment scenarios around it.
"""

from .estimator import ExtendedDavisKahan
from .models import IsolatedVertexError
from .separation import (
    ALL_VARIANTS,
    AffineParams,
    Comparison,
    DegenerateGapWarning,
    DeltaVariant,
    FeasibilityReport,
    delta,
    feasibility,
    make_comparison,
    objective,
    standard_dk,
    transform_residual_matrix,
)
from .solvers import (
    BoundReport,
    GridSpec,
    SolverOptions,
    SubproblemSolution,
    assemble_bound,
    solve_charnes_cooper,
    solve_dinkelbach,
    solve_oracle,
)
from .spectra import EigenSystem, eigensystem
from .subspace import principal_cosines, rho1, rho2, scaling_constant

__version__ = "0.1.0"

__all__ = [
    "ALL_VARIANTS",
    "AffineParams",
    "BoundReport",
    "Comparison",
    "DegenerateGapWarning",
    "DeltaVariant",
    "EigenSystem",
    "ExtendedDavisKahan",
    "FeasibilityReport",
    "GridSpec",
    "IsolatedVertexError",
    "SolverOptions",
    "SubproblemSolution",
    "assemble_bound",
    "delta",
    "eigensystem",
    "feasibility",
    "make_comparison",
    "objective",
    "principal_cosines",
    "rho1",
    "rho2",
    "scaling_constant",
    "solve_charnes_cooper",
    "solve_dinkelbach",
    "solve_oracle",
    "standard_dk",
    "transform_residual_matrix",
    "__version__",
]
