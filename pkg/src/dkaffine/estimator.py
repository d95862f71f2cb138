"""Estimator-style front end for the affine subspace bound."""

from __future__ import annotations

import math

from sklearn.base import BaseEstimator

from .separation import make_comparison
from .solvers import GridSpec, SolverOptions, assemble_bound
from .validation import check_block_indices, check_symmetric_matrix


class ExtendedDavisKahan(BaseEstimator):
    """Bound the distance between eigenvector blocks of two symmetric matrices.

    Given symmetric phi and psi, compares the span of eigenvectors
    j+1 .. j+r (ascending eigenvalue order, zero-based block start j) and
    reports the sharpest affine-transform bound together with the classical
    one-parameter-free bound and the attained subspace distances.

    Parameters
    ----------
    j : int, block start (number of eigenvectors skipped from the bottom).
    r : int, block width.
    reverse_phi, reverse_psi : bool
        Work with the negated matrix on that side, i.e. compare blocks
        counted from the top of the spectrum instead of the bottom.
    symmetrize : bool
        Accept slightly asymmetric inputs and average them.
    check_dinkelbach, check_oracle : bool
        Attach independent re-solves of each subproblem to the report.
    cert_gap : float, certificate gap for the cutting-plane solver.
    max_cuts : int, cut budget per subproblem.

    Attributes (after fit)
    ----------------------
    bound_ : float, rescaled extended bound in [0, 1].
    bound_raw_ : float, the same bound on the raw Frobenius scale.
    standard_bound_ : float, rescaled classical bound (inf when infeasible).
    c1_, c0_ : float, parameters of the best transform (nan when trivial).
    variant_ : str, separation variant of the best transform ("" when trivial).
    rho1_, rho2_ : float, attained subspace distances (rho1_ rescaled).
    supremum_ : bool, best value only approached as |c0| grows.
    report_ : BoundReport with per-variant solutions and diagnostics.
    """

    def __init__(self, j: int = 0, r: int = 1, *, reverse_phi: bool = False,
                 reverse_psi: bool = False, symmetrize: bool = False,
                 check_dinkelbach: bool = False, check_oracle: bool = False,
                 cert_gap: float = 1e-8, max_cuts: int = 300):
        self.j = j
        self.r = r
        self.reverse_phi = reverse_phi
        self.reverse_psi = reverse_psi
        self.symmetrize = symmetrize
        self.check_dinkelbach = check_dinkelbach
        self.check_oracle = check_oracle
        self.cert_gap = cert_gap
        self.max_cuts = max_cuts

    def fit(self, phi, psi):
        """Compute the bound for one matrix pair; returns self."""
        phi = check_symmetric_matrix(phi, symmetrize=self.symmetrize, name="phi")
        psi = check_symmetric_matrix(psi, symmetrize=self.symmetrize, name="psi")
        if phi.shape != psi.shape:
            raise ValueError(f"shape mismatch: phi {phi.shape} vs psi {psi.shape}")
        check_block_indices(phi.shape[0], self.j, self.r)

        comp = make_comparison(
            phi, psi, self.j, self.r,
            reverse_phi=self.reverse_phi, reverse_psi=self.reverse_psi,
        )
        options = SolverOptions(
            cert_gap=self.cert_gap, max_cuts=self.max_cuts,
            check_dinkelbach=self.check_dinkelbach, check_oracle=self.check_oracle,
            oracle_grid=GridSpec(),
        )
        report = assemble_bound(comp, options)

        self.n_ = comp.n
        self.report_ = report
        self.bound_ = report.extended_bound_rescaled
        self.bound_raw_ = report.extended_bound_raw
        self.standard_bound_ = report.standard_dk_rescaled
        self.trivial_bound_ = report.trivial_bound_rescaled
        self.rho1_ = report.rho1_rescaled
        self.rho2_ = report.rho2
        best = report.best
        if best is not None and best.params is not None and not report.capped_at_trivial:
            self.c1_ = best.params.c1
            self.c0_ = best.params.c0
            self.variant_ = best.variant.value
            self.supremum_ = best.supremum_at_infinity
        else:
            self.c1_ = math.nan
            self.c0_ = math.nan
            self.variant_ = ""
            self.supremum_ = False
        return self
