"""Interval separations and the ratio objective for affine spectral transforms.

Setting: two symmetric matrices Phi and Psi, and the block of r eigenvectors
at ascending positions j+1 .. j+r of each.  An affine transform
f(x) = c1 * x + c0 moves Phi's spectrum; the distance between the eigenvector
blocks is bounded by  ||c1 Phi + c0 I - Psi||_2 / delta,  where delta measures
how far the transformed in-block eigenvalues sit from Psi's out-of-block
spectrum.  Four variants of delta exist: two choices of separating interval,
crossed with the sign of c1 (a negative c1 reverses the spectrum order, which
swaps which block endpoint is the min and which is the max).

Conventions: eigenvalue indices are 1-based with the extensions
index 0 -> -inf and index n+1 -> +inf.  Any delta term that references an
infinite extended eigenvalue is +inf under its variant's sign constraint and
simply drops out of the min.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .spectra import EigenSystem, eigensystem, spectral_norm
from .subspace import block, scaling_constant
from .validation import check_block_indices

# Strictness margin scale: residuals must exceed 1e-9 * (1 + |delta|).
STRICT_EPS_SCALE = 1e-9


class DegenerateGapWarning(UserWarning):
    """Psi's spectrum has a zero gap at a block edge; bounds will degenerate."""


class AffineParams(NamedTuple):
    """The transform f(x) = c1 * x + c0."""

    c1: float
    c0: float


class DeltaVariant(Enum):
    """The four separation variants: interval choice x sign of c1."""

    D1_PLUS = "delta_1_plus"
    D1_MINUS = "delta_1_minus"
    D2_PLUS = "delta_2_plus"
    D2_MINUS = "delta_2_minus"

    @property
    def sign(self) -> int:
        return 1 if self in (DeltaVariant.D1_PLUS, DeltaVariant.D2_PLUS) else -1

    @property
    def interval(self) -> int:
        return 1 if self in (DeltaVariant.D1_PLUS, DeltaVariant.D1_MINUS) else 2


ALL_VARIANTS = tuple(DeltaVariant)
PLUS_VARIANTS = (DeltaVariant.D1_PLUS, DeltaVariant.D2_PLUS)


@dataclass(frozen=True)
class Comparison:
    """A validated eigenvector-block comparison, with reversals applied.

    The matrices and eigensystems stored here are the effective ones: if a
    reverse flag is set, the corresponding matrix has already been negated
    (the block of the descending spectrum is the block of -M), so every
    formula downstream just sees ascending spectra.
    """

    phi_matrix: np.ndarray
    psi_matrix: np.ndarray
    phi_system: EigenSystem
    psi_system: EigenSystem
    j: int
    r: int
    reverse_phi: bool
    reverse_psi: bool
    gap_ok: bool
    norm_phi: float
    norm_psi: float

    @property
    def n(self) -> int:
        return self.phi_system.n

    @property
    def scale(self) -> float:
        """1 + ||Phi||_2 + ||Psi||_2, the natural magnitude of the problem."""
        return 1.0 + self.norm_phi + self.norm_psi

    @property
    def rescaling_constant(self) -> float:
        return scaling_constant(self.n, self.r)

    def w_block(self) -> np.ndarray:
        return self.phi_system.vectors[:, self.j:self.j + self.r].copy()

    def v_block(self) -> np.ndarray:
        return self.psi_system.vectors[:, self.j:self.j + self.r].copy()


def make_comparison(phi, psi, j: int, r: int, *, reverse_phi: bool = False,
                    reverse_psi: bool = False, symmetrize: bool = False) -> Comparison:
    """Validate inputs, decompose once, and apply any spectrum reversals."""
    phi_sys = eigensystem(phi, symmetrize=symmetrize)
    psi_sys = eigensystem(psi, symmetrize=symmetrize)
    if phi_sys.n != psi_sys.n:
        raise ValueError(f"matrices must share an order, got {phi_sys.n} and {psi_sys.n}")
    check_block_indices(phi_sys.n, j, r)

    phi_eff = np.asarray(phi, dtype=np.float64)
    psi_eff = np.asarray(psi, dtype=np.float64)
    phi_eff = (phi_eff + phi_eff.T) / 2.0
    psi_eff = (psi_eff + psi_eff.T) / 2.0
    if reverse_phi:
        phi_eff = -phi_eff
        phi_sys = phi_sys.reversed()
    if reverse_psi:
        psi_eff = -psi_eff
        psi_sys = psi_sys.reversed()

    n = psi_sys.n
    psi_vals = psi_sys.values
    gap_ok = True
    if j >= 1 and not psi_vals[j] > psi_vals[j - 1]:
        gap_ok = False
    if j + r <= n - 1 and not psi_vals[j + r] > psi_vals[j + r - 1]:
        gap_ok = False
    if not gap_ok:
        warnings.warn(
            f"Psi has a zero eigengap at a block edge (j={j}, r={r}); "
            "the eigenvector block is not uniquely determined and the "
            "identity-transform separations are infeasible",
            DegenerateGapWarning,
            stacklevel=2,
        )

    norm_phi = float(max(abs(phi_sys.values[0]), abs(phi_sys.values[-1])))
    norm_psi = float(max(abs(psi_vals[0]), abs(psi_vals[-1])))
    return Comparison(
        phi_matrix=phi_eff, psi_matrix=psi_eff,
        phi_system=phi_sys, psi_system=psi_sys,
        j=int(j), r=int(r),
        reverse_phi=bool(reverse_phi), reverse_psi=bool(reverse_psi),
        gap_ok=gap_ok, norm_phi=norm_phi, norm_psi=norm_psi,
    )


def extended_eigenvalue(values: np.ndarray, index: int) -> float:
    """1-based lookup with values[0] = -inf and values[n+1] = +inf."""
    n = len(values)
    if index == 0:
        return -math.inf
    if index == n + 1:
        return math.inf
    if 1 <= index <= n:
        return float(values[index - 1])
    raise IndexError(f"extended eigenvalue index {index} outside 0..{n + 1}")


class _Row(NamedTuple):
    """An affine form alpha*c1 + beta*c0 + gamma (gamma homogenizes with t)."""

    alpha: float
    beta: float
    gamma: float

    def at(self, c1: float, c0: float, t: float = 1.0) -> float:
        return self.alpha * c1 + self.beta * c0 + self.gamma * t


def _term_specs(variant: DeltaVariant, j: int, r: int):
    """Index patterns (phi_index, psi_index, orientation) of the delta terms.

    orientation +1 means the term is  f(phi) - psi,  -1 means  psi - f(phi).
    """
    if variant is DeltaVariant.D1_PLUS:
        return ((j + r, j + r + 1, -1), (j + 1, j, +1))
    if variant is DeltaVariant.D1_MINUS:
        return ((j + 1, j + r + 1, -1), (j + r, j, +1))
    if variant is DeltaVariant.D2_PLUS:
        return ((j + r + 1, j + r, +1), (j, j + 1, -1))
    return ((j, j + r, +1), (j + r + 1, j + 1, -1))


def delta_terms(comp: Comparison, variant: DeltaVariant) -> list[_Row]:
    """The finite affine terms whose min is delta; dropped terms are +inf."""
    phi, psi = comp.phi_system.values, comp.psi_system.values
    rows = []
    for phi_idx, psi_idx, orient in _term_specs(variant, comp.j, comp.r):
        p = extended_eigenvalue(phi, phi_idx)
        q = extended_eigenvalue(psi, psi_idx)
        if not (math.isfinite(p) and math.isfinite(q)):
            continue
        rows.append(_Row(alpha=orient * p, beta=float(orient), gamma=-orient * q))
    if not rows:
        raise ValueError("no finite separation terms; the block spans the whole spectrum")
    return rows


def constraint_rows(comp: Comparison, variant: DeltaVariant) -> list[_Row]:
    """Affine forms R with the feasibility requirement delta > R.

    These keep the separating interval on the correct side of the block:
    the transformed block must not poke past Psi's in-block eigenvalues
    (interval 1) or the interval must not detach from them (interval 2).
    All referenced eigenvalues are interior, so the rows are always finite.
    For c1 < 0 the block's min and max swap ends.
    """
    phi, psi = comp.phi_system.values, comp.psi_system.values
    j, r = comp.j, comp.r
    lo_idx = j + 1 if variant.sign > 0 else j + r   # index achieving min f over the block
    hi_idx = j + r if variant.sign > 0 else j + 1   # index achieving max f over the block
    phi_lo = extended_eigenvalue(phi, lo_idx)
    phi_hi = extended_eigenvalue(phi, hi_idx)
    psi_lo = extended_eigenvalue(psi, j + 1)
    psi_hi = extended_eigenvalue(psi, j + r)
    if variant.interval == 1:
        # a1 - psi_{j+1} < delta  and  psi_{j+r} - b1 < delta
        return [
            _Row(alpha=phi_lo, beta=1.0, gamma=-psi_lo),
            _Row(alpha=-phi_hi, beta=-1.0, gamma=psi_hi),
        ]
    # a2 - min f < delta  and  max f - b2 < delta
    return [
        _Row(alpha=-phi_lo, beta=-1.0, gamma=psi_lo),
        _Row(alpha=phi_hi, beta=1.0, gamma=-psi_hi),
    ]


def delta(comp: Comparison, params: AffineParams, variant: DeltaVariant) -> float:
    """The separation min-term at the given transform parameters."""
    c1, c0 = params
    return min(row.at(c1, c0) for row in delta_terms(comp, variant))


@dataclass(frozen=True)
class FeasibilityReport:
    """Strict-inequality residuals for one (params, variant) pair.

    Every residual must exceed eps_strict for the bound to be valid;
    margin is the smallest of them.
    """

    variant: DeltaVariant
    params: AffineParams
    residuals: tuple[tuple[str, float], ...]
    eps_strict: float
    feasible: bool

    @property
    def margin(self) -> float:
        return min(v for _, v in self.residuals)

    # Alias matching the solver-side field name.
    strictness_margin = margin

    @property
    def delta(self) -> float:
        return dict(self.residuals)["delta"]


def feasibility(comp: Comparison, params: AffineParams, variant: DeltaVariant) -> FeasibilityReport:
    """Evaluate sign, positivity and interval-side constraints at params."""
    c1, c0 = float(params[0]), float(params[1])
    d = delta(comp, AffineParams(c1, c0), variant)
    rows = constraint_rows(comp, variant)
    residuals = (
        ("sign", variant.sign * c1),
        ("delta", d),
        ("interval_low", d - rows[0].at(c1, c0)),
        ("interval_high", d - rows[1].at(c1, c0)),
    )
    eps = STRICT_EPS_SCALE * (1.0 + abs(d))
    feasible = all(v > eps for _, v in residuals)
    return FeasibilityReport(
        variant=variant, params=AffineParams(c1, c0),
        residuals=residuals, eps_strict=eps, feasible=feasible,
    )


def transform_residual_matrix(comp: Comparison, params: AffineParams) -> np.ndarray:
    """c1 * Phi + c0 * I - Psi on the effective matrices."""
    c1, c0 = params
    n = comp.n
    return c1 * comp.phi_matrix + c0 * np.eye(n) - comp.psi_matrix


def objective(comp: Comparison, params: AffineParams, variant: DeltaVariant) -> float:
    """||c1 Phi + c0 I - Psi||_2 / delta if feasible, else +inf.

    This is the unscaled ratio; on the rescaled (per-scaling-constant) scale
    it is directly comparable with rho2 and the trivial bound 1.
    """
    rep = feasibility(comp, params, variant)
    if not rep.feasible:
        return math.inf
    num = spectral_norm(transform_residual_matrix(comp, params))
    d = delta(comp, params, variant)
    return num / d


def delta_and_margin_many(comp: Comparison, variant: DeltaVariant,
                          c1: np.ndarray, c0: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized delta and strict-feasibility margin over parameter arrays.

    Used by the grid oracle; mirrors feasibility() exactly, including the
    eps_strict comparison, but leaves the norm numerator to the caller.
    """
    c1 = np.asarray(c1, dtype=np.float64)
    c0 = np.asarray(c0, dtype=np.float64)
    terms = delta_terms(comp, variant)
    d = np.full(c1.shape, np.inf)
    for row in terms:
        np.minimum(d, row.alpha * c1 + row.beta * c0 + row.gamma, out=d)
    rows = constraint_rows(comp, variant)
    margin = np.minimum(variant.sign * c1, d)
    for row in rows:
        np.minimum(margin, d - (row.alpha * c1 + row.beta * c0 + row.gamma), out=margin)
    eps = STRICT_EPS_SCALE * (1.0 + np.abs(d))
    return d, margin - eps  # feasible where margin - eps > 0


def standard_dk(comp: Comparison) -> float:
    """The bound available without transforming: params (1, 0).

    Returns the smaller of the two c1 > 0 variants' objectives, or +inf when
    neither separation is feasible (the usual situation when the two spectra
    live on different scales or run in opposite directions).
    """
    identity = AffineParams(1.0, 0.0)
    return min(objective(comp, identity, v) for v in PLUS_VARIANTS)
