"""Distances between spaces spanned by consecutive eigenvector blocks.

Blocks are addressed by (j, r): the r eigenvectors whose eigenvalues sit at
ascending positions j+1 .. j+r.  Passing reverse=True addresses the block of
the reversed (descending) spectrum instead, which is the same thing as taking
the block of -M.
"""

from __future__ import annotations

import numpy as np

from .spectra import EigenSystem
from .validation import check_block_indices, check_orthonormal_columns


def scaling_constant(n: int, r: int) -> float:
    """sqrt(2 * min(r, n - r)): the gap between the two distance metrics."""
    if not 1 <= r <= n - 1:
        raise ValueError(f"need 1 <= r <= n-1, got r={r}, n={n}")
    return float(np.sqrt(2.0 * min(r, n - r)))


def block(es: EigenSystem, j: int, r: int, *, reverse: bool = False) -> np.ndarray:
    """Return the n-by-r eigenvector block at positions j+1 .. j+r."""
    check_block_indices(es.n, j, r)
    vectors = es.vectors[:, ::-1] if reverse else es.vectors
    return vectors[:, j:j + r].copy()


def principal_cosines(w, v) -> np.ndarray:
    """Singular values of W.T V, clipped to [0, 1], descending."""
    W = check_orthonormal_columns(w, name="W")
    V = check_orthonormal_columns(v, name="V")
    if W.shape != V.shape:
        raise ValueError(f"blocks must share a shape, got {W.shape} and {V.shape}")
    svals = np.linalg.svd(W.T @ V, compute_uv=False)
    return np.clip(svals, 0.0, 1.0)


def rho1(w, v) -> float:
    """min over orthogonal Q of ||W - V Q||_F, via principal cosines.

    Equals sqrt(2 (r - sum of cosines)); roundoff can push the radicand a
    hair negative, which is clamped (anything below -1e-12 is a real error).
    """
    cos = principal_cosines(w, v)
    radicand = 2.0 * (cos.shape[0] - float(np.sum(cos)))
    if radicand < -1e-12:
        raise ArithmeticError(f"negative radicand {radicand:.3e} in rho1")
    return float(np.sqrt(max(radicand, 0.0)))


def rho2(w, v) -> float:
    """Spectral norm of W W.T (I - V V.T).

    Computed two ways, as the projector product norm and as
    sqrt(1 - sigma_min^2) from the principal cosines; the two must agree to
    1e-9 or something is numerically off.
    """
    W = check_orthonormal_columns(w, name="W")
    V = check_orthonormal_columns(v, name="V")
    if W.shape != V.shape:
        raise ValueError(f"blocks must share a shape, got {W.shape} and {V.shape}")
    n = W.shape[0]
    proj = W @ (W.T @ (np.eye(n) - V @ V.T))
    direct = float(np.linalg.svd(proj, compute_uv=False)[0])
    cos = principal_cosines(W, V)
    via_cos = float(np.sqrt(max(0.0, 1.0 - float(np.min(cos)) ** 2)))
    if abs(direct - via_cos) > 1e-9:
        raise ArithmeticError(
            f"rho2 routes disagree: projector {direct:.12e} vs cosines {via_cos:.12e}"
        )
    return min(max(via_cos, 0.0), 1.0)


def trivial_bound_raw(n: int, r: int) -> float:
    """The scaling constant itself: the bound that holds with no analysis."""
    return scaling_constant(n, r)


def trivial_bound_rescaled() -> float:
    """On the rescaled (divide by the scaling constant) scale this is 1."""
    return 1.0


def frobenius_to_operator_chain_ok(w, v, n: int, r: int, tol: float = 1e-9) -> bool:
    """Check rho1 / c <= rho2 <= 1 (diagnostic used by tests and reports)."""
    c = scaling_constant(n, r)
    return rho1(w, v) / c <= rho2(w, v) + tol
