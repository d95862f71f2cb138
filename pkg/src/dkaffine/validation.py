"""Input validation helpers shared across the package.

The checks follow the scikit-learn convention of returning a validated
(and possibly copied) array rather than mutating the input.
"""

from __future__ import annotations

import numpy as np

# Relative asymmetry above this is rejected unless symmetrize=True.
SYMMETRY_RTOL = 1e-12


def check_square_array(x, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite float64 square 2-d array."""
    a = np.asarray(x, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be a square 2-d array, got shape {a.shape}")
    if a.shape[0] < 1:
        raise ValueError(f"{name} must be non-empty")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def check_symmetric_matrix(x, *, symmetrize: bool = False, name: str = "matrix") -> np.ndarray:
    """Validate a symmetric matrix and return an exactly symmetric copy.

    Asymmetry up to SYMMETRY_RTOL * max|entry| is tolerated; anything
    larger raises unless ``symmetrize=True``, in which case the symmetric
    part (X + X.T) / 2 is returned.  The result always satisfies
    ``a[i, j] == a[j, i]`` exactly.
    """
    a = check_square_array(x, name=name)
    scale = np.max(np.abs(a)) if a.size else 0.0
    asym = np.max(np.abs(a - a.T)) if a.size else 0.0
    if not symmetrize and asym > SYMMETRY_RTOL * max(scale, 1e-300):
        raise ValueError(
            f"{name} is not symmetric: max|X - X.T| = {asym:.3e} "
            f"exceeds {SYMMETRY_RTOL:.0e} * max|X| = {SYMMETRY_RTOL * scale:.3e}; "
            "pass symmetrize=True to use the symmetric part"
        )
    return (a + a.T) / 2.0


def check_orthonormal_columns(w, *, tol: float = 1e-8, name: str = "basis") -> np.ndarray:
    """Validate an n-by-r matrix with orthonormal columns."""
    a = np.asarray(w, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-d, got shape {a.shape}")
    n, r = a.shape
    if not 1 <= r <= n:
        raise ValueError(f"{name} must have 1 <= r <= n columns, got shape {a.shape}")
    gram = a.T @ a
    err = np.max(np.abs(gram - np.eye(r)))
    if err > tol:
        raise ValueError(f"{name} columns are not orthonormal (max Gram deviation {err:.3e})")
    return a


def check_block_indices(n: int, j: int, r: int) -> None:
    """Validate a consecutive eigenvector block selection.

    ``j`` counts the eigenvalues below the block, so the block spans
    positions j+1 .. j+r of the ascending spectrum (1-based).
    """
    if not isinstance(r, (int, np.integer)) or not isinstance(j, (int, np.integer)):
        raise TypeError("j and r must be integers")
    if not 1 <= r <= n - 1:
        raise ValueError(f"r must satisfy 1 <= r <= n-1, got r={r} for n={n}")
    if not 0 <= j <= n - r:
        raise ValueError(f"j must satisfy 0 <= j <= n-r, got j={j} for n={n}, r={r}")
