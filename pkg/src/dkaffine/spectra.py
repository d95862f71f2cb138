"""Dense symmetric eigendecompositions and matrix norms.

All routines are deterministic for identical input: eigenvalues come back
ascending and every eigenvector is sign-fixed so that its entry of largest
magnitude is nonnegative (ties resolved at the lowest index).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import check_square_array, check_symmetric_matrix


class EigenSolverError(RuntimeError):
    """Raised when the LAPACK eigensolver fails to converge."""


class NotPositiveDefiniteError(ValueError):
    """Raised by cholesky() when a pivot is not strictly positive."""


def fix_eigenvector_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip eigenvector columns so the largest-magnitude entry is >= 0.

    np.argmax returns the lowest index on ties, which fixes the convention
    for degenerate magnitudes.
    """
    v = np.array(vectors, dtype=np.float64, copy=True)
    lead = np.argmax(np.abs(v), axis=0)
    flip = v[lead, np.arange(v.shape[1])] < 0
    v[:, flip] *= -1.0
    return v


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues and sign-fixed orthonormal eigenvectors."""

    values: np.ndarray   # shape (n,), ascending
    vectors: np.ndarray  # shape (n, n), column i pairs with values[i]

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def reversed(self) -> "EigenSystem":
        """The eigensystem of -M: negated values, descending columns re-sorted.

        Eigenvectors are shared with M, so no second decomposition is run and
        sign conventions carry over unchanged.
        """
        return EigenSystem(values=-self.values[::-1], vectors=self.vectors[:, ::-1].copy())


def eigensystem(m, *, symmetrize: bool = False) -> EigenSystem:
    """Full eigendecomposition of a symmetric matrix.

    Returns ascending eigenvalues and the deterministic sign convention
    described in the module docstring.
    """
    a = check_symmetric_matrix(m, symmetrize=symmetrize)
    try:
        values, vectors = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigendecomposition failed for order {a.shape[0]}: {exc}") from exc
    return EigenSystem(values=values, vectors=fix_eigenvector_signs(vectors))


def eigenvalues(m, *, symmetrize: bool = False) -> np.ndarray:
    """Ascending eigenvalues only (cheaper when vectors are not needed)."""
    a = check_symmetric_matrix(m, symmetrize=symmetrize)
    try:
        return np.linalg.eigvalsh(a)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigenvalue solve failed for order {a.shape[0]}: {exc}") from exc


def extreme_eigenpair(m, *, symmetrize: bool = False) -> tuple[float, np.ndarray]:
    """The signed eigenvalue of largest magnitude and its unit eigenvector.

    ``abs(mu)`` is the spectral norm; the sign of ``mu`` and the vector are
    the ingredients of supporting-hyperplane cuts on the norm.
    """
    es = eigensystem(m, symmetrize=symmetrize)
    lo, hi = es.values[0], es.values[-1]
    # On exact magnitude ties prefer the positive end (deterministic).
    if -lo > hi:
        return float(lo), es.vectors[:, 0]
    return float(hi), es.vectors[:, -1]


def spectral_norm(m, *, symmetrize: bool = False) -> float:
    """Largest eigenvalue magnitude of a symmetric matrix."""
    vals = eigenvalues(m, symmetrize=symmetrize)
    return float(max(vals[-1], -vals[0]))


def frobenius_norm(a) -> float:
    """Frobenius norm of any rectangular array."""
    x = np.asarray(a, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ValueError("array contains non-finite entries")
    return float(np.linalg.norm(x))


def cholesky(m, *, symmetrize: bool = False) -> np.ndarray:
    """Lower-triangular Cholesky factor of a positive definite matrix.

    Raises NotPositiveDefiniteError naming the failing pivot, which LAPACK's
    generic error message would not give us.
    """
    a = check_symmetric_matrix(m, symmetrize=symmetrize)
    n = a.shape[0]
    L = np.zeros_like(a)
    for k in range(n):
        pivot = a[k, k] - L[k, :k] @ L[k, :k]
        if pivot <= 0.0:
            raise NotPositiveDefiniteError(
                f"matrix is not positive definite: pivot {k} is {pivot:.6e}"
            )
        L[k, k] = np.sqrt(pivot)
        if k + 1 < n:
            L[k + 1:, k] = (a[k + 1:, k] - L[k + 1:, :k] @ L[k, :k]) / L[k, k]
    return L


def reconstruction_error(m, es: EigenSystem) -> float:
    """Relative Frobenius error of V diag(w) V.T against m (diagnostic)."""
    a = check_square_array(m)
    rebuilt = (es.vectors * es.values) @ es.vectors.T
    denom = max(frobenius_norm(a), 1e-300)
    return frobenius_norm(rebuilt - a) / denom
