"""Random graph and covariance models used by the experiment scenarios.

Randomness policy: every draw comes from a counter-based generator keyed by
a label string, so any single artifact can be regenerated in isolation and
runs parallelize without shared state.  Normal variates go through an
explicit Box-Muller map from uniforms rather than the generator's own
normal() so the exact stream is pinned by this file alone.
"""

from __future__ import annotations

import hashlib
from typing import Callable

import numpy as np

from .spectra import cholesky


class IsolatedVertexError(RuntimeError):
    """A sampled or expected graph has a zero-degree vertex."""


def stream(master_seed: int, *labels) -> np.random.Generator:
    """Independent generator for the draw named by the label chain.

    The key is the first 16 bytes of sha256("master|label|label|...")
    interpreted as two little-endian 64-bit words feeding Philox.
    """
    text = "|".join([str(int(master_seed)), *[str(part) for part in labels]])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    key = np.frombuffer(digest[:16], dtype="<u8")
    return np.random.Generator(np.random.Philox(key=key))


def normals(gen: np.random.Generator, shape) -> np.ndarray:
    """Standard normals via Box-Muller on uniform pairs.

    u1 is mapped to (0, 1] as 1 - random() so the log never sees zero.
    """
    count = int(np.prod(shape)) if shape else 1
    pairs = (count + 1) // 2
    u1 = 1.0 - gen.random(pairs)
    u2 = gen.random(pairs)
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    z = np.empty(2 * pairs)
    z[0::2] = radius * np.cos(angle)
    z[1::2] = radius * np.sin(angle)
    return z[:count].reshape(shape)


# ---------------------------------------------------------------------------
# Balanced block structure


def membership_sizes(n: int, n_blocks: int) -> list[int]:
    """Near-equal block sizes; the first n mod n_blocks blocks get one extra."""
    if not 1 <= n_blocks <= n:
        raise ValueError(f"need 1 <= n_blocks <= n, got n_blocks={n_blocks}, n={n}")
    base, extra = divmod(n, n_blocks)
    return [base + 1 if b < extra else base for b in range(n_blocks)]


def membership_labels(n: int, n_blocks: int) -> np.ndarray:
    return np.repeat(np.arange(n_blocks), membership_sizes(n, n_blocks))


def membership_matrix(n: int, n_blocks: int) -> np.ndarray:
    """One-hot n x n_blocks membership indicator."""
    m = np.zeros((n, n_blocks))
    m[np.arange(n), membership_labels(n, n_blocks)] = 1.0
    return m


def block_probability_matrix(p_in: float, p_out: float, n_blocks: int) -> np.ndarray:
    for name, p in (("p_in", p_in), ("p_out", p_out)):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {p}")
    return (p_in - p_out) * np.eye(n_blocks) + p_out * np.ones((n_blocks, n_blocks))


# ---------------------------------------------------------------------------
# Stochastic block model graphs and their shift operators


def sbm_adjacency(gen: np.random.Generator, labels: np.ndarray,
                  prob: np.ndarray) -> np.ndarray:
    """One adjacency draw: upper-triangle Bernoulli, mirrored, zero diagonal.

    A full n x n uniform field is drawn and only the i < j entries are used,
    which fixes the stream layout independent of block sizes.
    """
    n = labels.size
    edge_prob = prob[labels[:, None], labels[None, :]]
    u = gen.random((n, n))
    upper = np.triu((u < edge_prob).astype(np.float64), k=1)
    return upper + upper.T


def has_isolated_vertex(a: np.ndarray) -> bool:
    return bool(np.min(a.sum(axis=1)) <= 0.0)


def sample_adjacency(make_gen: Callable[[int], np.random.Generator], n: int,
                     p_in: float, p_out: float, n_blocks: int,
                     max_tries: int = 100) -> tuple[np.ndarray, int]:
    """Draw adjacency matrices until every vertex has positive degree.

    make_gen maps the attempt index to a fresh generator, so retries use
    disjoint streams.  Returns the matrix and the attempt index that
    produced it; raises IsolatedVertexError after max_tries failures.
    """
    labels = membership_labels(n, n_blocks)
    prob = block_probability_matrix(p_in, p_out, n_blocks)
    for attempt in range(max_tries):
        a = sbm_adjacency(make_gen(attempt), labels, prob)
        if not has_isolated_vertex(a):
            return a, attempt
    raise IsolatedVertexError(
        f"no isolated-vertex-free draw in {max_tries} tries "
        f"(n={n}, p_in={p_in}, p_out={p_out}, blocks={n_blocks})")


def laplacian(a: np.ndarray) -> np.ndarray:
    return np.diag(a.sum(axis=1)) - a


def sym_normalized_laplacian(a: np.ndarray) -> np.ndarray:
    degrees = a.sum(axis=1)
    if np.min(degrees) <= 0.0:
        raise IsolatedVertexError("normalized laplacian needs positive degrees")
    inv_root = 1.0 / np.sqrt(degrees)
    return np.eye(a.shape[0]) - inv_root[:, None] * a * inv_root[None, :]


def degree_extreme_difference(a: np.ndarray) -> float:
    degrees = a.sum(axis=1)
    return float(degrees.max() - degrees.min())


# ---------------------------------------------------------------------------
# Generating (expected) matrices of the block model


def expected_adjacency(n: int, p_in: float, p_out: float, n_blocks: int) -> np.ndarray:
    """Edge-probability matrix with the diagonal zeroed (no self-loops)."""
    m = membership_matrix(n, n_blocks)
    prob = block_probability_matrix(p_in, p_out, n_blocks)
    b = m @ prob @ m.T
    np.fill_diagonal(b, 0.0)
    return b


def expected_laplacian(n: int, p_in: float, p_out: float, n_blocks: int) -> np.ndarray:
    return laplacian(expected_adjacency(n, p_in, p_out, n_blocks))


def expected_sym_normalized_laplacian(n: int, p_in: float, p_out: float,
                                      n_blocks: int) -> np.ndarray:
    return sym_normalized_laplacian(expected_adjacency(n, p_in, p_out, n_blocks))


# ---------------------------------------------------------------------------
# Spiked covariance model


def spiked_covariance(p: int, p_in: float, p_out: float, n_blocks: int) -> np.ndarray:
    """Population covariance: block signal plus identity noise floor."""
    m = membership_matrix(p, n_blocks)
    prob = block_probability_matrix(p_in, p_out, n_blocks)
    return m @ prob @ m.T + np.eye(p)


def sample_covariance(sigma: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Empirical covariance of n_samples = z.shape[1] draws from N(0, sigma).

    z holds the standard normal field explicitly so tests can inject it.
    """
    if z.ndim != 2 or z.shape[0] != sigma.shape[0]:
        raise ValueError(f"z must be (p, n_samples) with p={sigma.shape[0]}, got {z.shape}")
    root = cholesky(sigma)
    x = root @ z
    return (x @ x.T) / z.shape[1]


def sample_spiked_covariance(gen: np.random.Generator, sigma: np.ndarray,
                             n_samples: int) -> np.ndarray:
    z = normals(gen, (sigma.shape[0], n_samples))
    return sample_covariance(sigma, z)
