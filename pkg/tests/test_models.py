"""Random models: keyed streams, block graphs, spiked covariance."""

import hashlib

import numpy as np
import pytest

from dkaffine.models import (
    IsolatedVertexError,
    block_probability_matrix,
    degree_extreme_difference,
    expected_adjacency,
    expected_laplacian,
    expected_sym_normalized_laplacian,
    has_isolated_vertex,
    laplacian,
    membership_labels,
    membership_matrix,
    membership_sizes,
    normals,
    sample_adjacency,
    sample_covariance,
    sample_spiked_covariance,
    sbm_adjacency,
    spiked_covariance,
    stream,
    sym_normalized_laplacian,
)


def test_stream_is_deterministic_and_label_sensitive():
    a = stream(1729, "alpha", 3).random(5)
    b = stream(1729, "alpha", 3).random(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, stream(1729, "alpha", 4).random(5))
    assert not np.array_equal(a, stream(1730, "alpha", 3).random(5))
    assert not np.array_equal(a, stream(1729, 3, "alpha").random(5))


def test_stream_key_derivation_pinned():
    # the key is sha256 of "seed|label|..." truncated to two 64-bit words
    digest = hashlib.sha256(b"7|run|2").digest()
    key = np.frombuffer(digest[:16], dtype="<u8")
    expected = np.random.Generator(np.random.Philox(key=key)).random(8)
    assert np.array_equal(stream(7, "run", 2).random(8), expected)


def test_normals_box_muller_matches_manual():
    z = normals(stream(11, "z"), (6,))
    gen = stream(11, "z")
    u1 = 1.0 - gen.random(3)
    u2 = gen.random(3)
    radius = np.sqrt(-2.0 * np.log(u1))
    manual = np.empty(6)
    manual[0::2] = radius * np.cos(2 * np.pi * u2)
    manual[1::2] = radius * np.sin(2 * np.pi * u2)
    assert np.array_equal(z, manual)


def test_normals_shapes_and_moments():
    assert normals(stream(12, "m"), (3, 4)).shape == (3, 4)
    assert normals(stream(12, "m"), (7,)).shape == (7,)  # odd count works
    z = normals(stream(12, "big"), (50000,))
    assert abs(float(z.mean())) < 0.02
    assert abs(float(z.std()) - 1.0) < 0.02


def test_membership_layout():
    assert membership_sizes(10, 3) == [4, 3, 3]
    assert membership_sizes(9, 3) == [3, 3, 3]
    assert sum(membership_sizes(31, 4)) == 31
    with pytest.raises(ValueError):
        membership_sizes(3, 4)
    with pytest.raises(ValueError):
        membership_sizes(3, 0)
    labels = membership_labels(10, 3)
    assert labels.tolist() == [0, 0, 0, 0, 1, 1, 1, 2, 2, 2]
    m = membership_matrix(10, 3)
    assert m.shape == (10, 3)
    assert np.array_equal(m.sum(axis=1), np.ones(10))
    assert np.array_equal(np.argmax(m, axis=1), labels)


def test_block_probability_matrix_values():
    p = block_probability_matrix(0.9, 0.1, 3)
    assert np.allclose(np.diag(p), 0.9)
    off = p[~np.eye(3, dtype=bool)]
    assert np.allclose(off, 0.1)
    with pytest.raises(ValueError):
        block_probability_matrix(1.2, 0.1, 2)
    with pytest.raises(ValueError):
        block_probability_matrix(0.5, -0.1, 2)


def test_sbm_adjacency_structure():
    labels = membership_labels(20, 3)
    prob = block_probability_matrix(0.8, 0.1, 3)
    a = sbm_adjacency(stream(5, "draw"), labels, prob)
    assert np.array_equal(a, a.T)
    assert np.all(np.diag(a) == 0.0)
    assert set(np.unique(a)) <= {0.0, 1.0}
    again = sbm_adjacency(stream(5, "draw"), labels, prob)
    assert np.array_equal(a, again)


def test_sbm_adjacency_degenerate_probabilities():
    labels = membership_labels(9, 3)
    full = sbm_adjacency(stream(6, "x"), labels, block_probability_matrix(1.0, 0.0, 3))
    # complete within blocks, empty across
    expected = (labels[:, None] == labels[None, :]).astype(float)
    np.fill_diagonal(expected, 0.0)
    assert np.array_equal(full, expected)


def test_isolated_vertex_detection():
    a = np.array([[0.0, 1, 0], [1, 0, 0], [0, 0, 0]])
    assert has_isolated_vertex(a)
    assert not has_isolated_vertex(np.array([[0.0, 1], [1, 0]]))


def test_sample_adjacency_retries_and_failure():
    def make_gen(attempt):
        return stream(13, "adj", attempt)

    a, attempt = sample_adjacency(make_gen, 12, 0.9, 0.2, 3)
    assert attempt >= 0
    assert not has_isolated_vertex(a)
    with pytest.raises(IsolatedVertexError):
        sample_adjacency(make_gen, 12, 0.0, 0.0, 3, max_tries=3)


def test_laplacian_properties():
    a = sbm_adjacency(stream(14, "lap"), membership_labels(15, 3),
                      block_probability_matrix(0.7, 0.2, 3))
    lap = laplacian(a)
    assert np.allclose(lap.sum(axis=1), 0.0)
    assert np.min(np.linalg.eigvalsh(lap)) >= -1e-10


def test_sym_normalized_laplacian_spectrum_range():
    a = np.array([[0.0, 1, 1], [1, 0, 0], [1, 0, 0]])
    lsym = sym_normalized_laplacian(a)
    vals = np.linalg.eigvalsh(lsym)
    assert vals.min() >= -1e-12
    assert vals.max() <= 2.0 + 1e-12
    d = a.sum(axis=1)
    manual = np.eye(3) - a / np.sqrt(np.outer(d, d))
    assert np.allclose(lsym, manual)
    with pytest.raises(IsolatedVertexError):
        sym_normalized_laplacian(np.zeros((2, 2)))


def test_degree_extreme_difference():
    a = np.array([[0.0, 1, 1], [1, 0, 0], [1, 0, 0]])
    assert degree_extreme_difference(a) == 1.0


def test_expected_operators():
    b = expected_adjacency(9, 0.8, 0.2, 3)
    labels = membership_labels(9, 3)
    same = labels[:, None] == labels[None, :]
    assert np.all(np.diag(b) == 0.0)
    off_diag = ~np.eye(9, dtype=bool)
    assert np.allclose(b[same & off_diag], 0.8)
    assert np.allclose(b[~same], 0.2)
    bl = expected_laplacian(9, 0.8, 0.2, 3)
    assert np.allclose(bl.sum(axis=1), 0.0)
    blsym = expected_sym_normalized_laplacian(9, 0.8, 0.2, 3)
    assert np.allclose(np.diag(blsym), 1.0)


def test_spiked_covariance_structure():
    sigma = spiked_covariance(9, 0.8, 0.2, 3)
    labels = membership_labels(9, 3)
    same = labels[:, None] == labels[None, :]
    off_diag = ~np.eye(9, dtype=bool)
    assert np.allclose(np.diag(sigma), 1.8)
    assert np.allclose(sigma[same & off_diag], 0.8)
    assert np.allclose(sigma[~same], 0.2)
    # three block spikes above a flat noise floor of ones
    vals = np.linalg.eigvalsh(sigma)
    assert np.allclose(vals[:6], 1.0)
    assert np.all(vals[6:] > 1.5)


def test_sample_covariance_identity_case():
    z = normals(stream(15, "z"), (4, 50))
    s = sample_covariance(np.eye(4), z)
    assert np.allclose(s, (z @ z.T) / 50)
    with pytest.raises(ValueError):
        sample_covariance(np.eye(4), np.zeros((3, 50)))


def test_sample_spiked_covariance_converges():
    sigma = spiked_covariance(6, 0.7, 0.3, 3)
    s = sample_spiked_covariance(stream(16, "cov"), sigma, 40000)
    assert np.array_equal(s, s.T)
    assert np.max(np.abs(s - sigma)) < 0.1
    again = sample_spiked_covariance(stream(16, "cov"), sigma, 40000)
    assert np.array_equal(s, again)
