"""Adjacency normalization and the GCN encoder."""

import numpy as np
import pytest

import cmapgen.autodiff as ad
from cmapgen.autodiff import ContractError, Tensor
from cmapgen.encoder import (encode, make_encoder_params, normalize_adjacency,
                             normalize_adjacency_t)


def dense_normalize(m):
    """Brute-force D^(-1/2) (M+I) D^(-1/2) oracle."""
    m_tilde = m + np.eye(m.shape[0])
    d = np.diag(m_tilde.sum(axis=1))
    d_inv_sqrt = np.linalg.inv(np.sqrt(d))
    return d_inv_sqrt @ m_tilde @ d_inv_sqrt


def test_normalize_two_node_exchange():
    out = normalize_adjacency(np.array([[0.0, 1.0], [1.0, 0.0]]))
    np.testing.assert_allclose(out, [[0.5, 0.5], [0.5, 0.5]], atol=1e-12)


def test_normalize_isolated_node():
    np.testing.assert_array_equal(normalize_adjacency(np.zeros((1, 1))), [[1.0]])


def test_normalize_matches_dense_oracle():
    rng = np.random.default_rng(4)
    for n in (2, 5, 9, 12):
        m = rng.random((n, n)) * 3.0
        m = np.triu(m, 1)
        m = m + m.T
        np.testing.assert_allclose(normalize_adjacency(m), dense_normalize(m),
                                   atol=1e-10)


def test_normalize_rejects_asymmetric():
    with pytest.raises(ContractError):
        normalize_adjacency(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_differentiable_normalization_matches_numpy_twin():
    rng = np.random.default_rng(6)
    m = rng.random((5, 5))
    m = np.triu(m, 1)
    m = m + m.T
    out = normalize_adjacency_t(Tensor(m))
    np.testing.assert_allclose(out.data, normalize_adjacency(m), atol=1e-10)


def test_encode_zero_weights_gives_zero_embedding():
    rng = np.random.default_rng(0)
    params = make_encoder_params(rng, 3, 4)
    for p in params.values():
        p.data[:] = 0.0
    enc = encode(np.ones((2, 3)), np.array([[0.0, 1.0], [1.0, 0.0]]), params)
    np.testing.assert_array_equal(enc.node_embeddings.data, np.zeros((2, 4)))
    np.testing.assert_array_equal(enc.graph_embedding.data, np.zeros((1, 4)))


def test_encode_single_node_readout_equals_node():
    rng = np.random.default_rng(1)
    params = make_encoder_params(rng, 3, 4)
    enc = encode(np.ones((1, 3)), np.zeros((1, 1)), params)
    np.testing.assert_array_equal(enc.graph_embedding.data,
                                  enc.node_embeddings.data)


def test_encoder_permutation_equivariance():
    rng = np.random.default_rng(9)
    for n in (3, 7, 12):
        feats = rng.normal(size=(n, 5))
        m = rng.random((n, n)) * (rng.random((n, n)) < 0.5)
        m = np.triu(m, 1)
        m = m + m.T
        params = make_encoder_params(rng, 5, 6)
        perm = rng.permutation(n)
        p_mat = np.eye(n)[perm]
        base = encode(feats, m, params)
        shuffled = encode(feats[perm], p_mat @ m @ p_mat.T, params)
        np.testing.assert_allclose(shuffled.node_embeddings.data,
                                   base.node_embeddings.data[perm], atol=1e-10)
        np.testing.assert_allclose(shuffled.graph_embedding.data,
                                   base.graph_embedding.data, atol=1e-10)


def test_encode_checks_shapes():
    rng = np.random.default_rng(0)
    params = make_encoder_params(rng, 3, 4)
    with pytest.raises(ContractError):
        encode(np.ones((2, 3)), np.zeros((3, 3)), params)
