"""Graph encoder: stacked GCN layers with symmetric-normalized adjacency and
a mean read-out for the graph-level embedding."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .autodiff import ContractError, Tensor


def normalize_adjacency(m: np.ndarray) -> np.ndarray:
    """D^(-1/2) (M + I) D^(-1/2) with D the degree of the self-looped matrix."""
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ContractError(f"adjacency must be square, got {m.shape}")
    if not np.allclose(m, m.T):
        raise ContractError("adjacency must be symmetric")
    if np.any(m < 0) or np.any(np.diag(m) != 0):
        raise ContractError("adjacency must be nonnegative with zero diagonal")
    m_tilde = m + np.eye(m.shape[0])
    d_inv_sqrt = 1.0 / np.sqrt(m_tilde.sum(axis=1))
    return d_inv_sqrt[:, None] * m_tilde * d_inv_sqrt[None, :]


def normalize_adjacency_t(m: Tensor) -> Tensor:
    """Differentiable twin of normalize_adjacency for generated (soft)
    adjacency matrices; assumes zero diagonal and nonnegative entries."""
    n = m.shape[0]
    m_tilde = ad.add(m, Tensor(np.eye(n)))
    ones = Tensor(np.ones((n, 1)))
    deg = ad.matmul(m_tilde, ones)            # (n, 1)
    s = ad.powc(deg, -0.5)
    scale = ad.matmul(s, ad.transpose(s))     # outer product s s^T
    return ad.mul(scale, m_tilde)


def make_encoder_params(rng, in_dim: int, hidden: int, layers: int = 2,
                        prefix: str = "enc") -> dict:
    params = {}
    width = in_dim
    for k in range(layers):
        params[f"{prefix}.W{k}"] = ad.parameter(rng, width, hidden,
                                                name=f"{prefix}.W{k}")
        width = hidden
    return params


@dataclass
class EncodedGraph:
    node_embeddings: Tensor  # (n, hidden)
    graph_embedding: Tensor  # (1, hidden), column-mean of node embeddings


def encode(features: np.ndarray, adjacency: np.ndarray, params: dict,
           layers: int = 2, prefix: str = "enc") -> EncodedGraph:
    """K layers of ReLU(A_hat Q W); the initial adjacency is a constant."""
    if features.shape[0] != adjacency.shape[0]:
        raise ContractError("feature rows must match adjacency size")
    a_hat = Tensor(normalize_adjacency(adjacency))
    q = Tensor(features)
    for k in range(layers):
        w = params[f"{prefix}.W{k}"]
        if q.shape[1] != w.shape[0]:
            raise ContractError(f"layer {k}: width {q.shape[1]} vs {w.shape[0]}")
        q = ad.relu(ad.matmul(ad.matmul(a_hat, q), w))
    return EncodedGraph(q, ad.mean_rows(q))
