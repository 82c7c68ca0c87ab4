"""Graph predictor: GCN-style layers over the translated (soft) adjacency,
mean pooling, and a two-layer classifier head, plus the loss assembly."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .autodiff import ContractError, Tensor
from .encoder import normalize_adjacency_t


def make_predictor_params(rng, hidden: int, num_classes: int,
                          layers: int = 2) -> dict:
    params = {}
    for k in range(layers):
        params[f"gin.W{k}"] = ad.parameter(rng, hidden, hidden, name=f"gin.W{k}")
    params["cls.W1"] = ad.parameter(rng, hidden, hidden, name="cls.W1")
    params["cls.b1"] = ad.zeros_param(1, hidden, name="cls.b1")
    params["cls.W2"] = ad.parameter(rng, hidden, num_classes, name="cls.W2")
    params["cls.b2"] = ad.zeros_param(1, num_classes, name="cls.b2")
    return params


def predict(node_embeddings: Tensor, soft_adjacency: Tensor, params: dict,
            layers: int = 2) -> Tensor:
    """Logits for a translated graph: GCN layers over the generated adjacency
    (self-loops added by normalization), average read-out, 2-layer MLP."""
    if node_embeddings is None or node_embeddings.shape[0] == 0:
        raise ContractError("cannot predict on an empty graph")
    if soft_adjacency.shape[0] != node_embeddings.shape[0]:
        raise ContractError("adjacency size must match node count")
    a_hat = normalize_adjacency_t(soft_adjacency)
    q = node_embeddings
    for k in range(layers):
        q = ad.relu(ad.matmul(ad.matmul(a_hat, q), params[f"gin.W{k}"]))
    pooled = ad.mean_rows(q)
    hid = ad.relu(ad.add(ad.matmul(pooled, params["cls.W1"]), params["cls.b1"]))
    return ad.add(ad.matmul(hid, params["cls.W2"]), params["cls.b2"])


def classification_loss(logits: Tensor, label: int) -> Tensor:
    return ad.cross_entropy_with_logits(logits, label)


@dataclass
class LossBreakdown:
    l_cls: float
    l_cov: float
    l_len: float
    lambda1: float
    lambda2: float

    @property
    def l_total(self):
        return self.l_cls + self.lambda1 * self.l_cov + self.lambda2 * self.l_len

    def to_dict(self):
        return {"l_cls": self.l_cls, "l_cov": self.l_cov, "l_len": self.l_len,
                "lambda1": self.lambda1, "lambda2": self.lambda2,
                "l_total": self.l_total}


def total_loss(l_cls: Tensor, l_cov: Tensor, l_len: Tensor,
               lambda1: float, lambda2: float):
    """Combine the three loss terms; returns (tensor, LossBreakdown)."""
    if lambda1 < 0 or lambda2 < 0:
        raise ContractError("loss weights must be nonnegative")
    total = ad.add(l_cls, ad.add(ad.scalar_mul(l_cov, lambda1),
                                 ad.scalar_mul(l_len, lambda2)))
    breakdown = LossBreakdown(l_cls.item(), l_cov.item(), l_len.item(),
                              lambda1, lambda2)
    assert abs(breakdown.l_total - total.item()) < 1e-12
    return total, breakdown
