"""Full model assembly: parameter construction and the per-document forward
pass shared by training and evaluation."""

from __future__ import annotations

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor
from .encoder import encode, make_encoder_params
from .predictor import make_predictor_params, predict, classification_loss, total_loss
from .translator import TranslateConfig, make_translator_params, translate

TRANSLATING_VARIANTS = ("neigh", "path", "var")


def build_params(rng, feature_dim: int, hidden: int, num_classes: int,
                 max_size: int, variant: str, gnn_layers: int = 2) -> dict:
    params = {}
    params.update(make_encoder_params(rng, feature_dim, hidden, gnn_layers))
    if variant in TRANSLATING_VARIANTS:
        fout = "path" if variant == "path" else "neigh"
        params.update(make_translator_params(rng, hidden, max_size, fout))
    params.update(make_predictor_params(rng, hidden, num_classes, gnn_layers))
    return params


def forward_document(graph, features, label, params, *, variant: str,
                     max_size: int, tau: float, mode: str, rng,
                     lambda1: float, lambda2: float, rbf, gnn_layers: int = 2,
                     binary_adjacency: bool = False, straight_through: bool = True):
    """Encode, translate (unless variant=init), predict, and combine losses.

    Returns (loss tensor, LossBreakdown, TranslatedGraph or None, logits).
    """
    adj = graph.adjacency(binary=binary_adjacency)
    enc = encode(features, adj, params, layers=gnn_layers)

    if variant == "init":
        logits = predict(enc.node_embeddings, Tensor(adj), params,
                         layers=gnn_layers)
        l_cls = classification_loss(logits, label)
        zero = Tensor([[0.0]])
        loss, breakdown = total_loss(l_cls, zero, zero, lambda1, lambda2)
        return loss, breakdown, None, logits

    cfg = TranslateConfig(max_size=max_size, tau=tau, mode=mode,
                          variant="path" if variant == "path" else "neigh",
                          allow_eos=(variant == "var"), rng=rng, rbf=rbf,
                          straight_through=straight_through)
    tg, l_cov, l_len = translate(enc, graph, params, cfg)
    if tg.size == 0:
        # EOS fired immediately in train mode; only the regularizers apply
        l_cls = Tensor([[0.0]])
        logits = None
    else:
        logits = predict(tg.selected_embeddings, tg.soft_adjacency, params,
                         layers=gnn_layers)
        l_cls = classification_loss(logits, label)
    loss, breakdown = total_loss(l_cls, l_cov, l_len, lambda1, lambda2)
    return loss, breakdown, tg, logits


def snapshot_params(params: dict) -> dict:
    return {k: p.data.copy() for k, p in params.items()}


def restore_params(params: dict, snapshot: dict):
    for k, p in params.items():
        p.data = snapshot[k].copy()


def zero_grads(params: dict):
    for p in params.values():
        p.zero_grad()
