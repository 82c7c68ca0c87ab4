"""Weakly supervised end-to-end training loop and evaluation."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, asdict

import numpy as np

from . import autodiff as ad
from .autodiff import Tape, backward
from .errors import DataError, UsageError
from .model import build_params, forward_document, snapshot_params, \
    restore_params, zero_grads
from .translator import RbfPenalty

log = logging.getLogger(__name__)

VARIANTS = ("neigh", "path", "init", "var")


@dataclass
class TrainConfig:
    lr: float = 3e-4
    max_epochs: int = 500
    batch_size: int = 64
    hidden: int = 128
    gnn_layers: int = 2
    max_size: int = 10
    lambda1: float = 1.0
    lambda2: float = 0.1
    tau0: float = 5.0
    tau_min: float = 0.5
    anneal_rate: float = 0.02
    sigma: float = 4.0
    t_prime: float = 0.0
    variant: str = "neigh"
    window: int = 5
    seed: int = 0
    patience: int = 25          # 0 disables early stopping
    clip_norm: float = 5.0
    embedding_dim: int = 100
    binary_adjacency: bool = False

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise UsageError(f"variant must be one of {VARIANTS}")
        for name in ("lr", "batch_size", "hidden", "gnn_layers",
                     "max_size", "tau0", "tau_min", "sigma"):
            if getattr(self, name) <= 0:
                raise UsageError(f"{name} must be positive")
        if self.max_epochs < 0:
            raise UsageError("max_epochs must be nonnegative")
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise UsageError("lambda weights must be nonnegative")

    def rbf(self):
        return RbfPenalty(self.sigma, self.t_prime)


@dataclass
class EpochLog:
    epoch: int
    tau: float
    train_loss: float
    train_l_cls: float
    train_l_cov: float
    train_l_len: float
    valid_accuracy: float


@dataclass
class TrainReport:
    epochs: list = field(default_factory=list)
    best_epoch: int = -1
    best_valid_accuracy: float = -1.0
    test_accuracy: float = float("nan")
    stopped_early: bool = False

    def to_dict(self):
        return {"epochs": [asdict(e) for e in self.epochs],
                "best_epoch": self.best_epoch,
                "best_valid_accuracy": self.best_valid_accuracy,
                "test_accuracy": self.test_accuracy,
                "stopped_early": self.stopped_early}


def anneal_temperature(epoch: int, cfg: TrainConfig) -> float:
    """tau = max(tau_min, tau0 * exp(-rate * epoch)); nonincreasing in epoch."""
    return max(cfg.tau_min, cfg.tau0 * math.exp(-cfg.anneal_rate * epoch))


def _forward(doc_idx, corpus, graphs, features, params, cfg, tau, mode, rng):
    doc = corpus.documents[doc_idx]
    return forward_document(
        graphs[doc_idx], features[doc_idx], doc.label, params,
        variant=cfg.variant, max_size=cfg.max_size, tau=tau, mode=mode, rng=rng,
        lambda1=cfg.lambda1, lambda2=cfg.lambda2, rbf=cfg.rbf(),
        gnn_layers=cfg.gnn_layers, binary_adjacency=cfg.binary_adjacency)


def evaluate(params, corpus, indices, graphs, features, cfg: TrainConfig) -> float:
    """Noise-free eval-mode accuracy over a split."""
    if not indices:
        return float("nan")
    correct = 0
    for i in indices:
        _, _, _, logits = _forward(i, corpus, graphs, features, params, cfg,
                                   tau=cfg.tau_min, mode="eval", rng=None)
        if logits is not None and \
                int(np.argmax(logits.data[0])) == corpus.documents[i].label:
            correct += 1
    return correct / len(indices)


def train(corpus, splits, graphs, features, cfg: TrainConfig):
    """Mini-batch Adam on the combined objective; keeps the checkpoint with
    the best validation accuracy.  Deterministic given cfg (incl. seed)."""
    if not splits.train:
        raise DataError("empty train split")
    feature_dim = features[splits.train[0]].shape[1]
    rng = np.random.default_rng(cfg.seed)
    params = build_params(rng, feature_dim, cfg.hidden, corpus.num_classes,
                          cfg.max_size, cfg.variant, cfg.gnn_layers)
    state = ad.AdamState(lr=cfg.lr)
    report = TrainReport()
    best = snapshot_params(params)
    since_best = 0

    for epoch in range(cfg.max_epochs):
        tau = anneal_temperature(epoch, cfg)
        order = list(splits.train)
        rng.shuffle(order)
        epoch_loss = epoch_cls = epoch_cov = epoch_len = 0.0
        n_batches = 0
        for at in range(0, len(order), cfg.batch_size):
            batch = order[at:at + cfg.batch_size]
            zero_grads(params)
            with Tape():
                total = None
                for i in batch:
                    loss, bd, _, _ = _forward(i, corpus, graphs, features,
                                              params, cfg, tau, "train", rng)
                    total = loss if total is None else ad.add(total, loss)
                    epoch_cls += bd.l_cls
                    epoch_cov += bd.l_cov
                    epoch_len += bd.l_len
                mean_loss = ad.scalar_mul(total, 1.0 / len(batch))
                value = mean_loss.item()
                if not math.isfinite(value):
                    raise ad.NumericFault(f"training diverged at epoch {epoch}")
                backward(mean_loss)
            ad.clip_gradients(params, cfg.clip_norm)
            ad.adam_step(params, state)
            epoch_loss += value
            n_batches += 1

        n_train = len(order)
        valid_acc = evaluate(params, corpus, splits.valid, graphs, features, cfg)
        report.epochs.append(EpochLog(
            epoch, tau, epoch_loss / n_batches, epoch_cls / n_train,
            epoch_cov / n_train, epoch_len / n_train, valid_acc))
        # ties prefer the later epoch: with small validation splits the metric
        # saturates early while the model is still improving
        if math.isnan(valid_acc) or valid_acc >= report.best_valid_accuracy:
            report.best_valid_accuracy = valid_acc
            report.best_epoch = epoch
            best = snapshot_params(params)
            since_best = 0
        else:
            since_best += 1
            if cfg.patience and since_best >= cfg.patience:
                report.stopped_early = True
                break

    restore_params(params, best)
    report.test_accuracy = evaluate(params, corpus, splits.test, graphs,
                                    features, cfg)
    return params, report
