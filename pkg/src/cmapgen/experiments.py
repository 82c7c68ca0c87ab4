"""Experiment protocols: seed repeats, label-efficiency curves, and
size-distribution sweeps for the flexible-size variant."""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace, field

import numpy as np

from .corpus import Splits
from .errors import DataError
from .trainer import TrainConfig, evaluate, train, _forward

log = logging.getLogger(__name__)

DEFAULT_PROPORTIONS = (0.001, 0.0025, 0.005, 0.0075, 0.01, 0.025, 0.05,
                       0.075, 0.10)
DEFAULT_MAX_SIZES = (10, 20, 30)
DEFAULT_SEEDS = (0, 1, 2)
SIZE_BUCKET = 5


@dataclass
class SeedRepeatResult:
    seeds: list
    accuracies: list
    mean: float
    std: float  # population std


def run_seed_repeats(corpus, splits, graphs, features, cfg: TrainConfig,
                     seeds=DEFAULT_SEEDS) -> SeedRepeatResult:
    if len(seeds) < 2:
        raise DataError("seed repeats need at least 2 seeds")
    accs = []
    for seed in seeds:
        _, report = train(corpus, splits, graphs, features,
                          replace(cfg, seed=seed))
        accs.append(report.test_accuracy)
    arr = np.asarray(accs)
    return SeedRepeatResult(list(seeds), accs, float(arr.mean()),
                            float(arr.std()))


def stratified_subsample(splits: Splits, labels, proportion: float, seed: int):
    """Per-class floor(p * n_c) picks from the train split; returns None when
    any class would get zero documents."""
    by_class = {}
    for idx in splits.train:
        by_class.setdefault(labels[idx], []).append(idx)
    rng = np.random.default_rng(seed)
    chosen = []
    for label in sorted(by_class):
        pool = by_class[label]
        k = int(len(pool) * proportion)
        if k < 1:
            return None
        picks = rng.choice(len(pool), size=k, replace=False)
        chosen.extend(pool[i] for i in sorted(picks))
    return tuple(sorted(chosen))


@dataclass
class LabelEfficiencyPoint:
    proportion: float
    n_train: int
    accuracy: float
    skipped: bool = False


def run_label_efficiency(corpus, splits, graphs, features, cfg: TrainConfig,
                         proportions=DEFAULT_PROPORTIONS) -> list:
    if list(proportions) != sorted(proportions) or \
            not all(0 < p <= 1 for p in proportions):
        raise DataError("proportions must be ascending and in (0, 1]")
    labels = [d.label for d in corpus.documents]
    points = []
    for p in proportions:
        subset = stratified_subsample(splits, labels, p, cfg.seed)
        if subset is None:
            log.warning("proportion %.4f yields <1 doc for some class; skipped", p)
            points.append(LabelEfficiencyPoint(p, 0, float("nan"), skipped=True))
            continue
        sub_splits = Splits(subset, splits.valid, splits.test)
        _, report = train(corpus, sub_splits, graphs, features, cfg)
        points.append(LabelEfficiencyPoint(p, len(subset), report.test_accuracy))
    return points


def label_efficiency_csv(points) -> str:
    lines = ["proportion,n_train,accuracy,skipped"]
    for pt in points:
        lines.append(f"{pt.proportion},{pt.n_train},{pt.accuracy},"
                     f"{int(pt.skipped)}")
    return "\n".join(lines) + "\n"


@dataclass
class SizeDistribution:
    max_size: int
    sizes: list
    histogram: dict = field(default_factory=dict)  # bucket label -> count

    def __post_init__(self):
        if not self.histogram:
            for s in self.sizes:
                hi = max(1, -(-s // SIZE_BUCKET)) * SIZE_BUCKET
                label = f"{hi - SIZE_BUCKET + 1}-{hi}" if s > 0 else "0"
                self.histogram[label] = self.histogram.get(label, 0) + 1

    @property
    def std(self):
        return float(np.asarray(self.sizes, dtype=float).std())


def run_size_distribution(corpus, splits, graphs, features, cfg: TrainConfig,
                          max_sizes=DEFAULT_MAX_SIZES) -> list:
    """Train the flexible variant per maximum size and histogram the generated
    graph sizes on the test split."""
    if cfg.variant != "var":
        raise DataError("size-distribution protocol requires variant=var")
    results = []
    for max_size in max_sizes:
        params, _ = train(corpus, splits, graphs, features,
                          replace(cfg, max_size=max_size))
        size_cfg = replace(cfg, max_size=max_size)
        sizes = []
        for i in splits.test:
            _, _, tg, _ = _forward(i, corpus, graphs, features, params,
                                   size_cfg, tau=cfg.tau_min, mode="eval",
                                   rng=None)
            sizes.append(tg.size if tg is not None else 0)
        results.append(SizeDistribution(max_size, sizes))
    return results


def size_distribution_csv(results) -> str:
    lines = ["max_size,bucket,count"]
    for dist in results:
        for bucket in sorted(dist.histogram,
                             key=lambda b: int(b.split("-")[0])):
            lines.append(f"{dist.max_size},{bucket},{dist.histogram[bucket]}")
    return "\n".join(lines) + "\n"


def spearman_rho(xs, ys) -> float:
    """Spearman rank correlation (average ranks for ties)."""
    def ranks(vals):
        order = np.argsort(vals, kind="stable")
        r = np.empty(len(vals))
        i = 0
        sorted_vals = np.asarray(vals)[order]
        while i < len(vals):
            j = i
            while j + 1 < len(vals) and sorted_vals[j + 1] == sorted_vals[i]:
                j += 1
            r[order[i:j + 1]] = (i + j) / 2.0
            i = j + 1
        return r

    rx, ry = ranks(list(xs)), ranks(list(ys))
    sx, sy = rx.std(), ry.std()
    if sx == 0 or sy == 0:
        return float("nan")
    return float(((rx - rx.mean()) * (ry - ry.mean())).mean() / (sx * sy))
