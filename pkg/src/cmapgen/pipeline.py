"""Glue between file formats and the model: config parsing, per-document
graph/feature preparation, and checkpoint files."""

from __future__ import annotations

import dataclasses
import json

from .annotate import chunk_heuristic, load_annotations
from .autodiff import Tensor
from .corpus import Corpus, EmbeddingTable
from .errors import DataError, UsageError
from .graphs import build_initial_graph, compute_node_features
from .trainer import TrainConfig


def parse_config(text: str, **overrides) -> TrainConfig:
    """Flat key=value lines; '#' starts a comment.  Keys are TrainConfig
    fields."""
    fields = {f.name: f.type for f in dataclasses.fields(TrainConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected key=value")
        key, val = (part.strip() for part in line.split("=", 1))
        if key not in fields:
            raise UsageError(f"config line {lineno}: unknown key {key!r}")
        values[key] = val
    values.update({k: str(v) for k, v in overrides.items() if v is not None})
    kwargs = {}
    for key, val in values.items():
        current = getattr(TrainConfig, key)
        if isinstance(current, bool):
            kwargs[key] = val.lower() in ("1", "true", "yes")
        elif isinstance(current, int):
            kwargs[key] = int(val)
        elif isinstance(current, float):
            kwargs[key] = float(val)
        else:
            kwargs[key] = val
    return TrainConfig(**kwargs)


def load_config(path, **overrides) -> TrainConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), **overrides)


def annotations_for(corpus: Corpus, annotations_path=None) -> dict:
    """Load bridge annotations or fall back to the heuristic chunker."""
    if annotations_path is not None:
        anns = load_annotations(annotations_path)
        missing = [d.id for d in corpus.documents if d.id not in anns]
        if missing:
            raise DataError(f"annotations missing for docs: {missing[:5]}")
        return anns
    return {d.id: chunk_heuristic(d.text, d.id) for d in corpus.documents}


def prepare(corpus: Corpus, annotations: dict, embeddings: EmbeddingTable,
            window: int = 5):
    """Initial graph and feature matrix per document index."""
    graphs = {}
    features = {}
    for idx, doc in enumerate(corpus.documents):
        ann = annotations[doc.id]
        graph = build_initial_graph(ann, window)
        if not graph.nodes:
            raise DataError(f"document {doc.id!r} yielded no concept candidates")
        graphs[idx] = graph
        features[idx] = compute_node_features(graph, embeddings,
                                              max(1, len(ann.tokens)))
    return graphs, features


def save_checkpoint(path, params: dict, cfg: TrainConfig, meta: dict):
    payload = {
        "config": dataclasses.asdict(cfg),
        "meta": meta,
        "params": {name: {"shape": list(p.data.shape),
                          "values": p.data.ravel().tolist()}
                   for name, p in params.items()},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)


def load_checkpoint(path):
    import numpy as np
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    try:
        cfg = TrainConfig(**payload["config"])
        meta = payload["meta"]
        params = {}
        for name, entry in payload["params"].items():
            arr = np.asarray(entry["values"], dtype=np.float64) \
                .reshape(entry["shape"])
            params[name] = Tensor(arr, requires_grad=True, name=name)
    except (KeyError, TypeError) as e:
        raise DataError(f"malformed checkpoint {path}: {e}") from e
    return params, cfg, meta
