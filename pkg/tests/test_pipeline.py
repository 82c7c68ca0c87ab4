"""Config parsing, preparation glue, and checkpoint files."""

import numpy as np
import pytest

from cmapgen.corpus import load_corpus
from cmapgen.errors import DataError, UsageError
from cmapgen.pipeline import (annotations_for, load_checkpoint, parse_config,
                              prepare, save_checkpoint)
from cmapgen.synth import SynthSpec, generate_synthetic
from cmapgen.trainer import TrainConfig
from cmapgen.model import build_params


def test_parse_config_defaults_and_overrides():
    cfg = parse_config("")
    assert cfg == TrainConfig()
    cfg = parse_config("hidden = 32\nlr=0.003  # comment\nvariant=path\n"
                       "binary_adjacency=true\n")
    assert cfg.hidden == 32
    assert cfg.lr == 0.003
    assert cfg.variant == "path"
    assert cfg.binary_adjacency is True


def test_parse_config_rejects_unknown_key_and_bad_line():
    with pytest.raises(UsageError, match="unknown key"):
        parse_config("hiden=32")
    with pytest.raises(UsageError, match="key=value"):
        parse_config("just words")


def test_parse_config_keyword_overrides_win():
    cfg = parse_config("seed=5", seed=9)
    assert cfg.seed == 9


def test_annotations_for_heuristic_fallback(tiny_corpus_file):
    corpus = load_corpus(tiny_corpus_file)
    anns = annotations_for(corpus)
    assert set(anns) == {d.id for d in corpus.documents}


def test_prepare_builds_graph_per_document():
    corpus, _, emb = generate_synthetic(
        SynthSpec(num_classes=2, docs_per_class=3, doc_len=18, seed=0))
    anns = annotations_for(corpus)
    graphs, features = prepare(corpus, anns, emb, window=5)
    assert set(graphs) == set(range(len(corpus)))
    for idx, g in graphs.items():
        assert features[idx].shape == (len(g.nodes), emb.dim + 2)


def test_checkpoint_round_trip(tmp_path):
    cfg = TrainConfig(hidden=8, max_size=4, embedding_dim=4)
    rng = np.random.default_rng(0)
    params = build_params(rng, 6, cfg.hidden, 2, cfg.max_size, cfg.variant)
    path = tmp_path / "ckpt.json"
    save_checkpoint(path, params, cfg, {"num_classes": 2, "feature_dim": 6})
    loaded, loaded_cfg, meta = load_checkpoint(path)
    assert loaded_cfg == cfg
    assert meta == {"num_classes": 2, "feature_dim": 6}
    assert set(loaded) == set(params)
    for k in params:
        np.testing.assert_array_equal(loaded[k].data, params[k].data)


def test_load_checkpoint_rejects_malformed(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"config": {}, "params": {}}')
    with pytest.raises(DataError):
        load_checkpoint(path)
