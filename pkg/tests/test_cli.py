"""Command-line surface: subcommands, artifacts, and exit codes."""

import json

import pytest

from cmapgen.cli import main


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth")
    spec = out / "spec.json"
    spec.write_text(json.dumps({"num_classes": 2, "docs_per_class": 6,
                                "doc_len": 24, "background_vocab": 12,
                                "num_distractors": 3, "seed": 0}))
    assert main(["synth", "--spec", str(spec), "--out-dir", str(out)]) == 0
    return out


@pytest.fixture(scope="module")
def trained_dir(synth_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("train")
    cfg = out / "config.txt"
    cfg.write_text("hidden=10\nmax_epochs=2\nbatch_size=4\nmax_size=5\n"
                   "embedding_dim=32\npatience=0\n")
    code = main(["train", "--corpus", str(synth_dir / "corpus.jsonl"),
                 "--embeddings", str(synth_dir / "embeddings.txt"),
                 "--config", str(cfg), "--out-dir", str(out)])
    assert code == 0
    return out


def test_synth_writes_corpus_gold_embeddings(synth_dir):
    assert (synth_dir / "corpus.jsonl").exists()
    assert (synth_dir / "gold.json").exists()
    assert (synth_dir / "embeddings.txt").exists()


def test_ingest_round_trips_and_writes_splits(synth_dir, tmp_path):
    out = tmp_path / "validated.jsonl"
    splits = tmp_path / "splits.json"
    code = main(["ingest", "--in", str(synth_dir / "corpus.jsonl"),
                 "--out", str(out), "--splits-out", str(splits)])
    assert code == 0
    payload = json.loads(splits.read_text())
    assert set(payload) == {"train", "valid", "test"}


def test_annotate_heuristic_then_from_round_trip(synth_dir, tmp_path):
    first = tmp_path / "anns.jsonl"
    code = main(["annotate", "--in", str(synth_dir / "corpus.jsonl"),
                 "--out", str(first), "--heuristic"])
    assert code == 0
    second = tmp_path / "anns2.jsonl"
    code = main(["annotate", "--in", str(synth_dir / "corpus.jsonl"),
                 "--out", str(second), "--from", str(first)])
    assert code == 0
    assert first.read_text() == second.read_text()


def test_build_graphs_all_methods(synth_dir, tmp_path):
    for method in ("init", "textrank", "cooc"):
        out = tmp_path / f"{method}.jsonl"
        code = main(["build-graphs", "--corpus", str(synth_dir / "corpus.jsonl"),
                     "--method", method, "--out", str(out)])
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 12
        entry = json.loads(lines[0])
        assert "doc_id" in entry and "graph" in entry


def test_train_writes_checkpoint_and_report(trained_dir):
    assert (trained_dir / "checkpoint.json").exists()
    report = json.loads((trained_dir / "report.json").read_text())
    assert len(report["epochs"]) == 2


def test_generate_emits_graph_files(synth_dir, trained_dir, tmp_path):
    out = tmp_path / "gen"
    code = main(["generate", "--corpus", str(synth_dir / "corpus.jsonl"),
                 "--embeddings", str(synth_dir / "embeddings.txt"),
                 "--checkpoint", str(trained_dir / "checkpoint.json"),
                 "--out-dir", str(out), "--format", "dot"])
    assert code == 0
    dots = list(out.glob("*.dot"))
    assert len(dots) == 12
    assert dots[0].read_text().startswith("graph G {")
    assert (out / "run_report.json").exists()


def test_evaluate_prints_accuracy(synth_dir, trained_dir, capsys):
    code = main(["evaluate", "--corpus", str(synth_dir / "corpus.jsonl"),
                 "--embeddings", str(synth_dir / "embeddings.txt"),
                 "--checkpoint", str(trained_dir / "checkpoint.json")])
    assert code == 0
    assert "test accuracy" in capsys.readouterr().out


def test_usage_errors_exit_1(capsys):
    assert main(["train"]) == 1
    assert main(["build-graphs", "--corpus", "x", "--method", "bogus",
                 "--out", "y"]) == 1


def test_data_errors_exit_2(tmp_path, capsys):
    missing = tmp_path / "missing.jsonl"
    assert main(["ingest", "--in", str(missing),
                 "--out", str(tmp_path / "o.jsonl")]) == 2
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    assert main(["ingest", "--in", str(empty),
                 "--out", str(tmp_path / "o.jsonl")]) == 2


def test_version_flag():
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
