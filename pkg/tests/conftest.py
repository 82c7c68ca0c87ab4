import json

import numpy as np
import pytest

from cmapgen.annotate import chunk_heuristic
from cmapgen.corpus import Corpus, Document, EmbeddingTable


@pytest.fixture
def tiny_corpus_file(tmp_path):
    """Seven small documents over two labels, written as JSONL."""
    rows = [
        ("d0", "the moon base and the lunar rover", "sci"),
        ("d1", "a quick brown fox with a lunar rover", "sci"),
        ("d2", "the senate vote and the budget plan", "pol"),
        ("d3", "the budget plan with a senate vote", "pol"),
        ("d4", "the moon base and the budget plan", "sci"),
        ("d5", "a lunar rover and a senate vote", "pol"),
        ("d6", "the quick brown fox and the moon base", "sci"),
    ]
    path = tmp_path / "corpus.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        for doc_id, text, label in rows:
            fh.write(json.dumps({"id": doc_id, "text": text, "label": label}) + "\n")
    return path


@pytest.fixture
def two_word_table():
    table = EmbeddingTable(2)
    table.vectors["cat"] = np.array([1.0, 0.0])
    table.vectors["dog"] = np.array([0.0, 1.0])
    return table


@pytest.fixture
def fox_annotation():
    return chunk_heuristic("The quick brown fox jumps.", "fox")


def make_corpus(texts_labels):
    names = []
    docs = []
    for i, (text, label) in enumerate(texts_labels):
        if label not in names:
            names.append(label)
        docs.append(Document(f"d{i}", text, names.index(label)))
    return Corpus(tuple(docs), tuple(names))
