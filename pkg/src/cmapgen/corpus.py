"""Corpus, split, and word-embedding loading.

File formats: JSON-lines corpora ({"id","text","label"} per line), GloVe-style
plain-text embeddings, JSON split files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    label: int


@dataclass(frozen=True)
class Corpus:
    documents: tuple
    class_names: tuple

    @property
    def num_classes(self):
        return len(self.class_names)

    def __len__(self):
        return len(self.documents)


@dataclass(frozen=True)
class Splits:
    train: tuple
    valid: tuple
    test: tuple

    def to_json(self):
        return json.dumps({"train": list(self.train), "valid": list(self.valid),
                           "test": list(self.test)})

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        return cls(tuple(d["train"]), tuple(d["valid"]), tuple(d["test"]))


def load_corpus(path) -> Corpus:
    """Parse a JSON-lines corpus; class indices follow first-seen label order."""
    docs = []
    class_names = []
    label_index = {}
    seen_ids = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                doc_id, text, label = obj["id"], obj["text"], obj["label"]
            except (json.JSONDecodeError, KeyError, TypeError) as e:
                raise DataError(f"malformed corpus line {lineno}: {e}") from e
            if not isinstance(text, str) or not text.strip():
                raise DataError(f"empty text at line {lineno} (doc {doc_id!r})")
            if doc_id in seen_ids:
                raise DataError(f"duplicate document id {doc_id!r} at line {lineno}")
            seen_ids.add(doc_id)
            if label not in label_index:
                label_index[label] = len(class_names)
                class_names.append(str(label))
            docs.append(Document(str(doc_id), text, label_index[label]))
    if not docs:
        raise DataError(f"empty corpus: {path}")
    return Corpus(tuple(docs), tuple(class_names))


def save_corpus(corpus: Corpus, path):
    with open(path, "w", encoding="utf-8") as fh:
        for doc in corpus.documents:
            fh.write(json.dumps({"id": doc.id, "text": doc.text,
                                 "label": corpus.class_names[doc.label]}) + "\n")


def split_corpus(corpus: Corpus, ratios, seed: int) -> Splits:
    """Seeded shuffle then partition.  Valid/test sizes are floored but never
    drop below one document; train absorbs the remainder."""
    r_train, r_valid, r_test = ratios
    if min(ratios) <= 0 or abs(sum(ratios) - 1.0) > 1e-9:
        raise DataError(f"ratios must be positive and sum to 1, got {ratios}")
    n = len(corpus)
    if n < 3:
        raise DataError(f"corpus of {n} docs cannot fill three nonzero splits")
    idx = list(range(n))
    np.random.default_rng(seed).shuffle(idx)
    n_valid = max(1, int(n * r_valid))
    n_test = max(1, int(n * r_test))
    n_train = n - n_valid - n_test
    return Splits(tuple(idx[:n_train]),
                  tuple(idx[n_train:n_train + n_valid]),
                  tuple(idx[n_train + n_valid:]))


@dataclass
class EmbeddingTable:
    dim: int
    vectors: dict = field(default_factory=dict)
    duplicate_count: int = 0

    def lookup(self, word: str) -> np.ndarray:
        """Never fails: unknown words map to the all-zero OOV vector."""
        v = self.vectors.get(word)
        return v if v is not None else np.zeros(self.dim)

    def phrase_embedding(self, words) -> np.ndarray:
        words = list(words)
        if not words:
            return np.zeros(self.dim)
        return np.mean([self.lookup(w) for w in words], axis=0)


def load_embeddings(path, dim: int) -> EmbeddingTable:
    """GloVe-style text: word then `dim` decimals per line; duplicate words
    last-wins with a counter."""
    table = EmbeddingTable(dim)
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.rstrip("\n").split()
            if not parts:
                continue
            word, vals = parts[0], parts[1:]
            if len(vals) != dim:
                raise DataError(
                    f"embedding row for {word!r} has {len(vals)} values, want {dim}")
            if word in table.vectors:
                table.duplicate_count += 1
            table.vectors[word] = np.asarray([float(v) for v in vals])
    return table


def save_embeddings(table: EmbeddingTable, path):
    with open(path, "w", encoding="utf-8") as fh:
        for word, vec in table.vectors.items():
            fh.write(word + " " + " ".join(f"{v:.6f}" for v in vec) + "\n")
