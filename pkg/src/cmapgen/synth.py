"""Seeded synthetic corpus with planted class-exclusive signature phrases.

Provides the desk-scale oracle: every document carries at least one contiguous
multi-word signature of its class, drowned in shared background words and
distractor phrases.  Function words between units keep the heuristic chunker
from gluing neighbouring noun runs together.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .annotate import lemmatize
from .corpus import Corpus, Document, EmbeddingTable
from .errors import DataError

# letters avoiding 's'/'e' endings so the rule lemmatizer leaves words alone
_SUFFIX = "abcdfghk"
_FILLERS = [["is"], ["of", "the"], ["and"], ["with"], ["in", "the"]]


@dataclass
class SynthSpec:
    num_classes: int = 2
    docs_per_class: int = 50
    doc_len: int = 60
    signatures_per_class: int = 2
    signature_len: int = 2
    background_vocab: int = 40
    num_distractors: int = 6
    embedding_dim: int = 32
    doc_len_jitter: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.num_classes < 2 or self.docs_per_class < 1:
            raise DataError("need >= 2 classes and >= 1 doc per class")
        if not 0 <= self.doc_len_jitter < self.doc_len:
            raise DataError("doc_len_jitter must be in [0, doc_len)")
        if self.doc_len - self.doc_len_jitter < 3 * self.signature_len:
            raise DataError("doc_len must be >= 3x the signature length")

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))


def _signatures(spec: SynthSpec):
    sigs = {}
    for c in range(spec.num_classes):
        sigs[c] = [" ".join(f"sig{c}{k}{_SUFFIX[w % len(_SUFFIX)]}{w // len(_SUFFIX)}"
                            for w in range(spec.signature_len))
                   for k in range(spec.signatures_per_class)]
    return sigs


def generate_synthetic(spec: SynthSpec):
    """Build (Corpus, doc_id -> planted signature, EmbeddingTable).

    Pure function of its arguments; identical settings yield identical corpora.
    """
    rng = np.random.default_rng(spec.seed)
    signatures = _signatures(spec)
    flat_sigs = [s for c in signatures.values() for s in c]
    if len(set(flat_sigs)) != len(flat_sigs):
        raise DataError("signature sets must be pairwise disjoint")
    background = [f"bkg{_SUFFIX[i % len(_SUFFIX)]}{i}"
                  for i in range(spec.background_vocab)]
    distractors = [" ".join(f"dst{d}{_SUFFIX[w]}" for w in range(spec.signature_len))
                   for d in range(spec.num_distractors)]

    docs = []
    gold = {}
    for c in range(spec.num_classes):
        for d in range(spec.docs_per_class):
            doc_id = f"c{c}d{d}"
            signature = signatures[c][int(rng.integers(spec.signatures_per_class))]
            target_len = spec.doc_len
            if spec.doc_len_jitter:
                target_len += int(rng.integers(-spec.doc_len_jitter,
                                               spec.doc_len_jitter + 1))
            units = [signature.split()]
            tokens = spec.signature_len
            while tokens < target_len:
                roll = rng.random()
                if roll < 0.25:
                    unit = distractors[int(rng.integers(len(distractors)))].split()
                elif roll < 0.35:
                    unit = signature.split()
                else:
                    unit = [background[int(rng.integers(len(background)))]]
                units.append(unit)
                tokens += len(unit)
            order = rng.permutation(len(units))
            pieces = []
            for ui in order:
                pieces.extend(units[ui])
                filler = _FILLERS[int(rng.integers(len(_FILLERS)))]
                pieces.extend(filler)
                if rng.random() < 0.2:
                    pieces.append(".")
            text = " ".join(pieces).replace(" .", ".")
            docs.append(Document(doc_id, text, c))
            gold[doc_id] = signature

    corpus = Corpus(tuple(docs),
                    tuple(f"class{c}" for c in range(spec.num_classes)))
    emb = _synthetic_embeddings(spec, background, distractors, flat_sigs)
    return corpus, gold, emb


def _synthetic_embeddings(spec, background, distractors, flat_sigs):
    """Random unit vectors per word; seeded separately from text generation so
    the table only depends on the vocabulary."""
    rng = np.random.default_rng(spec.seed + 104729)
    table = EmbeddingTable(spec.embedding_dim)
    vocab = list(background)
    for phrase in distractors + flat_sigs:
        vocab.extend(phrase.split())
    for extra in ("is", "of", "the", "and", "with", "in"):
        vocab.append(extra)
    for word in vocab:
        v = rng.normal(size=spec.embedding_dim)
        table.vectors[lemmatize(word)] = v / np.linalg.norm(v)
    return table


def planted_concept_recall(generated: dict, gold: dict) -> float:
    """Fraction of documents whose graph has a node covering the planted
    signature (token-subset match after lemmatization)."""
    if set(generated) != set(gold):
        raise DataError("generated and gold key sets differ")
    if not gold:
        raise DataError("empty gold map")
    hits = 0
    for doc_id, signature in gold.items():
        want = {lemmatize(w) for w in signature.split()}
        graph = generated[doc_id]
        if any(want <= set(node.canonical.split()) for node in graph.nodes):
            hits += 1
    return hits / len(gold)
