"""Concept-graph construction: node extraction, sliding-window links, node
features, and the unsupervised TextRank / phrase co-occurrence builders."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .annotate import AnnotationSet, load_stopwords
from .corpus import EmbeddingTable
from .errors import DataError

log = logging.getLogger(__name__)

DETERMINANTS = {"a", "an", "the"}
_PRONOUN_POS = {"PRON", "PRP", "PRP$", "WP", "WP$"}


@dataclass
class ConceptNode:
    canonical: str
    mentions: list = field(default_factory=list)  # token positions of first tokens
    kind: str = "np"  # np | vp | adj

    @property
    def frequency(self):
        return len(self.mentions)

    @property
    def first_position(self):
        return min(self.mentions)


@dataclass
class ConceptGraph:
    nodes: list = field(default_factory=list)
    edges: dict = field(default_factory=dict)  # (i, j) with i < j -> weight > 0
    directed: bool = False

    def add_edge(self, i, j, w):
        if i == j:
            raise DataError("self-edges are not allowed")
        if w <= 0:
            raise DataError("edge weights must be positive")
        key = (min(i, j), max(i, j))
        self.edges[key] = w

    def weight(self, i, j):
        return self.edges.get((min(i, j), max(i, j)), 0.0)

    def adjacency(self, binary=False) -> np.ndarray:
        n = len(self.nodes)
        m = np.zeros((n, n))
        for (i, j), w in self.edges.items():
            m[i, j] = m[j, i] = 1.0 if binary else w
        return m

    def validate(self):
        seen = set()
        for node in self.nodes:
            if not node.canonical:
                raise DataError("empty node canonical")
            if node.canonical in seen:
                raise DataError(f"duplicate canonical {node.canonical!r}")
            seen.add(node.canonical)
        n = len(self.nodes)
        for (i, j), w in self.edges.items():
            if not (0 <= i < j < n):
                raise DataError(f"bad edge ({i},{j}) in {n}-node graph")
            if w <= 0:
                raise DataError(f"non-positive weight on edge ({i},{j})")
        return self


def _span_canonical(ann: AnnotationSet, span) -> str:
    lemmas = [ann.tokens[k][1].lower() for k in range(span[0], span[1])
              if ann.tokens[k][1].lower() not in DETERMINANTS
              and ann.tokens[k][2] != "PUNCT"]
    return " ".join(lemmas)


def _is_pronoun_span(ann: AnnotationSet, span) -> bool:
    return all(ann.tokens[k][2] in _PRONOUN_POS
               for k in range(span[0], span[1]))


def extract_nodes(ann: AnnotationSet) -> list:
    """Concept candidates: basic NPs first, then leftover verb phrases and
    adjectives.  Determinants are stripped, lemmas merged, coref chains folded
    into the chain's earliest non-pronoun canonical."""
    # map span start -> canonical override from coref chains
    coref_target = {}
    for chain in ann.coref_chains:
        ordered = sorted(chain)
        head = next((sp for sp in ordered if not _is_pronoun_span(ann, sp)), None)
        if head is None:
            continue
        canonical = _span_canonical(ann, head)
        if not canonical:
            continue
        for sp in chain:
            coref_target[sp] = canonical

    by_canonical: dict[str, ConceptNode] = {}
    order: list[str] = []

    def record(span, kind):
        canonical = coref_target.get(span) or _span_canonical(ann, span)
        if not canonical:
            return
        if span in coref_target or not _is_pronoun_span(ann, span):
            node = by_canonical.get(canonical)
            if node is None:
                node = ConceptNode(canonical, [], kind)
                by_canonical[canonical] = node
                order.append(canonical)
            if span[0] not in node.mentions:
                node.mentions.append(span[0])

    for span in ann.noun_phrases:
        record(tuple(span), "np")
    for chain in ann.coref_chains:
        for span in chain:
            record(tuple(span), "np")
    for span in ann.verb_phrases:
        record(tuple(span), "vp")
    for span in ann.adjectives:
        record(tuple(span), "adj")

    nodes = [by_canonical[c] for c in order]
    for node in nodes:
        node.mentions.sort()
    if not nodes:
        log.warning("document %s yielded zero concept candidates", ann.doc_id)
    return nodes


def link_sliding_window(nodes: list, window: int) -> ConceptGraph:
    """Undirected edge between nodes whose mention positions come within the
    window; weight counts the co-occurring mention pairs."""
    if window < 2:
        raise DataError(f"window must be >= 2, got {window}")
    g = ConceptGraph(nodes=list(nodes))
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            count = sum(1 for a in nodes[i].mentions for b in nodes[j].mentions
                        if abs(a - b) < window)
            if count > 0:
                g.add_edge(i, j, float(count))
    return g.validate()


def _minmax(column: np.ndarray) -> np.ndarray:
    lo, hi = column.min(), column.max()
    if hi - lo < 1e-300:
        return np.ones_like(column)
    return (column - lo) / (hi - lo)


def compute_node_features(graph: ConceptGraph, emb: EmbeddingTable,
                          doc_len: int) -> np.ndarray:
    """Rows of [mean word embedding | scaled frequency | scaled location].

    Location is 1 - first_position/doc_len before scaling, so earlier mentions
    score higher.  Constant columns (single-node graphs) collapse to 1.0.
    """
    if not graph.nodes:
        raise DataError("cannot compute features of an empty graph")
    if doc_len <= 0:
        raise DataError("doc_len must be positive")
    embs = np.stack([emb.phrase_embedding(node.canonical.split())
                     for node in graph.nodes])
    freq = np.asarray([float(n.frequency) for n in graph.nodes])
    loc = np.asarray([1.0 - n.first_position / doc_len for n in graph.nodes])
    return np.concatenate(
        [embs, _minmax(freq)[:, None], _minmax(loc)[:, None]], axis=1)


# ---------------------------------------------------------------------------
# unsupervised baselines


def cooccurrence_weight(count: float) -> float:
    """Edge weight 1 - e^(-c) for a co-occurrence count c."""
    return 1.0 - math.exp(-count)


def pagerank_power(adj: np.ndarray, damping: float, tol: float = 1e-8,
                   max_iter: int = 10000) -> np.ndarray:
    """Weighted PageRank: s_i = (1-d) + d * sum_j w_ji / out_j * s_j."""
    n = adj.shape[0]
    out = adj.sum(axis=1)
    scores = np.ones(n)
    trans = np.divide(adj, out[:, None], out=np.zeros_like(adj),
                      where=out[:, None] > 0)
    for _ in range(max_iter):
        new = (1.0 - damping) + damping * trans.T @ scores
        if np.abs(new - scores).sum() < tol:
            return new
        scores = new
    return scores


def pagerank_dense(adj: np.ndarray, damping: float) -> np.ndarray:
    """Brute-force oracle: solve (I - d * T^T) s = (1-d) * 1 directly."""
    n = adj.shape[0]
    out = adj.sum(axis=1)
    trans = np.divide(adj, out[:, None], out=np.zeros_like(adj),
                      where=out[:, None] > 0)
    return np.linalg.solve(np.eye(n) - damping * trans.T,
                           (1.0 - damping) * np.ones(n))


def build_textrank_graph(ann: AnnotationSet, window: int = 5, top_n: int = 10,
                         damping: float = 0.85,
                         stopwords: frozenset = None) -> ConceptGraph:
    """TextRank baseline: word co-occurrence graph, PageRank scores, top-n
    words as nodes, edges weighted 1 - e^(-c) by sentence co-occurrence."""
    if top_n < 1:
        raise DataError("top_n must be >= 1")
    if not 0 < damping < 1:
        raise DataError("damping must lie in (0, 1)")
    if stopwords is None:
        stopwords = load_stopwords()
    eligible = [(i, t[1].lower()) for i, t in enumerate(ann.tokens)
                if t[2] not in ("PUNCT",) and t[1].lower() not in stopwords]
    if not eligible:
        raise DataError(f"no eligible words for TextRank in {ann.doc_id!r}")
    words = sorted({w for _, w in eligible})
    index = {w: k for k, w in enumerate(words)}
    adj = np.zeros((len(words), len(words)))
    for a in range(len(eligible)):
        for b in range(a + 1, len(eligible)):
            pa, wa = eligible[a]
            pb, wb = eligible[b]
            if pb - pa >= window:
                break
            if wa != wb:
                i, j = index[wa], index[wb]
                adj[i, j] += 1.0
                adj[j, i] += 1.0
    scores = pagerank_power(adj, damping)
    ranked = sorted(range(len(words)), key=lambda k: (-scores[k], words[k]))
    keep = ranked[:top_n]

    positions = {}
    for pos, w in eligible:
        positions.setdefault(w, []).append(pos)
    nodes = [ConceptNode(words[k], positions[words[k]]) for k in keep]

    sent_sets = []
    for node in nodes:
        sents = {si for si, (s, e) in enumerate(ann.sentences)
                 if any(s <= p < e for p in node.mentions)}
        sent_sets.append(sents)
    g = ConceptGraph(nodes=nodes)
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            c = len(sent_sets[i] & sent_sets[j])
            if c > 0:
                g.add_edge(i, j, cooccurrence_weight(c))
    return g.validate()


def build_cooccurrence_graph(phrases, ann: AnnotationSet,
                             top_n: int = 10) -> ConceptGraph:
    """Phrase co-occurrence baseline over an externally ranked phrase list
    (best first); falls back to frequency-ranked extracted candidates."""
    if phrases is None:
        candidates = extract_nodes(ann)
        candidates.sort(key=lambda n: (-n.frequency, n.first_position))
        phrases = [n.canonical for n in candidates]
    if top_n > len(phrases):
        log.warning("top_n=%d exceeds %d available phrases; keeping all",
                    top_n, len(phrases))
    kept = list(dict.fromkeys(phrases))[:top_n]

    lemmas = [t[1].lower() for t in ann.tokens]
    nodes = []
    for phrase in kept:
        want = phrase.split()
        mentions = [i for i in range(len(lemmas) - len(want) + 1)
                    if lemmas[i:i + len(want)] == want]
        nodes.append(ConceptNode(phrase, mentions or [0]))

    sent_sets = []
    for node in nodes:
        sents = {si for si, (s, e) in enumerate(ann.sentences)
                 if any(s <= p < e for p in node.mentions)}
        sent_sets.append(sents)
    g = ConceptGraph(nodes=nodes)
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            c = len(sent_sets[i] & sent_sets[j])
            if c > 0:
                g.add_edge(i, j, cooccurrence_weight(c))
    return g.validate()


def build_initial_graph(ann: AnnotationSet, window: int = 5) -> ConceptGraph:
    """Full initial-graph pipeline: extract candidates, link by window."""
    return link_sliding_window(extract_nodes(ann), window)
