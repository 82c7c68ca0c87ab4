"""Node extraction, sliding-window linking, features, and the unsupervised
graph builders with their PageRank oracle."""

import numpy as np
import pytest

from cmapgen.annotate import AnnotationSet, chunk_heuristic
from cmapgen.corpus import EmbeddingTable
from cmapgen.errors import DataError
from cmapgen.graphs import (ConceptGraph, ConceptNode, build_cooccurrence_graph,
                            build_initial_graph, build_textrank_graph,
                            compute_node_features, cooccurrence_weight,
                            extract_nodes, link_sliding_window, pagerank_dense,
                            pagerank_power)


def simple_ann(tokens, **groups):
    """tokens: list of (surface, lemma, pos) triples."""
    return AnnotationSet("t", tokens=tokens,
                         sentences=[(0, len(tokens))], **groups).validate()


def test_determinants_stripped_from_canonical():
    ann = simple_ann([("the", "the", "DET"), ("moon", "moon", "NOUN"),
                      ("surface", "surface", "NOUN")],
                     noun_phrases=[(0, 3)])
    nodes = extract_nodes(ann)
    assert [n.canonical for n in nodes] == ["moon surface"]


def test_lemma_variants_merge_into_one_node():
    ann = simple_ann([("landings", "landing", "NOUN"), ("and", "and", "CONJ"),
                      ("landing", "landing", "NOUN")],
                     noun_phrases=[(0, 1), (2, 3)])
    nodes = extract_nodes(ann)
    assert len(nodes) == 1
    assert nodes[0].frequency == 2
    assert nodes[0].mentions == [0, 2]


def test_coref_chain_merges_to_nonpronoun_canonical():
    tokens = [("Haimovitz", "haimovitz", "NOUN"), ("plays", "play", "VERB"),
              ("he", "he", "PRON"), ("smiles", "smile", "VERB")]
    ann = simple_ann(tokens, noun_phrases=[(0, 1)],
                     coref_chains=[[(0, 1), (2, 3)]])
    nodes = extract_nodes(ann)
    names = [n.canonical for n in nodes]
    assert "haimovitz" in names
    node = nodes[names.index("haimovitz")]
    assert node.mentions == [0, 2]


def test_unresolved_pronouns_are_dropped():
    tokens = [("he", "he", "PRON"), ("runs", "run", "VERB")]
    ann = simple_ann(tokens, noun_phrases=[(0, 1)], verb_phrases=[(1, 2)])
    nodes = extract_nodes(ann)
    assert [n.canonical for n in nodes] == ["run"]


def test_sliding_window_edges():
    near = [ConceptNode("a", [0]), ConceptNode("b", [3])]
    g = link_sliding_window(near, 5)
    assert g.weight(0, 1) == 1.0

    far = [ConceptNode("a", [0]), ConceptNode("b", [10])]
    assert link_sliding_window(far, 5).edges == {}


def test_sliding_window_counts_mention_pairs():
    nodes = [ConceptNode("a", [0, 6]), ConceptNode("b", [3, 8])]
    g = link_sliding_window(nodes, 5)
    # qualifying pairs: |0-3|, |6-3|, |6-8|
    assert g.weight(0, 1) == 3.0


def test_sliding_window_rejects_tiny_window():
    with pytest.raises(DataError):
        link_sliding_window([ConceptNode("a", [0])], 1)


def test_graph_rejects_duplicate_canonicals_and_self_edges():
    g = ConceptGraph(nodes=[ConceptNode("a", [0]), ConceptNode("a", [1])])
    with pytest.raises(DataError):
        g.validate()
    g2 = ConceptGraph(nodes=[ConceptNode("a", [0])])
    with pytest.raises(DataError):
        g2.add_edge(0, 0, 1.0)


def test_feature_minmax_scaling(two_word_table):
    nodes = [ConceptNode("cat", [0]), ConceptNode("dog", [2, 4, 6]),
             ConceptNode("cat dog", [1, 3, 5, 7, 9])]
    g = ConceptGraph(nodes=nodes)
    feats = compute_node_features(g, two_word_table, 10)
    np.testing.assert_allclose(feats[:, 2], [0.0, 0.5, 1.0])  # freq {1,3,5}
    np.testing.assert_allclose(feats[2, :2], [0.5, 0.5])      # phrase mean


def test_single_node_features_collapse_to_one(two_word_table):
    g = ConceptGraph(nodes=[ConceptNode("cat", [4])])
    feats = compute_node_features(g, two_word_table, 10)
    assert feats[0, 2] == 1.0 and feats[0, 3] == 1.0


def test_location_feature_prefers_early_mentions():
    table = EmbeddingTable(1)
    g = ConceptGraph(nodes=[ConceptNode("a", [0]), ConceptNode("b", [9])])
    feats = compute_node_features(g, table, 10)
    # columns: [embedding, freq, location]; earlier mention scales to 1
    np.testing.assert_allclose(feats[:, 2], [1.0, 0.0])


def test_cooccurrence_weight_closed_forms():
    assert cooccurrence_weight(1) == pytest.approx(0.632121, abs=1e-6)
    assert cooccurrence_weight(2) == pytest.approx(0.864665, abs=1e-6)


def test_pagerank_symmetric_pair_has_equal_scores():
    adj = np.array([[0.0, 1.0], [1.0, 0.0]])
    scores = pagerank_power(adj, 0.85)
    assert scores[0] == pytest.approx(scores[1], abs=1e-10)


def test_pagerank_power_matches_dense_oracle():
    rng = np.random.default_rng(2)
    for n in (3, 7, 12, 20):
        m = rng.random((n, n)) * (rng.random((n, n)) < 0.4)
        adj = np.triu(m, 1)
        adj = adj + adj.T
        power = pagerank_power(adj, 0.85)
        dense = pagerank_dense(adj, 0.85)
        np.testing.assert_allclose(power, dense, atol=1e-6)


def test_textrank_graph_is_deterministic_and_bounded():
    text = ("the moon base hosts the lunar rover. the rover maps the moon "
            "surface. the base crew repairs the rover.")
    ann = chunk_heuristic(text, "d")
    g1 = build_textrank_graph(ann, window=5, top_n=5)
    g2 = build_textrank_graph(ann, window=5, top_n=5)
    assert len(g1.nodes) <= 5
    assert [n.canonical for n in g1.nodes] == [n.canonical for n in g2.nodes]
    assert g1.edges == g2.edges
    for w in g1.edges.values():
        assert 0.0 < w < 1.0  # 1 - e^(-c) stays below 1


def test_cooccurrence_graph_disconnects_separated_phrases():
    ann = chunk_heuristic("the moon base. the senate vote.", "d")
    g = build_cooccurrence_graph(["moon base", "senate vote"], ann, top_n=5)
    assert len(g.nodes) == 2
    assert g.edges == {}


def test_initial_graph_end_to_end():
    ann = chunk_heuristic("the moon base and the lunar rover near the moon base",
                          "d")
    g = build_initial_graph(ann, window=5)
    names = [n.canonical for n in g.nodes]
    assert "moon base" in names and "lunar rover" in names
    assert g.edges  # nearby phrases link up
