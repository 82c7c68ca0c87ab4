"""Deterministic graph serialization: DOT and JSON."""

from __future__ import annotations

import json

from .errors import DataError
from .graphs import ConceptGraph, ConceptNode


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(graph: ConceptGraph) -> str:
    """Undirected DOT block; nodes sorted by canonical, weights to 4 decimals."""
    lines = ["graph G {"]
    order = sorted(range(len(graph.nodes)),
                   key=lambda i: graph.nodes[i].canonical)
    for i in order:
        lines.append(f"  {_quote(graph.nodes[i].canonical)};")
    edge_items = sorted(
        graph.edges.items(),
        key=lambda kv: (graph.nodes[kv[0][0]].canonical,
                        graph.nodes[kv[0][1]].canonical))
    for (i, j), w in edge_items:
        a, b = sorted((graph.nodes[i].canonical, graph.nodes[j].canonical))
        lines.append(f"  {_quote(a)} -- {_quote(b)} [weight={w:.4f}];")
    lines.append("}")
    return "\n".join(lines)


def export_json(graph: ConceptGraph) -> str:
    """Round-trippable JSON with sorted keys and full-precision weights."""
    payload = {
        "nodes": [{"id": i, "canonical": n.canonical, "freq": n.frequency,
                   "first_pos": n.first_position}
                  for i, n in enumerate(graph.nodes)],
        "edges": [{"s": i, "t": j, "w": w}
                  for (i, j), w in sorted(graph.edges.items())],
    }
    return json.dumps(payload, sort_keys=True)


def load_graph_json(text: str) -> ConceptGraph:
    try:
        payload = json.loads(text)
        nodes = []
        for entry in sorted(payload["nodes"], key=lambda e: e["id"]):
            mentions = [entry["first_pos"]] + \
                [entry["first_pos"] + k + 1 for k in range(entry["freq"] - 1)]
            nodes.append(ConceptNode(entry["canonical"], mentions))
        g = ConceptGraph(nodes=nodes)
        for edge in payload["edges"]:
            g.add_edge(edge["s"], edge["t"], edge["w"])
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        raise DataError(f"malformed graph JSON: {e}") from e
    return g.validate()
