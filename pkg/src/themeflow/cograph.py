"""Per-timeframe topic co-occurrence network.

Node weight = number of documents mentioning the topic; edge weight =
number of documents mentioning both endpoints.  Set semantics per document:
repeated mentions in one paper count once.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Sequence
from xml.sax.saxutils import quoteattr

from .annotate import AnnotatedDocument

logger = logging.getLogger(__name__)

# Canonical edge key: endpoints sorted lexicographically.
Edge = tuple[str, str]


@dataclass
class CooccurrenceNetwork:
    timeframe_label: str
    doc_count: int
    node_weight: dict[str, int] = field(default_factory=dict)
    edge_weight: dict[Edge, int] = field(default_factory=dict)

    def total_edge_weight(self) -> int:
        return sum(self.edge_weight.values())

    def validate(self) -> None:
        for (a, b), w in self.edge_weight.items():
            assert a < b, f"edge key ({a!r}, {b!r}) not sorted"
            assert a in self.node_weight and b in self.node_weight
            assert w <= min(self.node_weight[a], self.node_weight[b])


def build_network(
    annotations: Sequence[AnnotatedDocument], timeframe_label: str
) -> CooccurrenceNetwork:
    """Count topic and topic-pair document frequencies for one timeframe."""
    node_weight: dict[str, int] = {}
    edge_weight: dict[Edge, int] = {}
    for ann in annotations:
        topics = sorted(ann.topics)
        for t in topics:
            node_weight[t] = node_weight.get(t, 0) + 1
        for pair in itertools.combinations(topics, 2):
            edge_weight[pair] = edge_weight.get(pair, 0) + 1
    return CooccurrenceNetwork(
        timeframe_label=timeframe_label,
        doc_count=len(annotations),
        node_weight=node_weight,
        edge_weight=edge_weight,
    )


def filter_top_topics(net: CooccurrenceNetwork, k: int = 1000) -> CooccurrenceNetwork:
    """Keep the k heaviest topics (ties go to the lexicographically smaller
    id) and every edge between survivors.  doc_count is unchanged."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k >= len(net.node_weight):
        return CooccurrenceNetwork(
            timeframe_label=net.timeframe_label,
            doc_count=net.doc_count,
            node_weight=dict(net.node_weight),
            edge_weight=dict(net.edge_weight),
        )
    ranked = sorted(net.node_weight.items(), key=lambda kv: (-kv[1], kv[0]))
    kept = {topic for topic, _ in ranked[:k]}
    node_weight = {t: w for t, w in net.node_weight.items() if t in kept}
    edge_weight = {
        (a, b): w for (a, b), w in net.edge_weight.items() if a in kept and b in kept
    }
    logger.info(
        "%s: kept top %d of %d topics",
        net.timeframe_label, len(node_weight), len(net.node_weight),
    )
    return CooccurrenceNetwork(
        timeframe_label=net.timeframe_label,
        doc_count=net.doc_count,
        node_weight=node_weight,
        edge_weight=edge_weight,
    )


def write_graphml(net: CooccurrenceNetwork, path: str) -> None:
    """Serialize the network as GraphML with integer weight attributes.

    Nodes and edges are emitted in sorted order so identical networks yield
    identical bytes.
    """
    lines = [
        '<?xml version="1.0" encoding="utf-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
        '  <key id="d0" for="node" attr.name="weight" attr.type="int"/>',
        '  <key id="d1" for="edge" attr.name="weight" attr.type="int"/>',
        '  <graph edgedefault="undirected">',
    ]
    for topic in sorted(net.node_weight):
        lines.append(
            f"    <node id={quoteattr(topic)}>"
            f'<data key="d0">{net.node_weight[topic]}</data></node>'
        )
    for (a, b) in sorted(net.edge_weight):
        lines.append(
            f"    <edge source={quoteattr(a)} target={quoteattr(b)}>"
            f'<data key="d1">{net.edge_weight[(a, b)]}</data></edge>'
        )
    lines.append("  </graph>")
    lines.append("</graphml>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


def write_edge_csv(net: CooccurrenceNetwork, path: str) -> None:
    """Edge list CSV (source,target,weight), one row per unordered pair."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("source,target,weight\n")
        for (a, b) in sorted(net.edge_weight):
            fh.write(f"{_csv_cell(a)},{_csv_cell(b)},{net.edge_weight[(a, b)]}\n")


def _csv_cell(value: str) -> str:
    if any(c in value for c in ',"\n'):
        return '"' + value.replace('"', '""') + '"'
    return value
