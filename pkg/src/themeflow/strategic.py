"""Callon centrality/density and the four-quadrant strategic classification.

Index definitions follow the classic co-word-analysis formulation: the
equivalence index e_ij = c_ij^2/(c_i*c_j) normalizes a co-occurrence count
by both occurrence counts; a theme's centrality is 10x the sum of e over
edges leaving the theme, its density 100x the mean internal e per topic.
Thresholds are per-timeframe averages over the retained themes, and "above
average" means strictly greater.
"""

from __future__ import annotations

import logging
import statistics
from dataclasses import dataclass

from .cograph import CooccurrenceNetwork
from .communities import Partition
from .errors import AnalysisError

logger = logging.getLogger(__name__)

QUADRANT_MOTOR = "motor"
QUADRANT_BASIC = "basic"
QUADRANT_NICHE = "niche"
QUADRANT_LOW_LOW = "low-low"  # emerging-or-declining until evolution resolves it


@dataclass
class Theme:
    timeframe_label: str
    theme_id: int
    topics: frozenset[str]
    representative_topic: str
    top_topics: tuple[str, ...]  # every theme topic, heaviest first
    centrality: float
    density: float
    quadrant: str = QUADRANT_LOW_LOW

    @property
    def size(self) -> int:
        return len(self.topics)


def equivalence_index(c_ij: float, c_i: float, c_j: float) -> float:
    """e_ij = c_ij^2 / (c_i * c_j), in [0, 1]."""
    if c_i <= 0 or c_j <= 0:
        raise AnalysisError(f"occurrence counts must be positive, got {c_i}, {c_j}")
    if c_ij < 0 or c_ij > min(c_i, c_j):
        raise AnalysisError(
            f"co-occurrence {c_ij} outside [0, min({c_i}, {c_j})]"
        )
    return (float(c_ij) * float(c_ij)) / (float(c_i) * float(c_j))


def callon_centrality(net: CooccurrenceNetwork, theme_topics: frozenset[str] | set[str]) -> float:
    """10x the equivalence-index mass on edges with exactly one endpoint in
    the theme; an isolated theme scores 0."""
    total = 0.0
    for (a, b) in sorted(net.edge_weight):
        if (a in theme_topics) != (b in theme_topics):
            total += equivalence_index(
                net.edge_weight[(a, b)], net.node_weight[a], net.node_weight[b]
            )
    return 10.0 * total


def callon_density(net: CooccurrenceNetwork, theme_topics: frozenset[str] | set[str]) -> float:
    """100x the internal equivalence-index mass divided by theme size."""
    if not theme_topics:
        raise AnalysisError("density of an empty theme is undefined")
    total = 0.0
    for (a, b) in sorted(net.edge_weight):
        if a in theme_topics and b in theme_topics:
            total += equivalence_index(
                net.edge_weight[(a, b)], net.node_weight[a], net.node_weight[b]
            )
    return 100.0 * total / len(theme_topics)


def classify_quadrant(
    point: tuple[float, float], thresholds: tuple[float, float]
) -> str:
    """Strategic-diagram quadrant for (centrality, density) against the
    timeframe's (centrality threshold, density threshold).  Ties fall to
    the non-above side."""
    centrality, density = point
    c_mean, d_mean = thresholds
    high_c = centrality > c_mean
    high_d = density > d_mean
    if high_c and high_d:
        return QUADRANT_MOTOR
    if high_c:
        return QUADRANT_BASIC
    if high_d:
        return QUADRANT_NICHE
    return QUADRANT_LOW_LOW


def rank_topics(net: CooccurrenceNetwork, topics: frozenset[str] | set[str]) -> tuple[str, ...]:
    """Topics ordered by publication count descending, ties lexicographic."""
    return tuple(sorted(topics, key=lambda t: (-net.node_weight[t], t)))


def build_themes(
    net: CooccurrenceNetwork,
    partition: Partition,
    threshold: str = "mean",
) -> list[Theme]:
    """Assemble classified themes for one timeframe.

    Computes both Callon indices per community, derives the per-timeframe
    thresholds (mean by default, median via threshold="median") and labels
    every theme with its quadrant.
    """
    if threshold not in ("mean", "median"):
        raise AnalysisError(f"unknown threshold mode {threshold!r}")
    communities = partition.communities()
    if not communities:
        return []

    # One pass over the sorted edge list; per-community accumulation order
    # matches the per-theme operations above, so the sums agree bitwise.
    assignment = partition.assignment
    external: dict[int, float] = {cid: 0.0 for cid in communities}
    internal: dict[int, float] = {cid: 0.0 for cid in communities}
    for (a, b) in sorted(net.edge_weight):
        ca = assignment.get(a)
        cb = assignment.get(b)
        e = equivalence_index(
            net.edge_weight[(a, b)], net.node_weight[a], net.node_weight[b]
        )
        if ca is not None and ca == cb:
            internal[ca] += e
        else:
            if ca is not None:
                external[ca] += e
            if cb is not None:
                external[cb] += e

    themes: list[Theme] = []
    for cid in sorted(communities):
        topics = frozenset(communities[cid])
        ordered = rank_topics(net, topics)
        themes.append(
            Theme(
                timeframe_label=net.timeframe_label,
                theme_id=cid,
                topics=topics,
                representative_topic=ordered[0],
                top_topics=ordered,
                centrality=10.0 * external[cid],
                density=100.0 * internal[cid] / len(topics),
            )
        )
    reduce = statistics.mean if threshold == "mean" else statistics.median
    c_thr = reduce([t.centrality for t in themes])
    d_thr = reduce([t.density for t in themes])
    for theme in themes:
        theme.quadrant = classify_quadrant(
            (theme.centrality, theme.density), (c_thr, d_thr)
        )
    logger.info(
        "%s: %d themes, thresholds centrality=%.4f density=%.4f",
        net.timeframe_label, len(themes), c_thr, d_thr,
    )
    return themes
