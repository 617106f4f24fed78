"""Thematic evolution: mapping themes across consecutive timeframes and
assembling recurrence-filtered trajectories.

Two themes in consecutive periods map when their top-3 topic sets are
identical, or when the sets share exactly two topics and each unmatched
topic appears in the other theme's top-5 (checked in both directions).
Trajectories follow the best mapping edge at every step, itineraries are
disjoint, and runs shorter than the recurrence minimum are discarded.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

from .strategic import QUADRANT_LOW_LOW, Theme

logger = logging.getLogger(__name__)

RULE_EXACT = "exact-top3"
RULE_ONE_MISMATCH = "one-mismatch-top5"

EMERGING = "emerging"
DECLINING = "declining"


@dataclass(frozen=True)
class MappingEdge:
    from_timeframe: str
    from_theme: int
    to_timeframe: str
    to_theme: int
    rule: str
    overlap_score: float  # Jaccard of the two top-5 sets


@dataclass
class ThemeTrajectory:
    label: str  # representative topic of the earliest theme
    themes: list[Theme]

    @property
    def steps(self) -> list[tuple[str, str]]:
        return [(t.timeframe_label, t.quadrant) for t in self.themes]


def top_k_topics(theme: Theme, k: int) -> list[str]:
    """First min(k, size) topics by publication count, ties lexicographic.
    Theme.top_topics already carries the full ordering."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return list(theme.top_topics[:k])


def _jaccard(a: set[str], b: set[str]) -> float:
    union = a | b
    if not union:
        return 0.0
    return len(a & b) / len(union)


def map_themes(earlier: Sequence[Theme], later: Sequence[Theme]) -> list[MappingEdge]:
    """All qualifying mapping edges between two consecutive timeframes.

    Many-to-many edges are allowed; exact-top3 takes precedence when both
    rules would fire (possible for themes with fewer than three topics).
    """
    edges: list[MappingEdge] = []
    for t1 in earlier:
        top3_1 = set(top_k_topics(t1, 3))
        top5_1 = set(top_k_topics(t1, 5))
        for t2 in later:
            top3_2 = set(top_k_topics(t2, 3))
            top5_2 = set(top_k_topics(t2, 5))
            rule = None
            if top3_1 == top3_2:
                rule = RULE_EXACT
            elif len(top3_1 & top3_2) == 2:
                unmatched_1 = top3_1 - top3_2
                unmatched_2 = top3_2 - top3_1
                if unmatched_1 <= top5_2 and unmatched_2 <= top5_1:
                    rule = RULE_ONE_MISMATCH
            if rule is not None:
                edges.append(
                    MappingEdge(
                        from_timeframe=t1.timeframe_label,
                        from_theme=t1.theme_id,
                        to_timeframe=t2.timeframe_label,
                        to_theme=t2.theme_id,
                        rule=rule,
                        overlap_score=_jaccard(top5_1, top5_2),
                    )
                )
    return edges


def build_trajectories(
    edges: Sequence[MappingEdge],
    themes_by_timeframe: dict[str, list[Theme]],
    timeframe_order: Sequence[str],
    min_run: int = 3,
) -> list[ThemeTrajectory]:
    """Chain themes along their best mapping edges into disjoint trajectories.

    Starting from the earliest unclaimed theme (themes scanned in timeframe
    order, then by representative topic), each chain follows the outgoing
    edge with the highest overlap score, breaking ties toward the successor
    with the lexicographically smallest representative topic.  Claims are
    permanent, so every theme appears in at most one trajectory.  Chains
    spanning fewer than min_run consecutive timeframes are dropped.
    """
    if min_run < 1:
        raise ValueError("min_run must be >= 1")
    theme_lookup: dict[tuple[str, int], Theme] = {}
    for label, themes in themes_by_timeframe.items():
        for theme in themes:
            theme_lookup[(label, theme.theme_id)] = theme

    out_edges: dict[tuple[str, int], list[MappingEdge]] = {}
    for edge in edges:
        out_edges.setdefault((edge.from_timeframe, edge.from_theme), []).append(edge)

    next_frame = {
        label: timeframe_order[i + 1] if i + 1 < len(timeframe_order) else None
        for i, label in enumerate(timeframe_order)
    }

    claimed: set[tuple[str, int]] = set()
    trajectories: list[ThemeTrajectory] = []
    for label in timeframe_order:
        themes = sorted(
            themes_by_timeframe.get(label, []), key=lambda t: t.representative_topic
        )
        for start in themes:
            key = (label, start.theme_id)
            if key in claimed:
                continue
            chain = [start]
            claimed.add(key)
            current = key
            while True:
                following = next_frame[current[0]]
                if following is None:
                    break
                candidates = [
                    e
                    for e in out_edges.get(current, [])
                    if e.to_timeframe == following
                    and (e.to_timeframe, e.to_theme) not in claimed
                ]
                if not candidates:
                    break
                best = min(
                    candidates,
                    key=lambda e: (
                        -e.overlap_score,
                        theme_lookup[(e.to_timeframe, e.to_theme)].representative_topic,
                    ),
                )
                current = (best.to_timeframe, best.to_theme)
                claimed.add(current)
                chain.append(theme_lookup[current])
            if len(chain) >= min_run:
                trajectories.append(
                    ThemeTrajectory(label=chain[0].representative_topic, themes=chain)
                )
    logger.info(
        "evolution: %d trajectories span >= %d consecutive timeframes",
        len(trajectories), min_run,
    )
    return trajectories


def resolve_emerging_declining(traj: ThemeTrajectory) -> list[str]:
    """Resolve low-low steps into emerging or declining.

    A low-low first step means the theme is emerging; a later low-low step
    means decline.  A trajectory that is low-low throughout earns its
    emerging start only when centrality+density never decreases step over
    step; otherwise every step is declining.
    """
    quadrants = [t.quadrant for t in traj.themes]
    all_low = all(q == QUADRANT_LOW_LOW for q in quadrants)
    if all_low:
        signal = [t.centrality + t.density for t in traj.themes]
        non_decreasing = all(b >= a for a, b in zip(signal, signal[1:]))
        first = EMERGING if non_decreasing else DECLINING
        return [first] + [DECLINING] * (len(quadrants) - 1)
    resolved: list[str] = []
    for i, q in enumerate(quadrants):
        if q != QUADRANT_LOW_LOW:
            resolved.append(q)
        elif i == 0:
            resolved.append(EMERGING)
        else:
            resolved.append(DECLINING)
    return resolved
