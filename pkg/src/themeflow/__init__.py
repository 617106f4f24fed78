"""themeflow: conceptual themes and their evolution in scholarly corpora.

Builds per-timeframe topic co-occurrence networks from annotated documents,
detects themes with deterministic Louvain clustering, places them on a
centrality/density strategic diagram, and maps them across timeframes into
evolution trajectories.
"""

__version__ = "0.1.0"
