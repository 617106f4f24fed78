"""Conceptual themes as Louvain communities of the co-occurrence network.

The local-move/aggregation kernel lives in a compiled extension
(_louvain_cy) with a pure-Python twin (_louvain_py); whichever imports is
used, and THEMEFLOW_KERNEL=python forces the fallback.  Both produce
identical partitions for identical (network, seed): the visit order is a
seed-keyed deterministic shuffle of the lexicographically sorted topic ids,
ties in modularity gain resolve to the lowest community id, and a node only
moves on strict improvement.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from typing import Sequence

from .annotate import AnnotatedDocument
from .cograph import CooccurrenceNetwork
from .errors import AnalysisError, ModularityUndefinedError

logger = logging.getLogger(__name__)

if os.environ.get("THEMEFLOW_KERNEL", "").lower() == "python":
    from . import _louvain_py as _kernel
else:
    try:
        from . import _louvain_cy as _kernel  # type: ignore[attr-defined]
    except ImportError:  # extension not built on this platform
        from . import _louvain_py as _kernel

KERNEL_BACKEND: str = _kernel.BACKEND

_MASK64 = (1 << 64) - 1


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def seeded_shuffle(items: Sequence, seed: int) -> list:
    """Fisher-Yates with a splitmix64 stream; identical on every platform."""
    arr = list(items)
    state = seed & _MASK64
    for i in range(len(arr) - 1, 0, -1):
        state, r = _splitmix64(state)
        j = r % (i + 1)
        arr[i], arr[j] = arr[j], arr[i]
    return arr


@dataclass(frozen=True)
class Partition:
    """Topic -> community assignment with dense community ids from 0."""

    assignment: dict[str, int]

    @property
    def n_communities(self) -> int:
        return len(set(self.assignment.values()))

    def communities(self) -> dict[int, set[str]]:
        out: dict[int, set[str]] = {}
        for topic, cid in self.assignment.items():
            out.setdefault(cid, set()).add(topic)
        return out

    def validate(self) -> None:
        ids = set(self.assignment.values())
        if self.assignment:
            assert ids == set(range(len(ids))), f"community ids not dense: {sorted(ids)}"


def _relabel_dense(nodes: Sequence[str], membership: Sequence[int]) -> dict[str, int]:
    """Renumber raw kernel labels by first appearance in lexicographic
    topic order, giving contiguous ids 0..C-1."""
    remap: dict[int, int] = {}
    assignment: dict[str, int] = {}
    for node, raw in zip(nodes, membership):
        if raw not in remap:
            remap[raw] = len(remap)
        assignment[node] = remap[raw]
    return assignment


def modularity(net: CooccurrenceNetwork, partition: Partition) -> float:
    """Weighted Newman modularity of a partition of the network.

    Q = (1/2m) * sum_ij [A_ij - k_i*k_j/(2m)] * delta(c_i, c_j); raises
    ModularityUndefinedError when the network has zero total edge weight.
    """
    missing = set(net.node_weight) - set(partition.assignment)
    if missing:
        raise AnalysisError(
            f"partition does not cover {len(missing)} network topics"
        )
    total = float(net.total_edge_weight())
    if total <= 0.0:
        raise ModularityUndefinedError(
            f"{net.timeframe_label!r}: zero total edge weight"
        )
    m = total
    deg: dict[str, float] = {t: 0.0 for t in net.node_weight}
    intra: dict[int, float] = {}
    for (a, b), w in net.edge_weight.items():
        deg[a] += w
        deg[b] += w
        ca, cb = partition.assignment[a], partition.assignment[b]
        if ca == cb:
            intra[ca] = intra.get(ca, 0.0) + w
    deg_sum: dict[int, float] = {}
    for topic in sorted(deg):
        c = partition.assignment[topic]
        deg_sum[c] = deg_sum.get(c, 0.0) + deg[topic]
    q = 0.0
    for c in sorted(deg_sum):
        share = deg_sum[c] / (2.0 * m)
        q += intra.get(c, 0.0) / m - share * share
    return q


def _restart_seed(seed: int, restart: int) -> int:
    if restart == 0:
        return seed  # the documented seed-keyed visit order
    _, out = _splitmix64((seed + restart) & _MASK64)
    return out


def louvain(
    net: CooccurrenceNetwork,
    seed: int = 42,
    cluster_weights: str = "raw",
    check_invariants: bool = False,
    restarts: int = 10,
) -> Partition:
    """Detect communities by two-phase modularity maximization.

    The two-phase kernel runs `restarts` times with visit orders derived
    deterministically from the seed (restart 0 is the plain seed-keyed
    shuffle of the sorted topic ids) and the best-modularity result wins,
    ties going to the earliest restart.  Greedy single runs can strand a
    small satellite inside a hub community on adversarial weighted graphs;
    the restarts close those local-optimum gaps while keeping the output a
    pure function of (network, seed).

    cluster_weights selects the clustering substrate: "raw" co-publication
    counts (default) or "equivalence" association strengths
    c_ij^2/(c_i*c_j).  A zero-edge network degenerates to singleton
    communities with a warning; an empty network is an error.
    """
    nodes = sorted(net.node_weight)
    if not nodes:
        raise AnalysisError(f"{net.timeframe_label!r}: empty network")
    if cluster_weights not in ("raw", "equivalence"):
        raise AnalysisError(f"unknown cluster_weights mode {cluster_weights!r}")

    if net.total_edge_weight() <= 0:
        logger.warning(
            "%s: network has no edges; every topic becomes its own community",
            net.timeframe_label,
        )
        return Partition(assignment={t: i for i, t in enumerate(nodes)})

    index = {t: i for i, t in enumerate(nodes)}
    neighbors: list[list[tuple[int, float]]] = [[] for _ in nodes]
    for (a, b), w in sorted(net.edge_weight.items()):
        if w <= 0:
            continue
        if cluster_weights == "equivalence":
            weight = (float(w) * float(w)) / (
                float(net.node_weight[a]) * float(net.node_weight[b])
            )
        else:
            weight = float(w)
        ia, ib = index[a], index[b]
        neighbors[ia].append((ib, weight))
        neighbors[ib].append((ia, weight))

    xadj = [0] * (len(nodes) + 1)
    adjncy: list[int] = []
    adjwgt: list[float] = []
    for i, row in enumerate(neighbors):
        for j, w in row:
            adjncy.append(j)
            adjwgt.append(w)
        xadj[i + 1] = len(adjncy)

    if restarts < 1:
        raise AnalysisError("restarts must be >= 1")
    best = None
    for restart in range(restarts):
        order = seeded_shuffle(range(len(nodes)), _restart_seed(seed, restart))
        membership, q, levels = _kernel.louvain_kernel(
            len(nodes), xadj, adjncy, adjwgt, order, check_invariants
        )
        if best is None or q > best[0]:
            best = (q, membership, levels, restart)
    q, membership, levels, restart = best
    logger.info(
        "%s: louvain (%s backend) found %d communities, Q=%.4f, "
        "%d levels, restart %d of %d",
        net.timeframe_label, KERNEL_BACKEND, len(set(membership)), q,
        levels, restart, restarts,
    )
    return Partition(assignment=_relabel_dense(nodes, membership))


def filter_min_cluster_frequency(
    net: CooccurrenceNetwork,
    partition: Partition,
    annotations: Sequence[AnnotatedDocument],
    min_per_thousand: float = 5.0,
) -> Partition:
    """Drop clusters covering too few documents.

    A cluster is retained iff the number of distinct documents mentioning at
    least one of its topics, per 1000 timeframe documents, reaches
    min_per_thousand.  Survivors are renumbered densely in ascending
    original id order.
    """
    if min_per_thousand < 0:
        raise AnalysisError("min_per_thousand must be >= 0")
    communities = partition.communities()
    if not communities:
        return Partition(assignment={})
    doc_count = net.doc_count
    docs_with: dict[int, int] = {cid: 0 for cid in communities}
    topic_to_cid = partition.assignment
    for ann in annotations:
        hit: set[int] = set()
        for topic in ann.topics:
            cid = topic_to_cid.get(topic)
            if cid is not None:
                hit.add(cid)
        for cid in hit:
            docs_with[cid] += 1

    retained: list[int] = []
    dropped: list[int] = []
    for cid in sorted(communities):
        per_thousand = (
            docs_with[cid] * 1000.0 / doc_count if doc_count > 0 else 0.0
        )
        if per_thousand >= min_per_thousand:
            retained.append(cid)
        else:
            dropped.append(cid)

    if dropped:
        logger.info(
            "%s: dropped %d of %d clusters below %.3g docs/1000 (%s)",
            net.timeframe_label, len(dropped), len(communities),
            min_per_thousand,
            ", ".join(f"c{cid}:{docs_with[cid]}docs" for cid in dropped),
        )
    if not retained:
        logger.warning(
            "%s: degenerate timeframe, every cluster fell below the "
            "frequency threshold", net.timeframe_label,
        )
    remap = {cid: i for i, cid in enumerate(retained)}
    assignment = {
        topic: remap[cid]
        for topic, cid in partition.assignment.items()
        if cid in remap
    }
    return Partition(assignment=assignment)
