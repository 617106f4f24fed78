"""Shared fixtures and independent oracles.

The brute-force helpers here deliberately avoid the package's own graph
code: modularity is evaluated from the dense double-sum formula and optimal
partitions come from exhaustive enumeration of set partitions, so they can
stand as independent checks on the Louvain implementation.
"""

from __future__ import annotations

import itertools
import random

import pytest

from themeflow.cograph import CooccurrenceNetwork


def make_network(
    edge_weight: dict[tuple[str, str], int],
    node_weight: dict[str, int] | None = None,
    label: str = "test",
    doc_count: int = 100,
) -> CooccurrenceNetwork:
    edges = {}
    for (a, b), w in edge_weight.items():
        a, b = sorted((a, b))
        edges[(a, b)] = w
    if node_weight is None:
        node_weight = {}
        for (a, b), w in edges.items():
            node_weight[a] = node_weight.get(a, 0) + w
            node_weight[b] = node_weight.get(b, 0) + w
    return CooccurrenceNetwork(
        timeframe_label=label,
        doc_count=doc_count,
        node_weight=dict(node_weight),
        edge_weight=edges,
    )


@pytest.fixture
def bridged_triangles() -> CooccurrenceNetwork:
    """Two unit-weight triangles joined by one bridge edge c-d."""
    return make_network(
        {
            ("a", "b"): 1, ("a", "c"): 1, ("b", "c"): 1,
            ("d", "e"): 1, ("d", "f"): 1, ("e", "f"): 1,
            ("c", "d"): 1,
        }
    )


@pytest.fixture
def disjoint_triangles() -> CooccurrenceNetwork:
    return make_network(
        {
            ("a", "b"): 1, ("a", "c"): 1, ("b", "c"): 1,
            ("d", "e"): 1, ("d", "f"): 1, ("e", "f"): 1,
        }
    )


@pytest.fixture
def k4() -> CooccurrenceNetwork:
    return make_network(
        {(a, b): 1 for a, b in itertools.combinations("abcd", 2)}
    )


@pytest.fixture
def callon_fixture() -> CooccurrenceNetwork:
    """The 5-topic fixture: counts A=4,B=4,C=2,D=3,E=3; edges AB=2, AC=1,
    BC=1, DE=2, CD=1.  Themes {A,B,C} and {D,E}."""
    return make_network(
        {("A", "B"): 2, ("A", "C"): 1, ("B", "C"): 1, ("D", "E"): 2, ("C", "D"): 1},
        node_weight={"A": 4, "B": 4, "C": 2, "D": 3, "E": 3},
        doc_count=10,
    )


# ---------------------------------------------------------------------------
# independent modularity oracle


def modularity_bruteforce(
    net: CooccurrenceNetwork, membership: dict[str, int]
) -> float:
    """Dense double-sum modularity, written from the definition."""
    nodes = sorted(net.node_weight)
    adj = {a: {b: 0.0 for b in nodes} for a in nodes}
    for (a, b), w in net.edge_weight.items():
        adj[a][b] += w
        adj[b][a] += w
    two_m = sum(adj[a][b] for a in nodes for b in nodes)
    degree = {a: sum(adj[a].values()) for a in nodes}
    q = 0.0
    for a in nodes:
        for b in nodes:
            if membership[a] == membership[b]:
                q += adj[a][b] - degree[a] * degree[b] / two_m
    return q / two_m


def iter_set_partitions(items: list[str]):
    """Yield every partition of items as a label dict (restricted growth)."""
    n = len(items)

    def rec(i: int, labels: list[int], used: int):
        if i == n:
            yield dict(zip(items, labels))
            return
        for c in range(used + 1):
            labels.append(c)
            yield from rec(i + 1, labels, max(used, c + 1))
            labels.pop()

    yield from rec(0, [], 0)


def best_partition_bruteforce(net: CooccurrenceNetwork) -> tuple[float, dict[str, int]]:
    """Exhaustive-search optimum over all set partitions of the nodes."""
    nodes = sorted(net.node_weight)
    best_q, best = float("-inf"), None
    for membership in iter_set_partitions(nodes):
        q = modularity_bruteforce(net, membership)
        if q > best_q:
            best_q, best = q, membership
    return best_q, best


def random_connected_network(rng: random.Random, max_nodes: int = 8) -> CooccurrenceNetwork:
    """Random connected graph with integer weights <= 5 (spanning tree plus
    extra edges)."""
    n = rng.randint(4, max_nodes)
    names = [f"n{i}" for i in range(n)]
    order = names[:]
    rng.shuffle(order)
    edges: dict[tuple[str, str], int] = {}
    for i in range(1, n):
        a, b = order[rng.randrange(i)], order[i]
        key = (min(a, b), max(a, b))
        edges[key] = rng.randint(1, 5)
    for _ in range(rng.randint(0, 2 * n)):
        a, b = rng.sample(names, 2)
        key = (min(a, b), max(a, b))
        edges[key] = rng.randint(1, 5)
    return make_network(edges)


def groups_of(membership: dict[str, int]) -> set[frozenset[str]]:
    """Partition as a set of frozensets, for label-free comparison."""
    out: dict[int, set[str]] = {}
    for node, cid in membership.items():
        out.setdefault(cid, set()).add(node)
    return {frozenset(v) for v in out.values()}
