#!/usr/bin/env python3
"""Benchmark the compiled Louvain kernel against the pure-Python fallback.

Generates planted-partition weighted graphs at a few sizes, runs both
kernels on identical CSR inputs, checks they return identical partitions,
and reports wall times and speedups.

    python benchmarks/bench_louvain.py [--sizes 200,800,2000] [--repeats 3]
"""

from __future__ import annotations

import argparse
import random
import time

from themeflow import _louvain_py
from themeflow.communities import seeded_shuffle

try:
    from themeflow import _louvain_cy
except ImportError:
    _louvain_cy = None


def planted_graph(n: int, communities: int, rng: random.Random):
    """Weighted planted-partition graph: dense blocks, sparse bridges."""
    members = [i % communities for i in range(n)]
    edges: dict[tuple[int, int], int] = {}
    target_intra = 8 * n
    target_inter = n
    while len(edges) < target_intra:
        c = rng.randrange(communities)
        block = [i for i in range(n) if members[i] == c]
        if len(block) < 2:
            continue
        a, b = rng.sample(block, 2)
        edges[(min(a, b), max(a, b))] = rng.randint(2, 6)
    for _ in range(target_inter):
        a, b = rng.randrange(n), rng.randrange(n)
        if a != b and members[a] != members[b]:
            edges[(min(a, b), max(a, b))] = 1
    return edges


def to_csr(n: int, edges: dict[tuple[int, int], int]):
    neighbors: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for (a, b), w in sorted(edges.items()):
        neighbors[a].append((b, float(w)))
        neighbors[b].append((a, float(w)))
    xadj = [0] * (n + 1)
    adjncy: list[int] = []
    adjwgt: list[float] = []
    for i, row in enumerate(neighbors):
        for j, w in row:
            adjncy.append(j)
            adjwgt.append(w)
        xadj[i + 1] = len(adjncy)
    return xadj, adjncy, adjwgt


def bench(kernel, n, xadj, adjncy, adjwgt, order, repeats: int):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = kernel(n, xadj, adjncy, adjwgt, order, False)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--sizes", default="200,800,2000")
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if _louvain_cy is None:
        print("compiled kernel not available; benchmarking pure Python only")

    print(f"{'nodes':>7} {'edges':>8} {'python':>10} {'cython':>10} {'speedup':>8}  agree")
    for n in sizes:
        rng = random.Random(args.seed)
        edges = planted_graph(n, max(2, n // 100), rng)
        xadj, adjncy, adjwgt = to_csr(n, edges)
        order = seeded_shuffle(range(n), args.seed)

        t_py, res_py = bench(
            _louvain_py.louvain_kernel, n, xadj, adjncy, adjwgt, order, args.repeats
        )
        if _louvain_cy is None:
            print(f"{n:>7} {len(edges):>8} {t_py:>9.4f}s {'-':>10} {'-':>8}")
            continue
        t_cy, res_cy = bench(
            _louvain_cy.louvain_kernel, n, xadj, adjncy, adjwgt, order, args.repeats
        )
        agree = res_py[0] == res_cy[0] and res_py[1] == res_cy[1]
        print(
            f"{n:>7} {len(edges):>8} {t_py:>9.4f}s {t_cy:>9.4f}s "
            f"{t_py / t_cy:>7.1f}x  {agree}"
        )
        if not agree:
            raise SystemExit("backends disagree; that is a bug")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
