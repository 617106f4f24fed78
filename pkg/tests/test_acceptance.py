"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines.  The live smoke test (criterion 8) only runs when
THEMEFLOW_LIVE_TESTS=1 is set and the network is reachable.
"""

from __future__ import annotations

import csv
import os
import random
import time

import pytest
from sklearn.metrics import adjusted_rand_score

from conftest import (
    best_partition_bruteforce,
    groups_of,
    random_connected_network,
)
from themeflow.communities import Partition, louvain, modularity
from themeflow.corpus import matches_query
from themeflow.evolution import RULE_EXACT, map_themes
from themeflow.report import RunConfig, run_pipeline, sha256_file
from themeflow.strategic import (
    QUADRANT_BASIC,
    QUADRANT_LOW_LOW,
    QUADRANT_MOTOR,
    QUADRANT_NICHE,
    callon_centrality,
    callon_density,
    classify_quadrant,
)
from themeflow.synthetic import SYNTH_TIMEFRAMES, topic_group, write as write_synth


def ok(criterion: int, text: str) -> None:
    print(f"\nACCEPTANCE {criterion}: PASS - {text}")


def test_criterion_1_callon_fixture_exactness(callon_fixture):
    started = time.monotonic()
    theme_abc = frozenset({"A", "B", "C"})
    theme_de = frozenset({"D", "E"})
    assert abs(callon_centrality(callon_fixture, theme_abc) - 5 / 3) < 1e-9
    assert abs(callon_centrality(callon_fixture, theme_de) - 5 / 3) < 1e-9
    assert abs(callon_density(callon_fixture, theme_abc) - 50 / 3) < 1e-9
    assert abs(callon_density(callon_fixture, theme_de) - 200 / 9) < 1e-9
    elapsed = time.monotonic() - started
    assert elapsed < 1.0
    ok(1, f"Callon fixture centrality/density exact within 1e-9 ({elapsed:.3f}s)")


def test_criterion_2_louvain_oracle_equivalence(
    bridged_triangles, disjoint_triangles, k4
):
    started = time.monotonic()
    expected = {
        "bridged": {frozenset("abc"), frozenset("def")},
        "disjoint": {frozenset("abc"), frozenset("def")},
        "k4": {frozenset("abcd")},
    }
    for name, net in (
        ("bridged", bridged_triangles),
        ("disjoint", disjoint_triangles),
        ("k4", k4),
    ):
        q_opt, best = best_partition_bruteforce(net)
        p = louvain(net, seed=42, check_invariants=True)
        assert groups_of(p.assignment) == groups_of(best) == expected[name]

    rng = random.Random(20220214)
    worst_gap = 0.0
    for i in range(200):
        net = random_connected_network(rng, max_nodes=8)
        q_opt, _ = best_partition_bruteforce(net)
        p = louvain(net, seed=rng.randrange(10**6), check_invariants=True)
        gap = q_opt - modularity(net, p)
        worst_gap = max(worst_gap, gap)
        assert gap <= 0.05, f"graph {i}: louvain trails optimum by {gap}"
    elapsed = time.monotonic() - started
    assert elapsed < 30.0
    ok(2, f"fixtures exactly optimal; 200 random graphs within 0.05 "
          f"(worst gap {worst_gap:.4f}, {elapsed:.1f}s)")


def test_criterion_3_modularity_identities(bridged_triangles):
    whole = Partition({t: 0 for t in bridged_triangles.node_weight})
    assert modularity(bridged_triangles, whole) == 0.0
    split = Partition({"a": 0, "b": 0, "c": 0, "d": 1, "e": 1, "f": 1})
    assert abs(modularity(bridged_triangles, split) - 5 / 14) < 1e-12
    # monotone non-decrease across accepted local moves: enforced inside the
    # kernel when check_invariants is set; exercise it across many graphs
    rng = random.Random(99)
    for _ in range(50):
        louvain(random_connected_network(rng), seed=rng.randrange(10**6),
                check_invariants=True)
    ok(3, "single-community Q = 0 exact; bridged triangles Q = 5/14 within "
          "1e-12; monotone Q verified on every checked graph")


def _run_synthetic(tmp_path, tag: str, seed: int) -> dict:
    corpus = os.path.join(tmp_path, "corpus.jsonl")
    onto = os.path.join(tmp_path, "onto.csv")
    if not os.path.exists(corpus):
        write_synth(corpus, onto, docs_per_timeframe=200)
    cfg = RunConfig(
        corpus_path=corpus,
        ontology_path=onto,
        out_dir=os.path.join(tmp_path, tag),
        seed=seed,
        timeframes=list(SYNTH_TIMEFRAMES),
    )
    return run_pipeline(cfg)


def _read_partition(out_dir: str, label: str) -> dict[str, int]:
    path = os.path.join(out_dir, "per-timeframe", f"{label}.partition.csv")
    with open(path, newline="") as fh:
        return {row["topic"]: int(row["community"]) for row in csv.DictReader(fh)}


def test_criterion_4_synthetic_end_to_end(tmp_path):
    started = time.monotonic()
    tmp = str(tmp_path)
    manifests = {seed: _run_synthetic(tmp, f"run-seed{seed}", seed) for seed in (1, 42)}

    labels = [tf.label for tf in SYNTH_TIMEFRAMES]
    for seed in (1, 42):
        out_dir = os.path.join(tmp, f"run-seed{seed}")
        for label in labels:
            partition = _read_partition(out_dir, label)
            assert len(partition) == 24
            topics = sorted(partition)
            truth = [topic_group(t) for t in topics]
            pred = [partition[t] for t in topics]
            ari = adjusted_rand_score(truth, pred)
            assert ari == 1.0, f"seed {seed} {label}: ARI {ari}"

        with open(os.path.join(out_dir, "mapping_edges.csv"), newline="") as fh:
            edges = list(csv.DictReader(fh))
        assert len(edges) == 6  # 3 themes x 2 consecutive pairs
        assert all(e["rule"] == RULE_EXACT for e in edges)

        with open(os.path.join(out_dir, "trajectories.csv"), newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 3
        for row in rows:
            assert all(row[label] != "-" for label in labels)

    # seed robustness: the planted structure makes the partitions identical
    for label in labels:
        assert _read_partition(
            os.path.join(tmp, "run-seed1"), label
        ) == _read_partition(os.path.join(tmp, "run-seed42"), label)

    elapsed = time.monotonic() - started
    assert elapsed < 10.0
    ok(4, f"ARI 1.0 in all timeframes, exact-top3 mapping, 3 trajectories "
          f"of length 3, seeds 1/42 agree ({elapsed:.1f}s)")


def test_criterion_5_mapping_rule_truth_table():
    from tests_mapping_table import TABLE, run_case  # local helper module

    for case in TABLE:
        run_case(case)
    ok(5, f"mapping truth table: {len(TABLE)} configurations, every "
          f"map_themes branch exercised")


def test_criterion_6_quadrant_classification():
    thresholds = (1.5, 4.0)
    assert classify_quadrant((2, 5), thresholds) == QUADRANT_MOTOR
    assert classify_quadrant((2, 3), thresholds) == QUADRANT_BASIC
    assert classify_quadrant((1, 5), thresholds) == QUADRANT_NICHE
    assert classify_quadrant((1, 3), thresholds) == QUADRANT_LOW_LOW

    rng = random.Random(424242)
    for _ in range(1000):
        c, d = rng.uniform(0, 100), rng.uniform(0, 100)
        mc, md = rng.uniform(0, 100), rng.uniform(0, 100)
        s = rng.uniform(1e-3, 1e3)
        assert classify_quadrant((s * c, d), (s * mc, md)) == classify_quadrant(
            (c, d), (mc, md)
        )
    ok(6, "four-case threshold table and 1000-instance scaling invariance")


def test_criterion_7_byte_identical_runs(tmp_path):
    tmp = str(tmp_path)
    _run_synthetic(tmp, "first", 42)
    _run_synthetic(tmp, "second", 42)

    def digest_tree(root: str) -> dict[str, str]:
        out = {}
        for base, _dirs, names in os.walk(root):
            for name in names:
                full = os.path.join(base, name)
                out[os.path.relpath(full, root)] = sha256_file(full)
        return out

    first = digest_tree(os.path.join(tmp, "first"))
    second = digest_tree(os.path.join(tmp, "second"))
    assert first and first == second
    ok(7, f"two identical-config runs byte-identical across {len(first)} files")


@pytest.mark.skipif(
    os.environ.get("THEMEFLOW_LIVE_TESTS") != "1",
    reason="live smoke test; set THEMEFLOW_LIVE_TESTS=1 to enable",
)
def test_criterion_8_live_smoke():
    from themeflow.corpus import DEFAULT_QUERY_PHRASES
    from themeflow.openalex import fetch_corpus

    corpus = fetch_corpus(
        DEFAULT_QUERY_PHRASES,
        (1991, 3),
        (1991, 3),
        page_size=50,
        max_pages=4,  # <= 200 records
        politeness_contact=os.environ.get("THEMEFLOW_MAILTO"),
    )
    assert len(corpus.documents) <= 200
    for doc in corpus.documents:
        assert matches_query(doc, DEFAULT_QUERY_PHRASES)
    ok(8, f"live fetch of {len(corpus.documents)} records: pagination "
          f"terminated, abstracts reconstructed, local re-check passed")
