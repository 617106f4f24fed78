"""Pipeline orchestration, run manifest, and flat-file outputs.

Every stage communicates through files in the run directory, so `run` is
literally annotate -> analyze -> evolve -> report over its own outputs and
a staged invocation produces the same bytes.  All writes are atomic (temp
file + rename) and nothing timestamped lands in an output, which makes two
runs with the same inputs, config and seed byte-identical.

Run directory layout:
    manifest.json            config, checksums, per-timeframe stats, hashes
    annotations.jsonl        doc_id -> sorted canonical topics
    per-timeframe/           <label>.graphml, <label>.edges.csv,
                             <label>.partition.csv
    strategic.csv            themes with Callon indices and quadrants
    mapping_edges.csv        cross-timeframe theme mapping edges
    trajectories.csv         recurring themes, one column per timeframe
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import os
import re
import tempfile
from dataclasses import dataclass, field

from . import __version__
from .annotate import AnnotatedDocument, extract_topics, load_annotations, save_annotations
from .cograph import build_network, filter_top_topics, write_edge_csv, write_graphml
from .communities import KERNEL_BACKEND, filter_min_cluster_frequency, louvain
from .corpus import (
    DEFAULT_TIMEFRAMES,
    Timeframe,
    load_corpus,
    partition_timeframes,
)
from .errors import AnalysisError, ConfigurationError, ThemeflowError
from .evolution import (
    MappingEdge,
    build_trajectories,
    map_themes,
    resolve_emerging_declining,
)
from .ontology import load_ontology_file
from .strategic import Theme, build_themes

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
ANNOTATIONS_NAME = "annotations.jsonl"
STRATEGIC_NAME = "strategic.csv"
MAPPING_NAME = "mapping_edges.csv"
TRAJECTORIES_NAME = "trajectories.csv"
TIMEFRAME_DIR = "per-timeframe"

TOP_TOPICS_IN_CSV = 5
TOPIC_JOINER = "|"  # topic labels are normalized and never contain it


@dataclass
class RunConfig:
    corpus_path: str = ""
    ontology_path: str = ""
    out_dir: str = "out/run"
    seed: int = 42
    timeframes: list[Timeframe] = field(
        default_factory=lambda: list(DEFAULT_TIMEFRAMES)
    )
    top_topics: int = 1000
    min_cluster_freq: float = 5.0
    threshold: str = "mean"
    cluster_weights: str = "raw"
    enrich_super_topics: bool = False
    max_ngram: int = 3
    min_run: int = 3

    def as_dict(self) -> dict:
        # out_dir is self-referential and deliberately omitted: the same
        # analysis written to two directories must produce identical bytes.
        return {
            "corpus": self.corpus_path,
            "ontology": self.ontology_path,
            "seed": self.seed,
            "timeframes": [
                {
                    "label": tf.label,
                    "start": f"{tf.start[0]:04d}-{tf.start[1]:02d}",
                    "end": f"{tf.end[0]:04d}-{tf.end[1]:02d}",
                }
                for tf in self.timeframes
            ],
            "top_topics": self.top_topics,
            "min_cluster_freq": self.min_cluster_freq,
            "threshold": self.threshold,
            "cluster_weights": self.cluster_weights,
            "enrich_super_topics": self.enrich_super_topics,
            "max_ngram": self.max_ngram,
            "min_run": self.min_run,
        }


def atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def read_manifest(out_dir: str) -> dict:
    path = os.path.join(out_dir, MANIFEST_NAME)
    if not os.path.exists(path):
        return {
            "tool": {"name": "themeflow", "version": __version__},
            "config": {},
            "inputs": {},
            "stages": {},
            "files": {},
        }
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_manifest(out_dir: str, manifest: dict) -> None:
    atomic_write_text(
        os.path.join(out_dir, MANIFEST_NAME),
        json.dumps(manifest, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
    )


def summarize_theme_counts(counts: list[int]) -> tuple[float, float, int, int]:
    """(mean, population sd, min, max) over per-timeframe theme counts."""
    if not counts:
        raise AnalysisError("no analyzed timeframes to summarize")
    mean = sum(counts) / len(counts)
    variance = sum((c - mean) ** 2 for c in counts) / len(counts)
    return mean, math.sqrt(variance), min(counts), max(counts)


def _safe_label(label: str) -> str:
    return re.sub(r"[^0-9A-Za-z._-]+", "_", label)


def _stage(name: str, exc: ThemeflowError) -> ThemeflowError:
    return type(exc)(f"[stage {name}] {exc}")


# ---------------------------------------------------------------------------
# stages


def stage_annotate(cfg: RunConfig) -> dict:
    """corpus + ontology -> annotations.jsonl; returns stage stats."""
    if not cfg.ontology_path:
        raise ConfigurationError("missing ontology path (--ontology)")
    if not cfg.corpus_path:
        raise ConfigurationError("missing corpus path (--corpus)")
    ontology = load_ontology_file(cfg.ontology_path)
    documents = load_corpus(cfg.corpus_path)
    annotated = [
        extract_topics(doc, ontology, cfg.max_ngram, cfg.enrich_super_topics)
        for doc in documents
    ]
    os.makedirs(cfg.out_dir, exist_ok=True)
    out_path = os.path.join(cfg.out_dir, ANNOTATIONS_NAME)
    tmp_path = out_path + ".tmp"
    save_annotations(annotated, tmp_path)
    os.replace(tmp_path, out_path)

    with_topics = sum(1 for a in annotated if a.topics)
    empty_abstracts = sum(1 for d in documents if not d.abstract.strip())
    stats = {
        "documents": len(documents),
        "documents_with_topics": with_topics,
        "documents_without_topics": len(documents) - with_topics,
        "documents_with_empty_abstract": empty_abstracts,
        "ontology_topics": len(ontology.topics),
    }
    manifest = read_manifest(cfg.out_dir)
    manifest["config"] = cfg.as_dict()
    manifest["inputs"] = {
        "corpus": {"path": cfg.corpus_path, "sha256": sha256_file(cfg.corpus_path)},
        "ontology": {
            "path": cfg.ontology_path,
            "sha256": ontology.source_checksum,
        },
    }
    manifest["stages"]["annotate"] = stats
    write_manifest(cfg.out_dir, manifest)
    logger.info("annotate: %s", stats)
    return stats


def _theme_csv_rows(themes: list[Theme]) -> list[list[str]]:
    rows = []
    for t in themes:
        rows.append(
            [
                t.timeframe_label,
                str(t.theme_id),
                t.representative_topic,
                TOPIC_JOINER.join(t.top_topics[:TOP_TOPICS_IN_CSV]),
                str(t.size),
                str(t.centrality),
                str(t.density),
                t.quadrant,
            ]
        )
    return rows


def _write_csv(path: str, header: list[str], rows: list[list[str]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    atomic_write_text(path, buf.getvalue())


def stage_analyze(cfg: RunConfig) -> dict:
    """corpus + annotations -> per-timeframe networks, partitions, themes."""
    documents = load_corpus(cfg.corpus_path)
    annotations = load_annotations(os.path.join(cfg.out_dir, ANNOTATIONS_NAME))
    partition = partition_timeframes(documents, cfg.timeframes)

    safe_labels = [_safe_label(tf.label) for tf in cfg.timeframes]
    if len(set(safe_labels)) != len(safe_labels):
        raise ConfigurationError(
            "timeframe labels collide after filename sanitization"
        )
    tf_dir = os.path.join(cfg.out_dir, TIMEFRAME_DIR)
    os.makedirs(tf_dir, exist_ok=True)

    all_theme_rows: list[list[str]] = []
    per_timeframe: list[dict] = []
    for timeframe, docs in partition.bins:
        label = timeframe.label
        if not docs:
            logger.warning("%s: no documents in this timeframe", label)
            per_timeframe.append(
                {"label": label, "doc_count": 0, "topic_count": 0, "theme_count": 0}
            )
            continue
        missing = [d.id for d in docs if d.id not in annotations]
        if missing:
            raise AnalysisError(
                f"{label}: {len(missing)} documents lack annotations "
                f"(first: {missing[0]!r}); run the annotate stage first"
            )
        anns: list[AnnotatedDocument] = [annotations[d.id] for d in docs]
        net = build_network(anns, label)
        net = filter_top_topics(net, cfg.top_topics)

        safe = _safe_label(label)
        write_graphml(net, os.path.join(tf_dir, f"{safe}.graphml"))
        write_edge_csv(net, os.path.join(tf_dir, f"{safe}.edges.csv"))

        if not net.node_weight:
            logger.warning("%s: no topics were mentioned; skipping clustering", label)
            _write_csv(
                os.path.join(tf_dir, f"{safe}.partition.csv"),
                ["topic", "community"], [],
            )
            per_timeframe.append(
                {"label": label, "doc_count": len(docs), "topic_count": 0,
                 "theme_count": 0}
            )
            continue

        communities = louvain(net, cfg.seed, cfg.cluster_weights)
        communities = filter_min_cluster_frequency(
            net, communities, anns, cfg.min_cluster_freq
        )
        _write_csv(
            os.path.join(tf_dir, f"{safe}.partition.csv"),
            ["topic", "community"],
            [[t, str(c)] for t, c in sorted(communities.assignment.items())],
        )
        themes = build_themes(net, communities, cfg.threshold)
        all_theme_rows.extend(_theme_csv_rows(themes))
        entry = {
            "label": label,
            "doc_count": len(docs),
            "topic_count": len(net.node_weight),
            "theme_count": len(themes),
        }
        if themes:
            entry["mean_centrality"] = sum(t.centrality for t in themes) / len(themes)
            entry["mean_density"] = sum(t.density for t in themes) / len(themes)
        per_timeframe.append(entry)

    _write_csv(
        os.path.join(cfg.out_dir, STRATEGIC_NAME),
        ["timeframe", "theme_id", "representative", "top_topics", "size",
         "centrality", "density", "quadrant"],
        all_theme_rows,
    )

    stats = {
        "excluded_documents": partition.excluded,
        "seed": cfg.seed,
        "kernel_backend": KERNEL_BACKEND,
        "timeframes": per_timeframe,
    }
    manifest = read_manifest(cfg.out_dir)
    manifest["config"] = cfg.as_dict()
    manifest["stages"]["analyze"] = stats
    write_manifest(cfg.out_dir, manifest)
    logger.info("analyze: %d timeframes", len(per_timeframe))
    return stats


def load_strategic(out_dir: str) -> dict[str, list[Theme]]:
    """Rebuild per-timeframe themes from strategic.csv for the evolve stage.

    The CSV carries the top-5 ranking, which is exactly what the mapping
    rule consumes; the full topic sets stay in the partition CSVs.
    """
    path = os.path.join(out_dir, STRATEGIC_NAME)
    if not os.path.exists(path):
        raise ConfigurationError(f"missing {STRATEGIC_NAME} in {out_dir!r}; run analyze first")
    themes: dict[str, list[Theme]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            top = tuple(row["top_topics"].split(TOPIC_JOINER)) if row["top_topics"] else ()
            theme = Theme(
                timeframe_label=row["timeframe"],
                theme_id=int(row["theme_id"]),
                topics=frozenset(top),
                representative_topic=row["representative"],
                top_topics=top,
                centrality=float(row["centrality"]),
                density=float(row["density"]),
                quadrant=row["quadrant"],
            )
            themes.setdefault(theme.timeframe_label, []).append(theme)
    return themes


def stage_evolve(cfg: RunConfig) -> dict:
    """strategic.csv -> mapping_edges.csv + trajectories.csv."""
    themes_by_tf = load_strategic(cfg.out_dir)
    order = [tf.label for tf in cfg.timeframes]
    unknown = set(themes_by_tf) - set(order)
    if unknown:
        raise ConfigurationError(
            f"strategic.csv has timeframes missing from the configuration: "
            f"{sorted(unknown)}"
        )

    edges: list[MappingEdge] = []
    for earlier_label, later_label in zip(order, order[1:]):
        edges.extend(
            map_themes(
                themes_by_tf.get(earlier_label, []),
                themes_by_tf.get(later_label, []),
            )
        )
    _write_csv(
        os.path.join(cfg.out_dir, MAPPING_NAME),
        ["from_timeframe", "from_theme", "to_timeframe", "to_theme", "rule",
         "overlap_score"],
        [
            [e.from_timeframe, str(e.from_theme), e.to_timeframe,
             str(e.to_theme), e.rule, str(e.overlap_score)]
            for e in edges
        ],
    )

    trajectories = build_trajectories(edges, themes_by_tf, order, cfg.min_run)
    rows = []
    for traj in trajectories:
        resolved = dict(
            zip((t.timeframe_label for t in traj.themes),
                resolve_emerging_declining(traj))
        )
        rows.append([traj.label] + [resolved.get(label, "-") for label in order])
    _write_csv(
        os.path.join(cfg.out_dir, TRAJECTORIES_NAME),
        ["theme"] + order,
        rows,
    )

    stats = {"mapping_edges": len(edges), "trajectories": len(trajectories)}
    manifest = read_manifest(cfg.out_dir)
    manifest["stages"]["evolve"] = stats
    write_manifest(cfg.out_dir, manifest)
    logger.info("evolve: %s", stats)
    return stats


def stage_report(cfg: RunConfig) -> dict:
    """Finalize the manifest: theme-count summary plus output file hashes."""
    manifest = read_manifest(cfg.out_dir)
    analyze_stats = manifest.get("stages", {}).get("analyze")
    if analyze_stats:
        counts = [
            tf["theme_count"]
            for tf in analyze_stats["timeframes"]
            if tf["doc_count"] > 0
        ]
        if counts:
            mean, sd, lo, hi = summarize_theme_counts(counts)
            manifest["theme_count_summary"] = {
                "mean": mean, "sd": sd, "min": lo, "max": hi,
                "timeframes": len(counts),
            }

    files: dict[str, str] = {}
    for root, _dirs, names in os.walk(cfg.out_dir):
        for name in sorted(names):
            if name == MANIFEST_NAME or name.endswith(".tmp"):
                continue
            full = os.path.join(root, name)
            rel = os.path.relpath(full, cfg.out_dir)
            files[rel.replace(os.sep, "/")] = sha256_file(full)
    manifest["files"] = files
    write_manifest(cfg.out_dir, manifest)
    logger.info("report: hashed %d output files", len(files))
    return manifest


def run_pipeline(cfg: RunConfig) -> dict:
    """Execute annotate -> analyze -> evolve -> report; returns the manifest.

    Each stage only writes its own outputs atomically, so a failure leaves
    the earlier stages' files intact; the stage name travels with the error.
    """
    for name, fn in (
        ("annotate", stage_annotate),
        ("analyze", stage_analyze),
        ("evolve", stage_evolve),
        ("report", stage_report),
    ):
        try:
            result = fn(cfg)
        except ThemeflowError as exc:
            raise _stage(name, exc) from exc
    return result
