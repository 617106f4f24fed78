"""Topic annotation: syntactic n-gram matching of document text against the
ontology's label index.

The matcher is the deterministic, dependency-free stage of topic
classification: split "title. abstract" on non-alphanumeric boundaries,
case-fold, look every 1..max_ngram-gram up through the ontology, and keep
the set of canonical hits.  Overlapping hits all count.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from typing import Iterable

from .corpus import Document, TimeframePartition
from .errors import AnalysisError, ConfigurationError
from .ontology import TopicOntology

logger = logging.getLogger(__name__)

_TOKEN_BOUNDARY = re.compile(r"[^0-9a-z]+")


@dataclass(frozen=True)
class AnnotatedDocument:
    doc_id: str
    topics: frozenset[str]


def tokenize(text: str) -> list[str]:
    """Case-folded tokens split on any non-alphanumeric character."""
    return [tok for tok in _TOKEN_BOUNDARY.split(text.lower()) if tok]


def _strip_plural(token: str) -> str:
    # Mirrors ontology.normalize_label on single alnum tokens.
    if len(token) >= 4 and token.endswith("s") and not token.endswith("ss"):
        return token[:-1]
    return token


def extract_topics(
    doc: Document,
    ontology: TopicOntology,
    max_ngram: int = 3,
    enrich_super_topics: bool = False,
) -> AnnotatedDocument:
    """Canonical topics whose labels appear as n-grams of title+abstract.

    Tokens are plural-stripped once up front; joining stripped tokens with
    single spaces is exactly normalize_label applied to the raw n-gram, so
    the per-gram lookup needs no further normalization.  With
    enrich_super_topics, each hit also contributes its direct super-topics.
    """
    if max_ngram < 1:
        raise ConfigurationError("max_ngram must be >= 1")
    tokens = [_strip_plural(t) for t in tokenize(f"{doc.title}. {doc.abstract}")]
    index = ontology.label_index
    hits: set[str] = set()
    n_tokens = len(tokens)
    for n in range(1, max_ngram + 1):
        for i in range(n_tokens - n + 1):
            canonical = index.get(" ".join(tokens[i : i + n]))
            if canonical is not None:
                hits.add(canonical)
    if enrich_super_topics and hits:
        enriched = set(hits)
        for topic in hits:
            enriched.update(ontology.super_topics.get(topic, ()))
        hits = enriched
    return AnnotatedDocument(doc_id=doc.id, topics=frozenset(hits))


def annotate_corpus(
    partition: TimeframePartition,
    ontology: TopicOntology,
    max_ngram: int = 3,
    enrich_super_topics: bool = False,
) -> dict[str, list[AnnotatedDocument]]:
    """Annotate every document, bin by bin, preserving document order.

    Documents with empty topic sets stay in the lists: they count toward
    per-timeframe document totals even though they add nothing to the graph.
    """
    annotated: dict[str, list[AnnotatedDocument]] = {}
    for timeframe, docs in partition.bins:
        annotated[timeframe.label] = [
            extract_topics(doc, ontology, max_ngram, enrich_super_topics)
            for doc in docs
        ]
    return annotated


def save_annotations(
    annotations: Iterable[AnnotatedDocument], path: str
) -> int:
    """Write annotations as JSONL: {"doc_id": ..., "topics": [sorted...]}."""
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for ann in annotations:
            fh.write(
                json.dumps(
                    {"doc_id": ann.doc_id, "topics": sorted(ann.topics)},
                    ensure_ascii=False,
                    sort_keys=True,
                )
            )
            fh.write("\n")
            n += 1
    return n


def load_annotations(path: str) -> dict[str, AnnotatedDocument]:
    """Read an annotations JSONL into a doc_id -> AnnotatedDocument map."""
    out: dict[str, AnnotatedDocument] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise AnalysisError(f"{path}:{line_no}: invalid JSON: {exc}") from exc
                doc_id = str(record.get("doc_id", ""))
                if not doc_id:
                    raise AnalysisError(f"{path}:{line_no}: missing doc_id")
                if doc_id in out:
                    raise AnalysisError(f"{path}:{line_no}: duplicate doc_id {doc_id!r}")
                out[doc_id] = AnnotatedDocument(
                    doc_id=doc_id, topics=frozenset(record.get("topics") or [])
                )
    except OSError as exc:
        raise ConfigurationError(f"cannot read annotations file {path!r}: {exc}") from exc
    return out
