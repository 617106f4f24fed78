"""Research-topic ontology: loading, label normalization, canonical lookup.

The ontology arrives as three-column CSV triples (subject, predicate,
object).  Recognized predicates are super-topic-of, related-equivalent and
preferential-equivalent; everything else is skipped and counted.  All labels
connected by equivalence triples collapse onto one canonical topic id: the
preferential-equivalent target when one exists, otherwise the
lexicographically smallest normalized label of the class.
"""

from __future__ import annotations

import csv
import hashlib
import logging
import re
import urllib.parse
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import ConfigurationError, OntologyLoadError

logger = logging.getLogger(__name__)

_SEPARATORS = re.compile(r"[-_]+")
_WHITESPACE = re.compile(r"\s+")

# Predicate local names, case-folded with separators removed.
_PRED_SUPER = "supertopicof"
_PRED_RELATED = "relatedequivalent"
_PRED_PREFERENTIAL = "preferentialequivalent"
_RECOGNIZED = {_PRED_SUPER, _PRED_RELATED, _PRED_PREFERENTIAL}


def normalize_label(raw: str) -> str:
    """Normalize a surface label to its lookup form.

    Lowercase, hyphens/underscores to spaces, whitespace runs collapsed,
    then a fixed plural heuristic: a trailing "s" is stripped from every
    token of length >= 4 unless the token ends in "ss" (the exclusion keeps
    the function idempotent on tokens like "glass").  Not a stemmer.
    """
    text = _SEPARATORS.sub(" ", raw.lower())
    tokens = []
    for tok in _WHITESPACE.split(text):
        if not tok:
            continue
        if len(tok) >= 4 and tok.endswith("s") and not tok.endswith("ss"):
            tok = tok[:-1]
        tokens.append(tok)
    return " ".join(tokens)


@dataclass(frozen=True)
class TopicOntology:
    """Immutable after load; safe to share across threads."""

    topics: frozenset[str]
    label_index: dict[str, str]
    super_topics: dict[str, frozenset[str]]
    source_checksum: str

    def canonical(self, label: str) -> Optional[str]:
        return self.label_index.get(normalize_label(label))


def canonical_topic(ontology: TopicOntology, label: str) -> Optional[str]:
    """Canonical topic id for a surface label, or None when unknown."""
    return ontology.canonical(label)


def _local_name(value: str) -> str:
    """Strip URI/literal syntax down to the human part of a triple term."""
    v = value.strip()
    if v.startswith("<") and v.endswith(">"):
        v = v[1:-1]
    if "@" in v and v.count('"') >= 2:  # "label"@en
        v = v[: v.rindex('"') + 1]
    if len(v) >= 2 and v[0] == '"' and v[-1] == '"':
        v = v[1:-1]
    if "://" in v or v.startswith("http"):
        v = v.rstrip("/").rsplit("/", 1)[-1]
        if "#" in v:
            v = v.rsplit("#", 1)[-1]
        v = urllib.parse.unquote(v)
    return v


def _predicate_key(pred: str) -> str:
    name = _local_name(pred)
    return _SEPARATORS.sub("", name.replace(" ", "")).lower()


class _UnionFind:
    def __init__(self) -> None:
        self.parent: dict[str, str] = {}

    def add(self, x: str) -> None:
        self.parent.setdefault(x, x)

    def find(self, x: str) -> str:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: str, b: str) -> None:
        self.add(a)
        self.add(b)
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # deterministic: smaller label becomes the root
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def load_ontology(
    triples: Iterable[tuple[str, str, str]],
    source_checksum: str = "",
) -> TopicOntology:
    """Build a TopicOntology from (subject, predicate, object) records.

    Unrecognized predicates are skipped and counted.  For a triple
    (S, super-topic-of, O), S is the broader topic: super_topics[O] gains S.
    Raises ConfigurationError when no recognized triple survives parsing.
    """
    uf = _UnionFind()
    preferred_labels: list[str] = []  # objects of preferential-equivalent
    super_pairs: list[tuple[str, str]] = []  # (broader, narrower), normalized
    labels: set[str] = set()
    skipped = 0

    for subj_raw, pred_raw, obj_raw in triples:
        pred = _predicate_key(pred_raw)
        if pred not in _RECOGNIZED:
            skipped += 1
            continue
        subj = normalize_label(_local_name(subj_raw))
        obj = normalize_label(_local_name(obj_raw))
        if not subj or not obj:
            skipped += 1
            continue
        labels.add(subj)
        labels.add(obj)
        uf.add(subj)
        uf.add(obj)
        if pred == _PRED_SUPER:
            super_pairs.append((subj, obj))
        elif pred == _PRED_RELATED:
            uf.union(subj, obj)
        else:  # preferential-equivalent: object is the preferred form
            uf.union(subj, obj)
            preferred_labels.append(obj)

    if not labels:
        raise ConfigurationError(
            "ontology is empty after parsing (no recognized triples)"
        )
    if skipped:
        logger.warning(
            "ontology load: skipped %d triples with unrecognized predicates", skipped
        )

    members: dict[str, list[str]] = {}
    for label in labels:
        members.setdefault(uf.find(label), []).append(label)
    targets: dict[str, set[str]] = {}
    for label in preferred_labels:
        targets.setdefault(uf.find(label), set()).add(label)

    # Canonical id per class: the preferential target (smallest one if the
    # input names several), else the smallest member.
    canonical_of_root: dict[str, str] = {}
    for root, group in members.items():
        preferred = targets.get(root)
        canonical_of_root[root] = min(preferred) if preferred else min(group)

    label_index = {label: canonical_of_root[uf.find(label)] for label in labels}
    topics = frozenset(canonical_of_root.values())

    super_topics: dict[str, set[str]] = {}
    for broader, narrower in super_pairs:
        b = label_index[broader]
        n = label_index[narrower]
        if b == n:
            continue  # self-loop after canonicalization
        super_topics.setdefault(n, set()).add(b)

    return TopicOntology(
        topics=topics,
        label_index=label_index,
        super_topics={k: frozenset(v) for k, v in super_topics.items()},
        source_checksum=source_checksum,
    )


def load_ontology_file(path: str) -> TopicOntology:
    """Parse a three-column CSV of triples and load the ontology.

    Rows with fewer than three columns are skipped with a warning count;
    unreadable input raises OntologyLoadError naming the offending line.
    """
    triples: list[tuple[str, str, str]] = []
    malformed = 0
    line_num = 0
    try:
        with open(path, "rb") as fh:
            checksum = hashlib.sha256(fh.read()).hexdigest()
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            for row in reader:
                line_num = reader.line_num
                if not row or all(not cell.strip() for cell in row):
                    continue
                if len(row) < 3:
                    malformed += 1
                    continue
                triples.append((row[0], row[1], row[2]))
    except OSError as exc:
        raise OntologyLoadError(f"cannot read ontology file {path!r}: {exc}") from exc
    except (UnicodeDecodeError, csv.Error) as exc:
        raise OntologyLoadError(
            f"cannot parse ontology file {path!r} near line {line_num + 1}: {exc}"
        ) from exc
    if malformed:
        logger.warning("ontology load: skipped %d malformed rows", malformed)
    return load_ontology(triples, source_checksum=checksum)
