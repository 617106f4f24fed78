"""Documents, the JSONL corpus cache, and timeframe partitioning."""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .errors import AnalysisError, ConfigurationError, ReconstructionError

logger = logging.getLogger(__name__)

_WHITESPACE = re.compile(r"\s+")

# (year, month) pairs; months are 1-12.
YearMonth = tuple[int, int]

# The four phrases the corpus query defaults to.
DEFAULT_QUERY_PHRASES = [
    "artificial intelligence",
    "machine learning",
    "deep learning",
    "data science",
]


@dataclass(frozen=True)
class Document:
    id: str
    title: str
    abstract: str = ""
    year: int = 0
    month: Optional[int] = None

    def validate(self) -> None:
        if not self.id:
            raise AnalysisError("document with empty id")
        if self.year < 1000:
            raise AnalysisError(f"document {self.id}: implausible year {self.year}")
        if self.month is not None and not 1 <= self.month <= 12:
            raise AnalysisError(f"document {self.id}: month {self.month} out of range")


@dataclass
class Corpus:
    documents: list[Document]
    query_phrases: list[str]
    date_range: tuple[YearMonth, YearMonth]
    retrieved_at: str = ""


@dataclass(frozen=True)
class Timeframe:
    label: str
    start: YearMonth  # inclusive
    end: YearMonth  # inclusive

    def contains(self, year: int, month: Optional[int]) -> bool:
        ym = (year, month if month is not None else 1)
        return self.start <= ym <= self.end


@dataclass
class TimeframePartition:
    bins: list[tuple[Timeframe, list[Document]]]
    excluded: int  # documents outside every bin

    def labels(self) -> list[str]:
        return [tf.label for tf, _ in self.bins]


#: The seven analysis periods: six 5-year bins, then 2020 through Feb 2022.
DEFAULT_TIMEFRAMES = [
    Timeframe("1990-94", (1990, 1), (1994, 12)),
    Timeframe("1995-99", (1995, 1), (1999, 12)),
    Timeframe("2000-04", (2000, 1), (2004, 12)),
    Timeframe("2005-09", (2005, 1), (2009, 12)),
    Timeframe("2010-14", (2010, 1), (2014, 12)),
    Timeframe("2015-19", (2015, 1), (2019, 12)),
    Timeframe("2020-22", (2020, 1), (2022, 2)),
]


def reconstruct_abstract(inverted: Mapping[str, Sequence[int]]) -> str:
    """Rebuild abstract text from a word -> positions inverted index.

    Words are placed at their positions and joined with single spaces; holes
    in the position sequence simply close up.  A position claimed by two
    different words raises ReconstructionError naming the position.
    """
    placed: dict[int, str] = {}
    for word, positions in inverted.items():
        for pos in positions:
            other = placed.get(pos)
            if other is not None and other != word:
                raise ReconstructionError(
                    f"position {pos} claimed by both {other!r} and {word!r}"
                )
            placed[pos] = word
    return " ".join(placed[pos] for pos in sorted(placed))


def _squash(text: str) -> str:
    return _WHITESPACE.sub(" ", text.lower()).strip()


def matches_query(doc: Document, phrases: Sequence[str]) -> bool:
    """True when any phrase occurs as a substring of the normalized
    (lowercased, whitespace-collapsed) title or abstract."""
    if not phrases:
        raise ConfigurationError("matches_query requires at least one phrase")
    title = _squash(doc.title)
    abstract = _squash(doc.abstract)
    for phrase in phrases:
        needle = _squash(phrase)
        if needle and (needle in title or needle in abstract):
            return True
    return False


def partition_timeframes(
    documents: Iterable[Document],
    boundaries: Sequence[Timeframe] = tuple(DEFAULT_TIMEFRAMES),
) -> TimeframePartition:
    """Assign each document to the unique bin containing its year-month.

    Documents outside every bin are counted and excluded.  Overlapping or
    out-of-order boundaries raise ConfigurationError.
    """
    frames = list(boundaries)
    labels = [tf.label for tf in frames]
    if len(set(labels)) != len(labels):
        raise ConfigurationError("timeframe labels must be unique")
    for tf in frames:
        if tf.start > tf.end:
            raise ConfigurationError(f"timeframe {tf.label!r} starts after it ends")
    for prev, cur in zip(frames, frames[1:]):
        if cur.start <= prev.end:
            raise ConfigurationError(
                f"timeframes {prev.label!r} and {cur.label!r} overlap or are unordered"
            )
    bins: list[tuple[Timeframe, list[Document]]] = [(tf, []) for tf in frames]
    excluded = 0
    for doc in documents:
        for tf, docs in bins:
            if tf.contains(doc.year, doc.month):
                docs.append(doc)
                break
        else:
            excluded += 1
    if excluded:
        logger.info("partition: excluded %d documents outside all timeframes", excluded)
    return TimeframePartition(bins=bins, excluded=excluded)


def save_corpus(documents: Iterable[Document], path: str) -> int:
    """Write documents as JSON Lines (id, title, abstract, year, month)."""
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for doc in documents:
            record = {
                "id": doc.id,
                "title": doc.title,
                "abstract": doc.abstract,
                "year": doc.year,
                "month": doc.month,
            }
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True))
            fh.write("\n")
            n += 1
    return n


def load_corpus(path: str) -> list[Document]:
    """Read a JSONL corpus cache, validating ids and dates."""
    documents: list[Document] = []
    seen: set[str] = set()
    try:
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise AnalysisError(
                        f"{path}:{line_no}: invalid JSON: {exc}"
                    ) from exc
                doc = Document(
                    id=str(record.get("id", "")),
                    title=record.get("title") or "",
                    abstract=record.get("abstract") or "",
                    year=int(record.get("year", 0)),
                    month=record.get("month"),
                )
                doc.validate()
                if doc.id in seen:
                    raise AnalysisError(f"{path}:{line_no}: duplicate document id {doc.id!r}")
                seen.add(doc.id)
                documents.append(doc)
    except OSError as exc:
        raise ConfigurationError(f"cannot read corpus file {path!r}: {exc}") from exc
    return documents


def parse_year_month(text: str) -> YearMonth:
    """Parse YYYY or YYYY-MM into a (year, month) pair."""
    m = re.fullmatch(r"(\d{4})(?:-(\d{1,2}))?", text.strip())
    if not m:
        raise ConfigurationError(f"invalid year-month {text!r} (expected YYYY or YYYY-MM)")
    year = int(m.group(1))
    month = int(m.group(2)) if m.group(2) else 1
    if not 1 <= month <= 12:
        raise ConfigurationError(f"invalid month in {text!r}")
    return (year, month)


def parse_timeframes_spec(spec: str) -> list[Timeframe]:
    """Parse a --timeframes value: comma-separated label=START..END segments.

    START/END accept YYYY or YYYY-MM; a bare YYYY start means January and a
    bare YYYY end means December.
    """
    frames: list[Timeframe] = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part or ".." not in part:
            raise ConfigurationError(
                f"invalid timeframe segment {part!r} (expected label=START..END)"
            )
        label, _, span = part.partition("=")
        start_s, _, end_s = span.partition("..")
        start = parse_year_month(start_s)
        end_raw = end_s.strip()
        end = parse_year_month(end_raw)
        if re.fullmatch(r"\d{4}", end_raw):
            end = (end[0], 12)
        frames.append(Timeframe(label.strip(), start, end))
    if not frames:
        raise ConfigurationError(f"no timeframes in spec {spec!r}")
    return frames
