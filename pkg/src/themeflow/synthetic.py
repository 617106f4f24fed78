"""Bundled synthetic corpus generator for end-to-end validation.

Plants three disjoint 8-topic groups across three consecutive timeframes.
Document composition is a fixed arithmetic schedule, not a random draw, so
the corpus is byte-stable and the planted signal is strong enough that
community detection must recover the groups exactly regardless of seed:

* doc d of a group mentions topic j iff d % (j+1) == 0, giving strictly
  decreasing within-group topic counts (the top-3 ranking can never tie);
* every 20th document (at the sparse d % 20 == 1 slots) additionally
  co-mentions the weakest topic of the next group, which keeps ~95% of
  co-mention pairs within groups.
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

from .corpus import Document, Timeframe, save_corpus

GROUPS = 3
TOPICS_PER_GROUP = 8
BRIDGE_EVERY = 20  # one cross-group co-mention per this many documents

SYNTH_TIMEFRAMES = [
    Timeframe("2005-09", (2005, 1), (2009, 12)),
    Timeframe("2010-14", (2010, 1), (2014, 12)),
    Timeframe("2015-19", (2015, 1), (2019, 12)),
]

SYNTH_TIMEFRAMES_SPEC = (
    "2005-09=2005..2009,2010-14=2010..2014,2015-19=2015..2019"
)


def topic_label(group: int, rank: int) -> str:
    return f"concept {group}{rank:02d}"


def topic_group(label: str) -> int:
    """Recover the planted group from a topic label."""
    return int(label.split()[1][0])


@dataclass
class SyntheticCorpus:
    documents: list[Document]
    ontology_rows: list[str]
    groups: dict[str, int]  # topic label -> planted group


def _doc_topics(group: int, d: int) -> list[str]:
    topics = [
        topic_label(group, j) for j in range(TOPICS_PER_GROUP) if d % (j + 1) == 0
    ]
    if d % BRIDGE_EVERY == 1:
        topics.append(topic_label((group + 1) % GROUPS, TOPICS_PER_GROUP - 1))
    return topics


def generate(docs_per_timeframe: int = 200) -> SyntheticCorpus:
    """Build the synthetic documents plus a matching mini ontology."""
    documents: list[Document] = []
    for t, frame in enumerate(SYNTH_TIMEFRAMES):
        start_year = frame.start[0]
        base = docs_per_timeframe // GROUPS
        extra = docs_per_timeframe % GROUPS
        for group in range(GROUPS):
            n_docs = base + (1 if group < extra else 0)
            for d in range(n_docs):
                topics = _doc_topics(group, d)
                title = f"A study of {topics[0]} methods"
                rest = topics[1:]
                if rest:
                    abstract = (
                        "We investigate "
                        + ", then ".join(rest)
                        + f" alongside {topics[0]} in applied settings."
                    )
                else:
                    abstract = f"We revisit {topics[0]} with machine learning methods."
                documents.append(
                    Document(
                        id=f"S{t}{group}{d:03d}",
                        title=title,
                        abstract=abstract,
                        year=start_year + (d % 5),
                        month=1 + (d % 12),
                    )
                )

    rows = []
    root = "<https://example.org/topics/artificial_intelligence>"
    pred_super = "<https://example.org/schema#superTopicOf>"
    pred_equiv = "<https://example.org/schema#relatedEquivalent>"
    groups: dict[str, int] = {}
    for group in range(GROUPS):
        for rank in range(TOPICS_PER_GROUP):
            label = topic_label(group, rank)
            groups[label] = group
            uri = f"<https://example.org/topics/concept_{group}{rank:02d}>"
            rows.append(f"{root},{pred_super},{uri}")
    # a little structure the generator itself never mentions, to exercise
    # equivalence resolution and the unrecognized-predicate counter
    rows.append(
        "<https://example.org/topics/smart_systems>,"
        f"{pred_equiv},<https://example.org/topics/intelligent_systems>"
    )
    rows.append(
        "<https://example.org/topics/artificial_intelligence>,"
        "<https://example.org/schema#contributesTo>,"
        "<https://example.org/topics/computer_science>"
    )
    return SyntheticCorpus(documents=documents, ontology_rows=rows, groups=groups)


def write(corpus_path: str, ontology_path: str, docs_per_timeframe: int = 200) -> SyntheticCorpus:
    synth = generate(docs_per_timeframe)
    save_corpus(synth.documents, corpus_path)
    with open(ontology_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(synth.ontology_rows))
        fh.write("\n")
    return synth


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        description="Write the bundled synthetic corpus and mini ontology."
    )
    parser.add_argument("--corpus", default="synthetic_corpus.jsonl")
    parser.add_argument("--ontology", default="synthetic_ontology.csv")
    parser.add_argument("--docs-per-timeframe", type=int, default=200)
    args = parser.parse_args(argv)
    synth = write(args.corpus, args.ontology, args.docs_per_timeframe)
    print(
        f"wrote {len(synth.documents)} documents to {args.corpus} and "
        f"{len(synth.ontology_rows)} ontology rows to {args.ontology}"
    )
    print(f"suggested --timeframes {SYNTH_TIMEFRAMES_SPEC!r}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
