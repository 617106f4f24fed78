"""Command line interface.

Subcommands: fetch, annotate, analyze, evolve, report, run.  Exit codes:
0 success, 2 configuration error, 3 fetch error, 4 analysis error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .corpus import (
    DEFAULT_QUERY_PHRASES,
    DEFAULT_TIMEFRAMES,
    parse_timeframes_spec,
    parse_year_month,
    save_corpus,
)
from .errors import ConfigurationError, FetchError, ThemeflowError
from .openalex import fetch_corpus
from .report import (
    RunConfig,
    run_pipeline,
    stage_analyze,
    stage_annotate,
    stage_evolve,
    stage_report,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FETCH = 3
EXIT_ANALYSIS = 4


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--corpus", help="corpus JSONL path")
    parser.add_argument("--ontology", help="ontology CSV path")
    parser.add_argument("--out", default="out/run", help="run output directory")
    parser.add_argument("--seed", type=int, default=42, help="clustering seed")
    parser.add_argument("--from", dest="date_from", default="1990-01",
                        metavar="YYYY-MM", help="start of the date range")
    parser.add_argument("--to", dest="date_to", default="2022-02",
                        metavar="YYYY-MM", help="end of the date range (inclusive)")
    parser.add_argument("--timeframes", help="comma-separated label=START..END bins")
    parser.add_argument("--top-topics", type=int, default=1000,
                        help="keep this many heaviest topics per timeframe")
    parser.add_argument("--min-cluster-freq", type=float, default=5.0,
                        help="min cluster document coverage per 1000 documents")
    parser.add_argument("--threshold", choices=["mean", "median"], default="mean",
                        help="quadrant threshold statistic")
    parser.add_argument("--cluster-weights", choices=["raw", "equivalence"],
                        default="raw", help="edge weights fed to clustering")
    parser.add_argument("--enrich-super-topics", action="store_true",
                        help="add each topic hit's direct super-topics")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for info, -vv for debug logging")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="themeflow",
        description="Detect conceptual research themes per timeframe and "
                    "trace their evolution.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fetch = sub.add_parser("fetch", help="retrieve the corpus from the live API")
    _common_flags(p_fetch)
    p_fetch.add_argument("--query-phrase", action="append", dest="query_phrases",
                         help="phrase to search in titles/abstracts (repeatable)")
    p_fetch.add_argument("--mailto", help="contact email for the polite pool")
    p_fetch.add_argument("--page-size", type=int, default=200)
    p_fetch.add_argument("--max-pages", type=int,
                         help="stop after this many pages (smoke tests)")

    for name, help_text in (
        ("annotate", "annotate the corpus with canonical topics"),
        ("analyze", "build networks, detect themes, classify quadrants"),
        ("evolve", "map themes across timeframes into trajectories"),
        ("report", "finalize the run manifest with stats and hashes"),
        ("run", "all stages: annotate, analyze, evolve, report"),
    ):
        p = sub.add_parser(name, help=help_text)
        _common_flags(p)

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    timeframes = (
        parse_timeframes_spec(args.timeframes)
        if args.timeframes
        else list(DEFAULT_TIMEFRAMES)
    )
    return RunConfig(
        corpus_path=args.corpus or "",
        ontology_path=args.ontology or "",
        out_dir=args.out,
        seed=args.seed,
        timeframes=timeframes,
        top_topics=args.top_topics,
        min_cluster_freq=args.min_cluster_freq,
        threshold=args.threshold,
        cluster_weights=args.cluster_weights,
        enrich_super_topics=args.enrich_super_topics,
    )


def _cmd_fetch(args: argparse.Namespace) -> int:
    if not args.corpus:
        raise ConfigurationError("fetch needs --corpus to know where to write")
    phrases = args.query_phrases or list(DEFAULT_QUERY_PHRASES)
    corpus = fetch_corpus(
        phrases,
        parse_year_month(args.date_from),
        parse_year_month(args.date_to),
        page_size=args.page_size,
        politeness_contact=args.mailto,
        max_pages=args.max_pages,
    )
    n = save_corpus(corpus.documents, args.corpus)
    print(f"fetched {n} documents -> {args.corpus}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=(logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)],
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "fetch":
            return _cmd_fetch(args)
        cfg = _config_from_args(args)
        if args.command == "annotate":
            stats = stage_annotate(cfg)
            print(f"annotated {stats['documents']} documents -> {cfg.out_dir}")
        elif args.command == "analyze":
            stats = stage_analyze(cfg)
            themed = sum(tf["theme_count"] for tf in stats["timeframes"])
            print(f"analyzed {len(stats['timeframes'])} timeframes, "
                  f"{themed} themes -> {cfg.out_dir}")
        elif args.command == "evolve":
            stats = stage_evolve(cfg)
            print(f"{stats['mapping_edges']} mapping edges, "
                  f"{stats['trajectories']} trajectories -> {cfg.out_dir}")
        elif args.command == "report":
            manifest = stage_report(cfg)
            summary = manifest.get("theme_count_summary")
            if summary:
                print(
                    f"themes per timeframe: {summary['mean']:.2f} "
                    f"± {summary['sd']:.2f} "
                    f"(min {summary['min']}, max {summary['max']})"
                )
            print(f"manifest covers {len(manifest['files'])} files")
        elif args.command == "run":
            manifest = run_pipeline(cfg)
            summary = manifest.get("theme_count_summary")
            if summary:
                print(
                    f"themes per timeframe: {summary['mean']:.2f} "
                    f"± {summary['sd']:.2f} "
                    f"(min {summary['min']}, max {summary['max']})"
                )
            print(f"run complete -> {cfg.out_dir}")
        return EXIT_OK
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FetchError as exc:
        print(f"fetch error: {exc}", file=sys.stderr)
        return EXIT_FETCH
    except ThemeflowError as exc:
        print(f"analysis error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS


if __name__ == "__main__":
    raise SystemExit(main())
