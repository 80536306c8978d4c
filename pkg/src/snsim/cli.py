"""Command-line interface.

Subcommands
-----------
simulate   one run; emits events.txt, summary.csv, histogram.csv
pair       paired runs without/with altruistic re-sharing; emits the
           category report (report.csv, report.txt) plus both summaries
sweep      grid runs over one parameter (L, A or P); per-value summaries
           and histograms plus sweep.csv
mine       majority-engagement transactions + lift-ranked pair rules from
           an event file or a user,rule,category,article CSV
tfidf      print one tf-idf score for a term/document of a corpus file
report     format externally observed likes/reach pairs with deltas

Configuration files are flat TOML; keys mirror the ``SimConfig`` fields:

  n_major, n_minor, n_steps               population sizes and step count
  l_threshold, a_threshold, p_alt         decision thresholds and coin
  altruism_enabled                        master switch for re-sharing
  evaluation_distribution                 5 probabilities over scores 0..4
  interest_distribution, s_max            viewer interest model ("uniform")
  posts_per_major_per_step                posting rate
  recommendation_fanout                   integer cap or "all-unseen"
  view_probability                        organic exposure probability
  category_weights                        posting weight per category 1..K
  hub_categories                          ids whose articles can be re-shared
  seed                                    64-bit run seed

Unknown keys are rejected.  ``--seed`` overrides the file's seed.  Exit
codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from . import engine, filtering, mining, stats
from .model import ConfigError, load_config, validate_config

__all__ = ["main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


_SWEEP_LETTER = {"L": "L_threshold", "A": "A_threshold", "P": "p_alt"}


def _build_parser() -> _Parser:
    parser = _Parser(prog="snsim", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="run one simulation")
    simulate.add_argument("--config", required=True)
    simulate.add_argument("--seed", type=int, default=None)
    simulate.add_argument("--out", required=True)

    pair = sub.add_parser("pair", help="paired runs without/with re-sharing")
    pair.add_argument("--config", required=True)
    pair.add_argument("--seed", type=int, default=None)
    pair.add_argument("--out", required=True)

    sweep = sub.add_parser("sweep", help="grid runs over one parameter")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--param", required=True, choices=sorted(_SWEEP_LETTER))
    sweep.add_argument("--values", required=True,
                       help="comma-separated parameter values")
    sweep.add_argument("--seed", type=int, default=None)
    sweep.add_argument("--out", required=True)

    mine = sub.add_parser("mine", help="mine lift-ranked pair rules from likes")
    mine.add_argument("--likes", required=True,
                      help="engine event file or user,rule,category,article CSV")
    mine.add_argument("--min-support", type=int, default=1)
    mine.add_argument("--min-conf", type=str, default="0")
    mine.add_argument("--out", required=True)

    tfidf = sub.add_parser("tfidf", help="print a tf-idf score")
    tfidf.add_argument("--corpus", required=True,
                       help="text file, one document per line")
    tfidf.add_argument("--term", required=True)
    tfidf.add_argument("--doc", type=int, required=True,
                       help="0-based document index")

    report = sub.add_parser("report", help="format observed repost likes/reach")
    report.add_argument("--observed", required=True,
                        help="CSV: label,likes_before,reach_before,likes_after,reach_after")
    report.add_argument("--out", required=True)
    return parser


def _load(config_path: str, seed):
    config = load_config(config_path)
    if seed is not None:
        config = validate_config(replace(config, seed=seed))
    return config


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")


def _emit_run(result, out: Path, with_events: bool = True) -> None:
    out.mkdir(parents=True, exist_ok=True)
    if with_events:
        engine.write_event_file(result, out / "events.txt")
    engine.write_summary_file(result, out / "summary.csv")
    _write(out / "histogram.csv",
           stats.histogram_to_csv(stats.like_histogram(result)))


def _cmd_simulate(args) -> int:
    result = engine.run(_load(args.config, args.seed))
    _emit_run(result, Path(args.out))
    print(f"articles={result.n_articles} likes={result.total_likes} "
          f"shares={result.total_shares}")
    return 0


def _cmd_pair(args) -> int:
    without, with_ = engine.run_pair(_load(args.config, args.seed))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    engine.write_summary_file(without, out / "summary_without.csv")
    engine.write_summary_file(with_, out / "summary_with.csv")
    report = stats.category_report((without, with_))
    _write(out / "report.csv", stats.category_report_to_csv(report))
    _write(out / "report.txt", stats.category_report_to_text(report))
    print(f"likes without={without.total_likes} with={with_.total_likes} "
          f"shares={with_.total_shares}")
    return 0


def _cmd_sweep(args) -> int:
    parameter = _SWEEP_LETTER[args.param]
    try:
        values = [float(v) for v in args.values.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise _UsageError(f"--values must be comma-separated numbers: {exc}")
    results = engine.sweep(_load(args.config, args.seed), parameter, values)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    lines = [f"index,{parameter},articles,likes,shares"]
    for i, (value, result) in enumerate(zip(values, results)):
        sub = out / f"value_{i:03d}"
        _emit_run(result, sub, with_events=False)
        lines.append(f"{i},{value!r},{result.n_articles},"
                     f"{result.total_likes},{result.total_shares}")
        print(f"{parameter}={value!r}: likes={result.total_likes} "
              f"shares={result.total_shares}")
    _write(out / "sweep.csv", "\n".join(lines) + "\n")
    return 0


def _looks_like_event_file(path: str) -> bool:
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            return line.split(",")[0] in ("post", "like", "share")
    return False


def _cmd_mine(args) -> int:
    if _looks_like_event_file(args.likes):
        posts, likes, _ = engine.read_event_file(args.likes)
        records, article_counts = mining.likes_from_event_records(posts, likes)
    else:
        records, article_counts = mining.read_likes_csv(args.likes)
    transactions = mining.build_transactions(records, article_counts)
    rules = mining.mine_pairs(transactions,
                              min_support=args.min_support,
                              min_confidence=Fraction(args.min_conf))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write(out / "transactions.csv", mining.transactions_to_csv(transactions))
    _write(out / "rules.csv", mining.rules_to_csv(rules))
    print(f"transactions={len(transactions)} rules={len(rules)}")
    return 0


def _cmd_tfidf(args) -> int:
    corpus = filtering.Corpus.from_file(args.corpus)
    if not 0 <= args.doc < len(corpus):
        raise ValueError(f"document index out of range: {args.doc}")
    score = filtering.tfidf(args.term, corpus.documents[args.doc], corpus)
    print(repr(score))
    return 0


def _cmd_report(args) -> int:
    import csv as _csv
    observed = []
    with open(args.observed, "r", encoding="utf-8", newline="") as handle:
        for row_no, row in enumerate(_csv.reader(handle), start=1):
            if not row or row[0].startswith("#"):
                continue
            if row_no == 1 and row[0].strip().lower() == "label":
                continue
            if len(row) != 5:
                raise ValueError(
                    f"{args.observed}:{row_no}: expected "
                    "label,likes_before,reach_before,likes_after,reach_after")
            observed.append((row[0], int(row[1]), int(row[2]),
                             int(row[3]), int(row[4])))
    report = stats.repost_report(observed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write(out / "repost.csv", stats.repost_report_to_csv(report))
    _write(out / "repost.txt", stats.repost_report_to_text(report))
    print(f"rows={len(report.rows)}")
    return 0


_HANDLERS = {
    "simulate": _cmd_simulate,
    "pair": _cmd_pair,
    "sweep": _cmd_sweep,
    "mine": _cmd_mine,
    "tfidf": _cmd_tfidf,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"snsim: {exc}", file=sys.stderr)
        return 1
    try:
        return _HANDLERS[args.command](args)
    except _UsageError as exc:
        print(f"snsim: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, OSError, ValueError) as exc:
        print(f"snsim: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
