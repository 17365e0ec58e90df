"""Command-line interface.

Subcommands:

    score      score one pair (--text-a/--text-b) or stream a canonical
               JSONL file (--pairs) as id,metric,score CSV
    benchmark  run a metric set over a dataset and persist the run
    report     render summary tables over saved runs, optionally with
               figures

Exit codes: 0 success, 1 partial run, 2 configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import (
    RunOptions,
    emit_figures,
    load_run,
    resolve_bundles,
    run_benchmark,
    save_run,
    score_pair,
    summary_table,
)
from .cache import ScoreCache
from .errors import ConfigError, DataError, ParseError, SemsimError
from .ingest import DatasetSource, SourceKind, from_canonical
from .types import Metric, SentencePair

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_CONFIG = 2
EXIT_DATA = 3

_DATASET_CHOICES = {
    "stsb": SourceKind.STSB,
    "mrpc": SourceKind.MRPC,
    "qqp": SourceKind.QQP,
    "wmt22_zh_en": SourceKind.WMT22_ZH_EN,
    "canonical": SourceKind.CANONICAL_JSONL,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="semsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_score = sub.add_parser("score", help="score a pair or a canonical JSONL file")
    p_score.add_argument("--metric", required=True, choices=[m.value for m in Metric])
    p_score.add_argument("--bundle-dir", type=Path, help="bundle directory (or root with per-metric subdirectories)")
    p_score.add_argument("--text-a", help="first text (the reference side)")
    p_score.add_argument("--text-b", help="second text (the candidate side)")
    p_score.add_argument("--pairs", type=Path, help="canonical JSONL file to stream")
    p_score.add_argument("--cache-dir", type=Path, help="optional score cache directory")
    p_score.add_argument("--no-clamp", action="store_true", help="report raw values without clamping")

    p_bench = sub.add_parser("benchmark", help="score a dataset and persist the run")
    p_bench.add_argument("--dataset", required=True, choices=sorted(_DATASET_CHOICES))
    p_bench.add_argument("--data", required=True, type=Path, help="dataset file path")
    p_bench.add_argument("--metrics", required=True, help="comma-separated metric list")
    p_bench.add_argument("--bundles", type=Path, help="directory with per-metric bundle subdirectories")
    p_bench.add_argument("--out", required=True, type=Path, help="output directory for runs")
    p_bench.add_argument("--split", default="", help="split name recorded in the run")
    p_bench.add_argument("--subset", type=int, default=None, metavar="N")
    p_bench.add_argument("--seed", type=int, default=42, metavar="S")
    p_bench.add_argument("--stratify", action="store_true")
    p_bench.add_argument("--length-split", action="store_true")
    p_bench.add_argument("--cache-dir", type=Path, default=None, help="score cache (default: <out>/cache)")
    p_bench.add_argument("--no-cache", action="store_true")
    p_bench.add_argument("--batch-size", type=int, default=16)
    p_bench.add_argument("--workers", type=int, default=1)
    p_bench.add_argument("--lenient", action="store_true", help="skip malformed dataset rows")
    p_bench.add_argument("--no-clamp", action="store_true")

    p_report = sub.add_parser("report", help="summary table over saved runs")
    p_report.add_argument("--runs", required=True, nargs="+", type=Path, help="run directories (or parents of them)")
    p_report.add_argument("--format", default="md", choices=["csv", "json", "md"])
    p_report.add_argument("--figures", action="store_true", help="render figures into each run directory")
    return parser


def _parse_metrics(raw: str) -> list[Metric]:
    metrics = []
    for item in raw.split(","):
        name = item.strip()
        if not name:
            continue
        try:
            metrics.append(Metric(name))
        except ValueError:
            raise ConfigError(f"unknown metric {name!r}") from None
    if not metrics:
        raise ConfigError("empty metric list")
    return metrics


def _cmd_score(args) -> int:
    metric = Metric(args.metric)
    bundles = resolve_bundles(args.bundle_dir, [metric]) if args.bundle_dir else resolve_bundles(None, [metric])
    cache = ScoreCache(args.cache_dir) if args.cache_dir else None
    clamp = not args.no_clamp

    if args.pairs is not None:
        sys.stdout.write("id,metric,score\n")
        with open(args.pairs, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ParseError(f"invalid JSON: {exc}", path=args.pairs, line=line_no) from exc
                dataset = from_canonical([record])
                pair, _ = dataset.pairs[0]
                score = score_pair(metric, pair, bundles, clamp=clamp, cache=cache)
                sys.stdout.write(f"{pair.id},{metric.value},{score.score!r}\n")
                sys.stdout.flush()
        return EXIT_OK

    if args.text_a is None or args.text_b is None:
        raise ConfigError("score needs either --pairs or both --text-a and --text-b")
    pair = SentencePair(id="cli", text_a=args.text_a, text_b=args.text_b)
    score = score_pair(metric, pair, bundles, clamp=clamp, cache=cache)
    sys.stdout.write(f"{score.score!r}\n")
    return EXIT_OK


def _cmd_benchmark(args) -> int:
    metrics = _parse_metrics(args.metrics)
    source = DatasetSource(kind=_DATASET_CHOICES[args.dataset], path=args.data, split=args.split)
    cache_dir = None if args.no_cache else (args.cache_dir or args.out / "cache")
    options = RunOptions(
        bundles_dir=args.bundles,
        cache_dir=cache_dir,
        subset_n=args.subset,
        seed=args.seed,
        stratify=args.stratify,
        length_split=args.length_split,
        batch_size=args.batch_size,
        workers=args.workers,
        clamp=not args.no_clamp,
        lenient=args.lenient,
    )
    run = run_benchmark(source, metrics, options)
    run_dir = save_run(run, args.out)
    sys.stdout.write(f"run: {run_dir}\n")
    sys.stdout.write(summary_table([run]) + "\n")
    if run.partial:
        sys.stderr.write(f"partial run: {len(run.failures)} pair/metric failures\n")
        return EXIT_PARTIAL
    return EXIT_OK


def _is_run_dir(path: Path) -> bool:
    return (path / "manifest.json").is_file()


def _cmd_report(args) -> int:
    run_dirs: list[Path] = []
    for path in args.runs:
        if _is_run_dir(path):
            run_dirs.append(path)
        elif path.is_dir():
            run_dirs.extend(sorted(child for child in path.iterdir() if _is_run_dir(child)))
        else:
            raise ConfigError(f"not a run directory: {path}")
    if not run_dirs:
        raise ConfigError("no runs found")
    runs = [load_run(d) for d in run_dirs]
    sys.stdout.write(summary_table(runs, fmt=args.format) + "\n")
    if args.figures:
        for run_dir, run in zip(run_dirs, runs):
            files = emit_figures(run, run_dir / "figures")
            for f in files:
                sys.stderr.write(f"figure: {f}\n")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "score":
            return _cmd_score(args)
        if args.command == "benchmark":
            return _cmd_benchmark(args)
        return _cmd_report(args)
    except DataError as exc:
        sys.stderr.write(f"data error: {exc}\n")
        return EXIT_DATA
    except ConfigError as exc:
        sys.stderr.write(f"configuration error: {exc}\n")
        return EXIT_CONFIG
    except SemsimError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
