"""Benchmark runs: cache-first scoring of a dataset with a metric set,
summary statistics per dataset kind, and append-only run persistence.

A run directory holds four artifacts:

    runs/<run_id>/
      manifest.json   config digest, bundle fingerprints, row counts,
                      decisions in effect, timestamps
      scores.csv      pair_id,metric,score,raw,model_fingerprint
      summary.json    per-metric statistics (and length-split statistics)
      dataset.jsonl   the exact pairs scored, in canonical form

Rerunning with a warm cache reproduces scores and summaries bit-identically;
only run_id and timestamps differ.
"""

from __future__ import annotations

import csv
import datetime as _dt
import json
import platform
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..backend import DEFAULT_BATCH_SIZE, BundleKind, ModelBundle, load_bundle
from ..backend.inference import run_regression_batch, tokenize_pair
from ..cache import CacheKey, ScoreCache, config_digest
from ..errors import ConfigError, DataError, SemsimError, StatsError
from ..ingest import (
    DatasetSource,
    SourceKind,
    from_canonical,
    load_dataset_counted,
    subset,
    to_canonical,
)
from ..metrics import bleu as bleu_mod
from ..metrics import embed as embed_mod
from ..metrics import sts as sts_mod
from ..metrics.sts import ENSEMBLE_COMPONENTS, StsConfig, ensemble_score
from ..stats import (
    ClassSummary,
    CorrelationReport,
    RocResult,
    class_summary,
    correlation_report,
    median_length_split,
    roc_auc,
)
from ..types import (
    DatasetName,
    LabelKind,
    LabeledDataset,
    Metric,
    MetricScore,
    SentencePair,
    validate_dataset,
)

__all__ = [
    "RunOptions",
    "BinaryReport",
    "LengthSplitReport",
    "BenchmarkRun",
    "resolve_bundles",
    "score_pair",
    "run_benchmark",
    "save_run",
    "load_run",
]

SCORES_CSV_HEADER = "pair_id,metric,score,raw,model_fingerprint"

METRIC_ORDER = (Metric.BLEU, Metric.BERTSCORE, Metric.SBERT, Metric.STS, Metric.ENSEMBLE)

_MODEL_METRICS = {
    Metric.STS: BundleKind.REGRESSION_PAIR,
    Metric.SBERT: BundleKind.ENCODER,
    Metric.BERTSCORE: BundleKind.ENCODER,
}


@dataclass(frozen=True)
class RunOptions:
    bundles_dir: Path | None = None
    cache_dir: Path | None = None
    subset_n: int | None = None
    seed: int = 42
    stratify: bool = False
    length_split: bool = False
    batch_size: int = DEFAULT_BATCH_SIZE
    workers: int = 1
    clamp: bool = True
    lenient: bool = False


@dataclass(frozen=True)
class BinaryReport:
    neg: ClassSummary
    pos: ClassSummary
    roc: RocResult


@dataclass(frozen=True)
class LengthSplitReport:
    median: float
    shorter_n: int
    longer_n: int
    shorter: dict[Metric, CorrelationReport | BinaryReport | None]
    longer: dict[Metric, CorrelationReport | BinaryReport | None]


@dataclass
class BenchmarkRun:
    run_id: str
    source: DatasetSource
    dataset: LabeledDataset
    metrics: list[Metric]
    scores: dict[Metric, list[MetricScore | None]]
    summaries: dict[Metric, CorrelationReport | BinaryReport | None]
    manifest: dict
    length_split: LengthSplitReport | None = None
    failures: list[dict] = field(default_factory=list)
    partial: bool = False

    def scores_for(self, metric: Metric) -> list[MetricScore]:
        return [s for s in self.scores[metric] if s is not None]


def _bundle_search_paths(bundles_dir: Path, metric: Metric) -> list[Path]:
    return [bundles_dir / metric.value, bundles_dir]


def resolve_bundles(bundles_dir: Path | str | None, metrics: list[Metric]) -> dict[Metric, ModelBundle]:
    """Locate and load one bundle per model-backed metric.

    Layout convention: ``<bundles_dir>/<metric>/bundle.json`` per metric,
    or a single bundle directly under ``bundles_dir`` when it matches the
    required kind.
    """
    needed: set[Metric] = set()
    for metric in metrics:
        if metric is Metric.ENSEMBLE:
            needed.update(ENSEMBLE_COMPONENTS)
        elif metric in _MODEL_METRICS:
            needed.add(metric)
    if not needed:
        return {}
    if bundles_dir is None:
        raise ConfigError(
            f"metrics {sorted(m.value for m in needed)} need model bundles; pass a bundles directory"
        )
    bundles_dir = Path(bundles_dir)
    resolved: dict[Metric, ModelBundle] = {}
    loaded_by_path: dict[Path, ModelBundle] = {}
    for metric in sorted(needed, key=lambda m: m.value):
        kind = _MODEL_METRICS[metric]
        found = None
        for candidate in _bundle_search_paths(bundles_dir, metric):
            if (candidate / "bundle.json").is_file():
                if candidate not in loaded_by_path:
                    loaded_by_path[candidate] = load_bundle(candidate)
                bundle = loaded_by_path[candidate]
                if bundle.kind is kind:
                    found = bundle
                    break
        if found is None:
            raise ConfigError(
                f"no {kind.value} bundle for metric {metric.value!r} under {bundles_dir}"
            )
        resolved[metric] = found
    return resolved


def _metric_cache_config(metric: Metric, bundles: dict[Metric, ModelBundle], clamp: bool) -> dict:
    if metric is Metric.BLEU:
        return bleu_mod.cache_config()
    if metric is Metric.STS:
        bundle = bundles[metric]
        return sts_mod.sts_cache_config(StsConfig(bundle, scale=bundle.output_scale, clamp=clamp))
    if metric is Metric.SBERT:
        return embed_mod.sbert_cache_config(bundles[metric])
    if metric is Metric.BERTSCORE:
        return embed_mod.bertscore_cache_config(bundles[metric])
    raise ConfigError(f"no direct cache config for metric {metric.value}")


def score_pair(
    metric: Metric,
    pair: SentencePair,
    bundles: dict[Metric, ModelBundle],
    clamp: bool = True,
    cache: ScoreCache | None = None,
) -> MetricScore:
    """Score a single pair with one metric (ensemble included), cache-first."""
    if metric is Metric.ENSEMBLE:
        components = [score_pair(m, pair, bundles, clamp=clamp, cache=cache) for m in ENSEMBLE_COMPONENTS]
        return ensemble_score(components)

    key = None
    if cache is not None:
        fingerprint = bundles[metric].fingerprint if metric in _MODEL_METRICS else ""
        key = CacheKey.build(
            metric.value,
            fingerprint,
            pair.text_a,
            pair.text_b,
            config_digest(_metric_cache_config(metric, bundles, clamp)),
        )
        hit = cache.get(key)
        if hit is not None:
            return replace(hit, pair_id=pair.id)

    if metric is Metric.BLEU:
        score = bleu_mod.sentence_bleu(pair.text_b, pair.text_a, pair_id=pair.id)
    elif metric is Metric.STS:
        bundle = bundles[metric]
        score = sts_mod.sts_score(StsConfig(bundle, scale=bundle.output_scale, clamp=clamp), pair)
    elif metric is Metric.SBERT:
        score = embed_mod.sbert_score(bundles[metric], pair)
    elif metric is Metric.BERTSCORE:
        score, _ = embed_mod.bertscore_score(bundles[metric], pair)
    else:
        raise ConfigError(f"unknown metric {metric!r}")

    if cache is not None and key is not None:
        cache.put(key, score)
    return score


def _compute_sts_chunk(bundle, pairs, clamp, batch_size):
    encoded = [tokenize_pair(bundle, p.text_a, p.text_b) for p in pairs]
    logits = run_regression_batch(bundle, encoded, batch_size=batch_size)
    out = []
    for pair, logit in zip(pairs, logits):
        score, raw = sts_mod.score_from_logit(logit, scale=bundle.output_scale, clamp=clamp)
        out.append(
            MetricScore(
                pair_id=pair.id,
                metric=Metric.STS,
                score=score,
                raw=raw,
                model_fingerprint=bundle.fingerprint,
            )
        )
    return out


def _compute_chunk(
    metric: Metric,
    pairs: list[SentencePair],
    bundles: dict[Metric, ModelBundle],
    clamp: bool,
    batch_size: int,
) -> list[MetricScore]:
    if metric is Metric.BLEU:
        return [bleu_mod.sentence_bleu(p.text_b, p.text_a, pair_id=p.id) for p in pairs]
    if metric is Metric.STS:
        return _compute_sts_chunk(bundles[metric], pairs, clamp, batch_size)
    if metric is Metric.SBERT:
        return [embed_mod.sbert_score(bundles[metric], p) for p in pairs]
    if metric is Metric.BERTSCORE:
        return [embed_mod.bertscore_score(bundles[metric], p)[0] for p in pairs]
    raise ConfigError(f"metric {metric!r} is not directly computable")


def _score_metric_bulk(
    metric: Metric,
    dataset: LabeledDataset,
    bundles: dict[Metric, ModelBundle],
    cache: ScoreCache | None,
    options: RunOptions,
) -> tuple[list[MetricScore | None], list[dict]]:
    pairs = [pair for pair, _ in dataset.pairs]
    out: list[MetricScore | None] = [None] * len(pairs)
    failures: list[dict] = []

    keys: list[CacheKey | None] = [None] * len(pairs)
    todo: list[int] = []
    if cache is not None:
        fingerprint = bundles[metric].fingerprint if metric in _MODEL_METRICS else ""
        cfg = config_digest(_metric_cache_config(metric, bundles, options.clamp))
        for i, pair in enumerate(pairs):
            key = CacheKey.build(metric.value, fingerprint, pair.text_a, pair.text_b, cfg)
            keys[i] = key
            hit = cache.get(key)
            if hit is not None:
                out[i] = replace(hit, pair_id=pair.id)
            else:
                todo.append(i)
    else:
        todo = list(range(len(pairs)))

    chunk_size = max(options.batch_size, 1)
    chunks = [todo[i : i + chunk_size] for i in range(0, len(todo), chunk_size)]

    def _run_chunk(indices: list[int]) -> list[tuple[int, MetricScore | None, str | None]]:
        chunk_pairs = [pairs[i] for i in indices]
        try:
            scores = _compute_chunk(metric, chunk_pairs, bundles, options.clamp, options.batch_size)
            return [(i, s, None) for i, s in zip(indices, scores)]
        except SemsimError:
            # isolate the failing pair(s); the rest of the chunk still counts
            results = []
            for i, pair in zip(indices, chunk_pairs):
                try:
                    score = _compute_chunk(metric, [pair], bundles, options.clamp, options.batch_size)[0]
                    results.append((i, score, None))
                except SemsimError as exc:
                    results.append((i, None, f"{type(exc).__name__}: {exc}"))
            return results

    if options.workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=options.workers) as pool:
            chunk_results = list(pool.map(_run_chunk, chunks))
    else:
        chunk_results = [_run_chunk(chunk) for chunk in chunks]

    for chunk_result in chunk_results:
        for i, score, error in chunk_result:
            if error is not None:
                failures.append({"pair_id": pairs[i].id, "metric": metric.value, "error": error})
                continue
            out[i] = score
            if cache is not None and keys[i] is not None:
                cache.put(keys[i], score)
    return out, failures


def _summarize(
    metric_scores: list[MetricScore | None],
    dataset: LabeledDataset,
) -> CorrelationReport | BinaryReport | None:
    xs = []
    ys = []
    for (pair, label), score in zip(dataset.pairs, metric_scores):
        if score is not None:
            xs.append(label.value)
            ys.append(score.score)
    if len(xs) < 2:
        return None
    try:
        if dataset.label_kind is LabelKind.BINARY:
            neg, pos = class_summary(ys, xs)
            return BinaryReport(neg=neg, pos=pos, roc=roc_auc(ys, xs))
        return correlation_report(xs, ys)
    except StatsError:
        return None


def _length_split_report(
    dataset: LabeledDataset,
    scores: dict[Metric, list[MetricScore | None]],
    metrics: list[Metric],
) -> LengthSplitReport:
    shorter, longer, median = median_length_split(dataset)
    by_id: dict[Metric, dict[str, MetricScore | None]] = {
        m: {p.id: s for (p, _), s in zip(dataset.pairs, scores[m])} for m in metrics
    }

    def _half_summaries(half: LabeledDataset) -> dict[Metric, CorrelationReport | BinaryReport | None]:
        return {
            m: _summarize([by_id[m][p.id] for p, _ in half.pairs], half) for m in metrics
        }

    return LengthSplitReport(
        median=median,
        shorter_n=len(shorter),
        longer_n=len(longer),
        shorter=_half_summaries(shorter),
        longer=_half_summaries(longer),
    )


def _decisions(options: RunOptions, bundles: dict[Metric, ModelBundle]) -> dict:
    return {
        "clamp": options.clamp,
        "bleu_direction": "reference=text_a,candidate=text_b",
        "length_convention": "mean_chars",
        "idf_weighting": False,
        "rescale_baseline": {
            m.value: b.rescale_baseline for m, b in sorted(bundles.items(), key=lambda kv: kv[0].value)
        },
        "label_rescaling": "similarity_0_5 labels divided by 5 for plots",
        "table_rounding": "half-up-2dp",
        "cache_text_canonicalization": "NFC",
    }


def run_benchmark(
    source: DatasetSource,
    metrics: list[Metric],
    options: RunOptions = RunOptions(),
) -> BenchmarkRun:
    """Score a dataset with the requested metrics and summarize.

    Scores are cache-first when a cache directory is configured. If any
    pair fails, the run is marked partial and summaries cover the scored
    pairs only.
    """
    if not metrics:
        raise ConfigError("at least one metric is required")
    metrics = list(dict.fromkeys(metrics))  # dedupe, preserve order

    dataset, skipped_rows = load_dataset_counted(source, lenient=options.lenient)
    violations = validate_dataset(dataset)
    if violations:
        detail = "; ".join(f"{v.pair_id}: {v.rule}" for v in violations[:5])
        raise DataError(f"dataset failed validation ({len(violations)} violations): {detail}")
    if options.subset_n is not None:
        dataset = subset(dataset, options.subset_n, seed=options.seed, stratify=options.stratify)

    bundles = resolve_bundles(options.bundles_dir, metrics)
    cache = ScoreCache(options.cache_dir) if options.cache_dir is not None else None

    compute_metrics = [m for m in METRIC_ORDER if m in metrics and m is not Metric.ENSEMBLE]
    if Metric.ENSEMBLE in metrics:
        for component in ENSEMBLE_COMPONENTS:
            if component not in compute_metrics:
                compute_metrics.append(component)

    scores: dict[Metric, list[MetricScore | None]] = {}
    failures: list[dict] = []
    for metric in compute_metrics:
        metric_scores, metric_failures = _score_metric_bulk(metric, dataset, bundles, cache, options)
        scores[metric] = metric_scores
        failures.extend(metric_failures)

    if Metric.ENSEMBLE in metrics:
        ensemble: list[MetricScore | None] = []
        for i, (pair, _) in enumerate(dataset.pairs):
            components = [scores[m][i] for m in ENSEMBLE_COMPONENTS]
            if any(c is None for c in components):
                ensemble.append(None)
                failures.append(
                    {"pair_id": pair.id, "metric": Metric.ENSEMBLE.value, "error": "missing component score"}
                )
            else:
                ensemble.append(ensemble_score(components))
        scores[Metric.ENSEMBLE] = ensemble

    # keep only requested metrics in the run output (components computed
    # solely for the ensemble stay in the cache)
    scores = {m: scores[m] for m in METRIC_ORDER if m in metrics}

    summaries = {m: _summarize(scores[m], dataset) for m in scores}
    length_split = (
        _length_split_report(dataset, scores, list(scores)) if options.length_split else None
    )

    partial = any(s is None for metric_scores in scores.values() for s in metric_scores)
    created = _dt.datetime.now(_dt.timezone.utc)

    config_payload = {
        "dataset": {"kind": source.kind.value, "path": str(source.path), "split": source.split},
        "metrics": [m.value for m in scores],
        "options": {
            "subset_n": options.subset_n,
            "seed": options.seed,
            "stratify": options.stratify,
            "length_split": options.length_split,
            "lenient": options.lenient,
        },
        "bundles": {m.value: b.fingerprint for m, b in bundles.items()},
        "decisions": _decisions(options, bundles),
    }
    digest = config_digest(config_payload)
    run_id = (
        f"{dataset.name.value}-{source.split or 'all'}-{digest[:12]}-"
        f"{created.strftime('%Y%m%dT%H%M%S%fZ')}"
    )

    manifest = {
        "run_id": run_id,
        "created_utc": created.isoformat(),
        "dataset": {
            "kind": source.kind.value,
            "path": str(source.path),
            "split": source.split,
            "name": dataset.name.value,
            "rows": len(dataset),
            "skipped_rows": skipped_rows,
        },
        "metrics": [m.value for m in scores],
        "options": config_payload["options"] | {
            "batch_size": options.batch_size,
            "workers": options.workers,
        },
        "bundles": {
            m.value: {"path": str(b.path), "fingerprint": b.fingerprint}
            for m, b in sorted(bundles.items(), key=lambda kv: kv[0].value)
        },
        "decisions": config_payload["decisions"],
        "config_digest": digest,
        "failure_count": len(failures),
        "partial": partial,
        "versions": {"python": platform.python_version()},
    }

    return BenchmarkRun(
        run_id=run_id,
        source=source,
        dataset=dataset,
        metrics=list(scores),
        scores=scores,
        summaries=summaries,
        manifest=manifest,
        length_split=length_split,
        failures=failures,
        partial=partial,
    )


# --- persistence -------------------------------------------------------------


def _summary_to_json(summary) -> dict | None:
    if summary is None:
        return None
    if isinstance(summary, CorrelationReport):
        return {
            "kind": "correlation",
            "pearson_r": summary.pearson_r,
            "spearman_rho": summary.spearman_rho,
            "n": summary.n,
        }
    return {
        "kind": "binary",
        "neg": {"mean": summary.neg.mean, "std": summary.neg.std, "n": summary.neg.n},
        "pos": {"mean": summary.pos.mean, "std": summary.pos.std, "n": summary.pos.n},
        "auc": summary.roc.auc,
    }


def _summary_from_json(data: dict | None):
    if data is None:
        return None
    if data["kind"] == "correlation":
        return CorrelationReport(
            pearson_r=data["pearson_r"], spearman_rho=data["spearman_rho"], n=data["n"]
        )
    return BinaryReport(
        neg=ClassSummary(class_label=0, mean=data["neg"]["mean"], std=data["neg"]["std"], n=data["neg"]["n"]),
        pos=ClassSummary(class_label=1, mean=data["pos"]["mean"], std=data["pos"]["std"], n=data["pos"]["n"]),
        roc=RocResult(points=((0.0, 0.0), (1.0, 1.0)), auc=data["auc"]),
    )


def save_run(run: BenchmarkRun, out_dir: Path | str) -> Path:
    """Persist a run under ``<out_dir>/<run_id>/`` (append-only: the run
    directory must not already exist)."""
    run_dir = Path(out_dir) / run.run_id
    try:
        run_dir.mkdir(parents=True, exist_ok=False)
    except FileExistsError as exc:
        raise ConfigError(f"run directory already exists: {run_dir}") from exc

    with open(run_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(run.manifest, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")

    with open(run_dir / "scores.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write(SCORES_CSV_HEADER + "\n")
        for metric in run.metrics:
            for score in run.scores[metric]:
                if score is None:
                    continue
                fh.write(
                    f"{_csv_field(score.pair_id)},{score.metric.value},"
                    f"{score.score!r},{score.raw!r},{score.model_fingerprint}\n"
                )

    summary_doc = {
        "metrics": {m.value: _summary_to_json(run.summaries[m]) for m in run.metrics},
        "length_split": None,
    }
    if run.length_split is not None:
        ls = run.length_split
        summary_doc["length_split"] = {
            "median": ls.median,
            "shorter_n": ls.shorter_n,
            "longer_n": ls.longer_n,
            "shorter": {m.value: _summary_to_json(ls.shorter[m]) for m in ls.shorter},
            "longer": {m.value: _summary_to_json(ls.longer[m]) for m in ls.longer},
        }
    with open(run_dir / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary_doc, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")

    with open(run_dir / "dataset.jsonl", "w", encoding="utf-8") as fh:
        for record in to_canonical(run.dataset):
            fh.write(json.dumps(record, ensure_ascii=False))
            fh.write("\n")

    return run_dir


def _csv_field(value: str) -> str:
    if any(ch in value for ch in ',"\n'):
        return '"' + value.replace('"', '""') + '"'
    return value


def load_run(run_dir: Path | str) -> BenchmarkRun:
    """Reload a persisted run (scores, dataset, summaries, manifest)."""
    run_dir = Path(run_dir)
    with open(run_dir / "manifest.json", "r", encoding="utf-8") as fh:
        manifest = json.load(fh)

    records = []
    with open(run_dir / "dataset.jsonl", "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(json.loads(line))

    dataset = from_canonical(
        records,
        name=DatasetName(manifest["dataset"]["name"]),
        split=manifest["dataset"]["split"],
    )

    metrics = [Metric(m) for m in manifest["metrics"]]
    by_metric: dict[Metric, dict[str, MetricScore]] = {m: {} for m in metrics}
    with open(run_dir / "scores.csv", "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            metric = Metric(row["metric"])
            score = MetricScore(
                pair_id=row["pair_id"],
                metric=metric,
                score=float(row["score"]),
                raw=float(row["raw"]),
                model_fingerprint=row["model_fingerprint"],
            )
            by_metric.setdefault(metric, {})[score.pair_id] = score

    scores = {
        m: [by_metric[m].get(pair.id) for pair, _ in dataset.pairs] for m in metrics
    }

    with open(run_dir / "summary.json", "r", encoding="utf-8") as fh:
        summary_doc = json.load(fh)
    summaries = {m: _summary_from_json(summary_doc["metrics"].get(m.value)) for m in metrics}

    length_split = None
    if summary_doc.get("length_split"):
        ls = summary_doc["length_split"]
        length_split = LengthSplitReport(
            median=ls["median"],
            shorter_n=ls["shorter_n"],
            longer_n=ls["longer_n"],
            shorter={Metric(m): _summary_from_json(v) for m, v in ls["shorter"].items()},
            longer={Metric(m): _summary_from_json(v) for m, v in ls["longer"].items()},
        )

    source = DatasetSource(
        kind=SourceKind(manifest["dataset"]["kind"]),
        path=Path(manifest["dataset"]["path"]),
        split=manifest["dataset"]["split"],
    )
    return BenchmarkRun(
        run_id=manifest["run_id"],
        source=source,
        dataset=dataset,
        metrics=metrics,
        scores=scores,
        summaries=summaries,
        manifest=manifest,
        length_split=length_split,
        partial=bool(manifest.get("partial", False)),
    )
