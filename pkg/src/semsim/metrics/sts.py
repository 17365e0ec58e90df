"""Regression-based similarity scoring and the three-metric ensemble.

A fine-tuned sentence-pair regression model predicts similarity on a 0-5
scale; dividing the logit by that scale yields a direct [0, 1] similarity
estimate. Real logits can drift slightly outside the training range, so
scores are clamped by default while the raw value is always preserved;
disabling the clamp reproduces the unmodified logit/scale output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from ..backend import ModelBundle, run_regression, tokenize_pair
from ..errors import EnsembleError
from ..types import Metric, MetricScore, SentencePair, clamp01

__all__ = [
    "StsConfig",
    "ENSEMBLE_COMPONENTS",
    "score_from_logit",
    "sts_score",
    "ensemble_score",
    "sts_cache_config",
    "ensemble_fingerprint",
]

ENSEMBLE_COMPONENTS = (Metric.STS, Metric.SBERT, Metric.BERTSCORE)


@dataclass(frozen=True)
class StsConfig:
    bundle: ModelBundle
    scale: float = 5.0
    clamp: bool = True

    def __post_init__(self):
        if not (self.scale > 0):
            raise ValueError("scale must be positive")


def score_from_logit(logit: float, scale: float = 5.0, clamp: bool = True) -> tuple[float, float]:
    """Map a regression logit to (score, raw) with raw = logit / scale."""
    raw = logit / scale
    return (clamp01(raw) if clamp else raw), raw


def sts_score(config: StsConfig, pair: SentencePair) -> MetricScore:
    """Score one pair with the regression bundle."""
    encoded = tokenize_pair(config.bundle, pair.text_a, pair.text_b)
    logit = run_regression(config.bundle, encoded)
    score, raw = score_from_logit(logit, scale=config.scale, clamp=config.clamp)
    return MetricScore(
        pair_id=pair.id,
        metric=Metric.STS,
        score=score,
        raw=raw,
        model_fingerprint=config.bundle.fingerprint,
    )


def ensemble_fingerprint(components: dict[Metric, str]) -> str:
    return "+".join(components.get(m, "") for m in ENSEMBLE_COMPONENTS)


def ensemble_score(scores: Sequence[MetricScore]) -> MetricScore:
    """Arithmetic mean of the three embedding-based metric scores.

    Requires exactly one score each for sts, sbert, and bertscore, all
    for the same pair. The mean of clamped inputs is already in [0, 1].
    """
    if len(scores) != 3:
        raise EnsembleError(f"ensemble needs exactly 3 component scores, got {len(scores)}")
    by_metric = {s.metric: s for s in scores}
    missing = [m.value for m in ENSEMBLE_COMPONENTS if m not in by_metric]
    if missing:
        raise EnsembleError(f"missing ensemble components: {', '.join(missing)}")
    pair_ids = {s.pair_id for s in scores}
    if len(pair_ids) != 1:
        raise EnsembleError(f"ensemble components disagree on pair id: {sorted(pair_ids)}")

    ordered = [by_metric[m] for m in ENSEMBLE_COMPONENTS]
    mean = math.fsum(s.score for s in ordered) / 3.0
    return MetricScore(
        pair_id=ordered[0].pair_id,
        metric=Metric.ENSEMBLE,
        score=mean,
        raw=mean,
        model_fingerprint=ensemble_fingerprint({s.metric: s.model_fingerprint for s in ordered}),
    )


def sts_cache_config(config: StsConfig) -> dict:
    return {"scale": config.scale, "clamp": config.clamp}
