"""Domain types shared by every metric and the benchmark harness.

All types are immutable after construction and safe to share across
threads. Scores are always reported in [0, 1]; the pre-clamp value is
kept alongside so downstream analysis stays honest about out-of-range
model outputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import SchemaViolationError

__all__ = [
    "LabelKind",
    "Metric",
    "DatasetName",
    "SentencePair",
    "Label",
    "LabeledDataset",
    "MetricScore",
    "Violation",
    "clamp01",
    "validate_dataset",
]


class LabelKind(str, Enum):
    SIMILARITY_0_5 = "similarity_0_5"
    BINARY = "binary"
    MQM = "mqm"


class Metric(str, Enum):
    BLEU = "bleu"
    BERTSCORE = "bertscore"
    SBERT = "sbert"
    STS = "sts"
    ENSEMBLE = "ensemble"


class DatasetName(str, Enum):
    STSB = "stsb"
    MRPC = "mrpc"
    QQP = "qqp"
    WMT22_ZH_EN = "wmt22_zh_en"
    CUSTOM = "custom"


def clamp01(x: float) -> float:
    """Clamp a value into [0, 1]."""
    if x < 0.0:
        return 0.0
    if x > 1.0:
        return 1.0
    return float(x)


@dataclass(frozen=True)
class SentencePair:
    """Two texts plus an identifier; the unit every metric scores."""

    id: str
    text_a: str
    text_b: str


@dataclass(frozen=True)
class Label:
    kind: LabelKind
    value: float

    def is_valid(self) -> bool:
        v = self.value
        if v != v or v in (float("inf"), float("-inf")):  # non-finite
            return False
        if self.kind is LabelKind.SIMILARITY_0_5:
            return 0.0 <= v <= 5.0
        if self.kind is LabelKind.BINARY:
            return v in (0.0, 1.0)
        return True  # mqm: any finite value


@dataclass(frozen=True)
class LabeledDataset:
    """Ordered sentence pairs with task-typed labels.

    Pair order is preserved exactly as loaded so that repeated loads of
    the same file produce identical datasets.
    """

    name: DatasetName
    split: str
    pairs: tuple[tuple[SentencePair, Label], ...]

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def label_kind(self) -> LabelKind | None:
        return self.pairs[0][1].kind if self.pairs else None

    def label_values(self) -> list[float]:
        return [label.value for _, label in self.pairs]

    def pair_ids(self) -> list[str]:
        return [pair.id for pair, _ in self.pairs]


@dataclass(frozen=True)
class MetricScore:
    """One metric's output for one pair.

    ``score`` is the clamped value in [0, 1]; ``raw`` is the value before
    the final clamp. ``model_fingerprint`` is empty for model-free metrics
    (BLEU).
    """

    pair_id: str
    metric: Metric
    score: float
    raw: float
    model_fingerprint: str = ""

    def to_record(self) -> dict:
        # Field names are part of the on-disk cache contract.
        return {
            "pair_id": self.pair_id,
            "metric": self.metric.value,
            "score": self.score,
            "raw": self.raw,
            "model_fingerprint": self.model_fingerprint,
        }

    @classmethod
    def from_record(cls, record: dict) -> "MetricScore":
        try:
            return cls(
                pair_id=str(record["pair_id"]),
                metric=Metric(record["metric"]),
                score=float(record["score"]),
                raw=float(record["raw"]),
                model_fingerprint=str(record["model_fingerprint"]),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise SchemaViolationError(f"malformed score record: {exc}") from exc


@dataclass(frozen=True)
class Violation:
    """A single dataset-invariant violation; data, not an error."""

    pair_id: str
    rule: str
    detail: str


def validate_dataset(dataset: LabeledDataset) -> list[Violation]:
    """Check every dataset invariant and return the violations found.

    Returns an empty list iff the dataset is well formed. Rules checked:
    nonempty unique ids, texts nonempty after whitespace trimming, a
    single label kind across the dataset, and per-kind label ranges.
    """
    violations: list[Violation] = []
    seen_ids: set[str] = set()
    expected_kind = dataset.label_kind

    for pair, label in dataset.pairs:
        if not pair.id:
            violations.append(Violation(pair.id, "id-nonempty", "pair id is empty"))
        elif pair.id in seen_ids:
            violations.append(
                Violation(pair.id, "id-unique", "pair id appears more than once")
            )
        seen_ids.add(pair.id)

        if not pair.text_a.strip():
            violations.append(
                Violation(pair.id, "text-nonempty", "text_a is empty after trimming")
            )
        if not pair.text_b.strip():
            violations.append(
                Violation(pair.id, "text-nonempty", "text_b is empty after trimming")
            )

        if label.kind is not expected_kind:
            violations.append(
                Violation(
                    pair.id,
                    "label-kind-uniform",
                    f"label kind {label.kind.value} differs from {expected_kind.value}",
                )
            )
        if not label.is_valid():
            violations.append(
                Violation(
                    pair.id,
                    "label-range",
                    f"value {label.value!r} invalid for kind {label.kind.value}",
                )
            )

    return violations
