"""Benchmark statistics: correlation, per-class summaries, ROC/AUC, and
median length splits.

All functions are pure and operate on in-memory vectors. Conventions that
matter for comparability are fixed here: sample (n-1) standard deviation,
tie-aware average ranks for Spearman, AUC as the Mann-Whitney statistic
with ties counted half, and pair length as the mean of the two texts'
character counts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConstantInputError,
    EmptyClassError,
    LengthMismatchError,
    SingleClassError,
)
from .types import LabeledDataset

__all__ = [
    "CorrelationReport",
    "ClassSummary",
    "RocResult",
    "pearson",
    "spearman",
    "correlation_report",
    "class_summary",
    "roc_auc",
    "pair_length",
    "median_length_split",
]


@dataclass(frozen=True)
class CorrelationReport:
    pearson_r: float
    spearman_rho: float
    n: int


@dataclass(frozen=True)
class ClassSummary:
    class_label: int
    mean: float
    std: float
    n: int


@dataclass(frozen=True)
class RocResult:
    points: tuple[tuple[float, float], ...]  # (fpr, tpr), from (0,0) to (1,1)
    auc: float


def _paired_arrays(xs, ys) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.ndim != 1 or y.ndim != 1 or len(x) != len(y):
        raise LengthMismatchError(f"inputs must be equal-length vectors, got {len(x)} and {len(y)}")
    if len(x) < 2:
        raise LengthMismatchError("need at least two observations")
    return x, y


def pearson(xs, ys) -> float:
    """Linear correlation coefficient.

    Raises ConstantInputError when either input is constant; the
    coefficient is undefined there and must never be silently reported
    as zero.
    """
    x, y = _paired_arrays(xs, ys)
    if np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
        raise ConstantInputError("correlation undefined for constant input")
    dx = x - x.mean()
    dy = y - y.mean()
    return float(np.dot(dx, dy) / np.sqrt(np.dot(dx, dx) * np.dot(dy, dy)))


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks; ties receive the mean of the ranks they span."""
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(len(values), dtype=np.float64)
    sorted_vals = values[order]
    i = 0
    n = len(values)
    while i < n:
        j = i
        while j + 1 < n and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(xs, ys) -> float:
    """Rank correlation: Pearson of tie-averaged ranks."""
    x, y = _paired_arrays(xs, ys)
    if np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
        raise ConstantInputError("correlation undefined for constant input")
    return pearson(_average_ranks(x), _average_ranks(y))


def correlation_report(xs, ys) -> CorrelationReport:
    x, y = _paired_arrays(xs, ys)
    return CorrelationReport(pearson_r=pearson(x, y), spearman_rho=spearman(x, y), n=len(x))


def _binary_split(scores, labels) -> tuple[np.ndarray, np.ndarray]:
    s = np.asarray(scores, dtype=np.float64)
    l = np.asarray(labels, dtype=np.float64)
    if s.ndim != 1 or l.ndim != 1 or len(s) != len(l):
        raise LengthMismatchError("scores and labels must be equal-length vectors")
    if not np.all((l == 0.0) | (l == 1.0)):
        raise ValueError("labels must be binary (0 or 1)")
    return s[l == 0.0], s[l == 1.0]


def class_summary(scores, labels) -> tuple[ClassSummary, ClassSummary]:
    """Per-class mean and sample standard deviation (divisor n-1).

    Returns (negative-class summary, positive-class summary).
    """
    neg, pos = _binary_split(scores, labels)
    if len(neg) == 0 or len(pos) == 0:
        raise EmptyClassError("both classes must be nonempty")

    def _summary(vals: np.ndarray, label: int) -> ClassSummary:
        std = float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0
        return ClassSummary(class_label=label, mean=float(vals.mean()), std=std, n=len(vals))

    return _summary(neg, 0), _summary(pos, 1)


def roc_auc(scores, labels) -> RocResult:
    """ROC points by threshold sweep and AUC as the Mann-Whitney statistic.

    AUC is the fraction of (positive, negative) score pairs where the
    positive outscores the negative, ties counted half. The point list
    starts at (0,0), ends at (1,1), and is nondecreasing in both
    coordinates; its trapezoidal area equals the AUC.
    """
    neg, pos = _binary_split(scores, labels)
    if len(neg) == 0 or len(pos) == 0:
        raise SingleClassError("ROC needs both classes present")
    n_pos, n_neg = len(pos), len(neg)

    s = np.asarray(scores, dtype=np.float64)
    l = np.asarray(labels, dtype=np.float64)
    ranks = _average_ranks(s)
    # rank-sum form of the pairwise comparison count, exact for ties
    auc = float((ranks[l == 1.0].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))

    # sweep thresholds over distinct scores, highest first; predict
    # positive when score >= threshold
    order = np.argsort(-s, kind="mergesort")
    sorted_scores = s[order]
    sorted_labels = l[order]
    points: list[tuple[float, float]] = [(0.0, 0.0)]
    tp = fp = 0
    i = 0
    n = len(s)
    while i < n:
        j = i
        while j + 1 < n and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        group = sorted_labels[i : j + 1]
        tp += int((group == 1.0).sum())
        fp += int((group == 0.0).sum())
        points.append((fp / n_neg, tp / n_pos))
        i = j + 1
    return RocResult(points=tuple(points), auc=auc)


def pair_length(text_a: str, text_b: str) -> float:
    """Pair length convention: arithmetic mean of character counts."""
    return 0.5 * (len(text_a) + len(text_b))


def median_length_split(
    dataset: LabeledDataset,
) -> tuple[LabeledDataset, LabeledDataset, float]:
    """Split a dataset at the median pair length.

    Pairs strictly shorter than the median go to the first subset;
    pairs equal to or longer than the median go to the second. Order
    within each subset is preserved.
    """
    if len(dataset) == 0:
        raise LengthMismatchError("cannot split an empty dataset")
    lengths = np.array(
        [pair_length(p.text_a, p.text_b) for p, _ in dataset.pairs], dtype=np.float64
    )
    median = float(np.median(lengths))
    shorter = tuple(pl for pl, ln in zip(dataset.pairs, lengths) if ln < median)
    longer = tuple(pl for pl, ln in zip(dataset.pairs, lengths) if ln >= median)
    return (
        LabeledDataset(name=dataset.name, split=dataset.split, pairs=shorter),
        LabeledDataset(name=dataset.name, split=dataset.split, pairs=longer),
        median,
    )
