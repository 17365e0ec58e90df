"""Figure rendering for benchmark runs, written as vector graphics (SVG).

Graded datasets get one label-vs-score scatter per metric with the
identity diagonal drawn (labels rescaled to [0, 1]: graded 0-5 labels are
divided by 5; unbounded quality labels are min-max rescaled for the
diagonal comparison only). Binary datasets get per-metric, per-class score
densities plus one combined ROC panel with the AUC in the legend.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import seaborn as sns

from ..stats import roc_auc
from ..types import LabelKind
from .runner import BenchmarkRun

__all__ = ["emit_figures"]


def _rescaled_labels(values: np.ndarray, kind: LabelKind) -> np.ndarray:
    if kind is LabelKind.SIMILARITY_0_5:
        return values / 5.0
    span = values.max() - values.min()
    if span == 0:
        return np.zeros_like(values)
    return (values - values.min()) / span


def _scored(run: BenchmarkRun, metric):
    labels = []
    scores = []
    for (pair, label), score in zip(run.dataset.pairs, run.scores[metric]):
        if score is not None:
            labels.append(label.value)
            scores.append(score.score)
    return np.asarray(labels), np.asarray(scores)


def emit_figures(run: BenchmarkRun, out_dir: Path | str) -> list[Path]:
    """Render the run's figures into ``out_dir`` and return the file list."""
    out_dir = Path(out_dir)
    files: list[Path] = []
    if not run.metrics:
        return files
    out_dir.mkdir(parents=True, exist_ok=True)
    kind = run.dataset.label_kind

    if kind in (LabelKind.SIMILARITY_0_5, LabelKind.MQM):
        for metric in run.metrics:
            labels, scores = _scored(run, metric)
            if len(labels) == 0:
                continue
            fig, ax = plt.subplots(figsize=(4.5, 4.5))
            ax.scatter(_rescaled_labels(labels, kind), scores, s=8, alpha=0.4)
            ax.plot([0, 1], [0, 1], color="black", linewidth=1)
            ax.set_xlabel("label (rescaled to [0, 1])")
            ax.set_ylabel("similarity score")
            ax.set_title(metric.value)
            ax.set_xlim(-0.02, 1.02)
            ax.set_ylim(-0.02, 1.02)
            path = out_dir / f"scatter_{metric.value}.svg"
            fig.savefig(path, format="svg", bbox_inches="tight")
            plt.close(fig)
            files.append(path)
        return files

    # binary: per-metric class densities, then one combined ROC panel
    for metric in run.metrics:
        labels, scores = _scored(run, metric)
        if len(labels) == 0:
            continue
        fig, ax = plt.subplots(figsize=(5.0, 3.6))
        for class_value, name in ((0.0, "class 0"), (1.0, "class 1")):
            class_scores = scores[labels == class_value]
            if len(class_scores) > 1 and np.ptp(class_scores) > 0:
                sns.kdeplot(class_scores, ax=ax, label=name, fill=True, alpha=0.3)
            else:
                ax.hist(class_scores, bins=10, range=(0, 1), density=True, alpha=0.4, label=name)
        ax.set_xlabel("similarity score")
        ax.set_ylabel("density")
        ax.set_title(metric.value)
        ax.legend()
        path = out_dir / f"density_{metric.value}.svg"
        fig.savefig(path, format="svg", bbox_inches="tight")
        plt.close(fig)
        files.append(path)

    fig, ax = plt.subplots(figsize=(4.8, 4.8))
    drew_any = False
    for metric in run.metrics:
        labels, scores = _scored(run, metric)
        if len(labels) == 0 or len(set(labels)) < 2:
            continue
        roc = roc_auc(scores, labels)
        xs = [p[0] for p in roc.points]
        ys = [p[1] for p in roc.points]
        ax.plot(xs, ys, label=f"{metric.value} (AUC={roc.auc:.2f})")
        drew_any = True
    if drew_any:
        ax.plot([0, 1], [0, 1], color="grey", linestyle="--", linewidth=1)
        ax.set_xlabel("false positive rate")
        ax.set_ylabel("true positive rate")
        ax.legend(loc="lower right")
        path = out_dir / "roc.svg"
        fig.savefig(path, format="svg", bbox_inches="tight")
        files.append(path)
    plt.close(fig)
    return files
