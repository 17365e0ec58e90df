"""Summary tables across benchmark runs.

Rows are metrics; column groups come per dataset: (r, rho) for graded
datasets, ("neg mean (std)", "pos mean (std)") for binary ones. Values are
rounded half-up to two decimals on their shortest decimal representation,
so 0.895 renders as "0.90".
"""

from __future__ import annotations

import json
from decimal import ROUND_HALF_UP, Decimal

from ..errors import ConfigError
from ..types import Metric
from .runner import METRIC_ORDER, BenchmarkRun, BinaryReport

__all__ = ["round2", "summary_table"]


def round2(value: float) -> str:
    return str(Decimal(repr(value)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def _column_spec(run: BenchmarkRun) -> list[str]:
    first = next((s for s in run.summaries.values() if s is not None), None)
    if isinstance(first, BinaryReport):
        return ["neg", "pos"]
    return ["r", "rho"]


def _cells(summary, spec: list[str]) -> list[str]:
    if summary is None:
        return ["-"] * len(spec)
    if isinstance(summary, BinaryReport):
        return [
            f"{round2(summary.neg.mean)} ({round2(summary.neg.std)})",
            f"{round2(summary.pos.mean)} ({round2(summary.pos.std)})",
        ]
    return [round2(summary.pearson_r), round2(summary.spearman_rho)]


def _build(runs: list[BenchmarkRun]):
    if not runs:
        raise ConfigError("summary table needs at least one run")
    seen = set()
    for run in runs:
        key = (run.dataset.name.value, run.dataset.split)
        if key in seen:
            raise ConfigError(f"incompatible run mix: duplicate dataset {key}")
        seen.add(key)

    metrics = [m for m in METRIC_ORDER if any(m in run.summaries for run in runs)]
    groups = []
    for run in runs:
        label = run.dataset.name.value
        if run.dataset.split:
            label = f"{label}/{run.dataset.split}"
        groups.append((label, _column_spec(run), run))

    header = ["metric"]
    for label, spec, _ in groups:
        header.extend(f"{label} {col}" for col in spec)

    rows = []
    for metric in metrics:
        row = [metric.value]
        for _, spec, run in groups:
            row.extend(_cells(run.summaries.get(metric), spec))
        rows.append(row)
    return header, rows


def summary_table(runs: list[BenchmarkRun], fmt: str = "md") -> str:
    """Render a cross-dataset summary table as md, csv, or json text."""
    header, rows = _build(runs)
    if fmt == "md":
        lines = [
            "| " + " | ".join(header) + " |",
            "|" + "|".join(["---"] * len(header)) + "|",
        ]
        lines.extend("| " + " | ".join(row) + " |" for row in rows)
        return "\n".join(lines)
    if fmt == "csv":
        def esc(cell: str) -> str:
            return '"' + cell.replace('"', '""') + '"' if ("," in cell or '"' in cell) else cell

        lines = [",".join(esc(c) for c in header)]
        lines.extend(",".join(esc(c) for c in row) for row in rows)
        return "\n".join(lines)
    if fmt == "json":
        return json.dumps(
            {"columns": header, "rows": [dict(zip(header, row)) for row in rows]},
            indent=2,
            ensure_ascii=False,
        )
    raise ConfigError(f"unknown table format {fmt!r}")
