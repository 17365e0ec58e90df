"""Benchmark orchestration: runs, persisted results, tables, figures."""

from .runner import (
    BenchmarkRun,
    BinaryReport,
    LengthSplitReport,
    RunOptions,
    load_run,
    resolve_bundles,
    run_benchmark,
    save_run,
    score_pair,
)
from .tables import summary_table
from .figures import emit_figures

__all__ = [
    "RunOptions",
    "BenchmarkRun",
    "BinaryReport",
    "LengthSplitReport",
    "run_benchmark",
    "score_pair",
    "resolve_bundles",
    "save_run",
    "load_run",
    "summary_table",
    "emit_figures",
]
