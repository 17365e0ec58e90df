"""semsim: semantic-similarity metrics and a benchmark harness.

Four pairwise similarity metrics over a shared [0, 1] score contract —
sentence BLEU, greedy token-matching F1, pooled-embedding cosine, and a
regression-model score — plus dataset loaders, benchmark statistics
(correlation, class summaries, ROC/AUC, length splits), a content-addressed
score cache, and a CLI for runs, tables, and figures.
"""

from .backend import (
    BundleKind,
    EncodedInput,
    ModelBundle,
    Pooling,
    TokenEmbeddings,
    encode_tokens,
    load_bundle,
    mean_pool,
    run_regression,
    tokenize_pair,
)
from .bench import (
    BenchmarkRun,
    RunOptions,
    emit_figures,
    load_run,
    run_benchmark,
    save_run,
    score_pair,
    summary_table,
)
from .cache import CacheKey, ScoreCache
from .ingest import (
    DatasetSource,
    SourceKind,
    from_canonical,
    load_dataset,
    subset,
    to_canonical,
    write_canonical,
)
from .metrics import (
    MatchReport,
    StsConfig,
    bertscore_score,
    bleu_tokenize,
    cosine,
    ensemble_score,
    sbert_score,
    sentence_bleu,
    sts_score,
    token_match_score,
)
from .stats import (
    ClassSummary,
    CorrelationReport,
    RocResult,
    class_summary,
    correlation_report,
    median_length_split,
    pearson,
    roc_auc,
    spearman,
)
from .types import (
    DatasetName,
    Label,
    LabelKind,
    LabeledDataset,
    Metric,
    MetricScore,
    SentencePair,
    Violation,
    validate_dataset,
)

__version__ = "0.1.0"
