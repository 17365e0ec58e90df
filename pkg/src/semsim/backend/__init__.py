"""Inference backend: portable model bundles and their graph runtimes."""

from .bundle import BundleKind, ModelBundle, Pooling, compute_fingerprint, load_bundle, write_fingerprint
from .inference import (
    DEFAULT_BATCH_SIZE,
    EncodedInput,
    TokenEmbeddings,
    encode_tokens,
    encode_tokens_batch,
    mean_pool,
    run_regression,
    run_regression_batch,
    tokenize_pair,
    tokenize_text,
)

__all__ = [
    "BundleKind",
    "Pooling",
    "ModelBundle",
    "load_bundle",
    "compute_fingerprint",
    "write_fingerprint",
    "EncodedInput",
    "TokenEmbeddings",
    "tokenize_pair",
    "tokenize_text",
    "run_regression",
    "run_regression_batch",
    "encode_tokens",
    "encode_tokens_batch",
    "mean_pool",
    "DEFAULT_BATCH_SIZE",
]
