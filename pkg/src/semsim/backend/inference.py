"""Tokenization and inference on loaded bundles.

Every operation here is a pure function of (bundle fingerprint, inputs):
identical calls produce identical outputs, concurrent calls behave like
serial ones, and the internal batch size never changes results beyond
float noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import (
    AllTokensExcludedError,
    EmptyTextError,
    InferenceError,
    TokenizerError,
)
from .bundle import BundleKind, ModelBundle

__all__ = [
    "DEFAULT_BATCH_SIZE",
    "EncodedInput",
    "TokenEmbeddings",
    "tokenize_pair",
    "tokenize_text",
    "run_regression",
    "run_regression_batch",
    "encode_tokens",
    "encode_tokens_batch",
    "mean_pool",
]

DEFAULT_BATCH_SIZE = 16


@dataclass(frozen=True)
class EncodedInput:
    """A tokenized input ready for graph execution."""

    token_ids: tuple[int, ...]
    attention_mask: tuple[int, ...]
    type_ids: tuple[int, ...]
    special_mask: tuple[int, ...]
    pair_boundary: int | None = None

    def __post_init__(self):
        n = len(self.token_ids)
        if not (len(self.attention_mask) == len(self.type_ids) == len(self.special_mask) == n):
            raise TokenizerError("encoding field lengths disagree")
        if not any(self.attention_mask):
            raise TokenizerError("encoding has no attended tokens")

    def __len__(self) -> int:
        return len(self.token_ids)


@dataclass(frozen=True)
class TokenEmbeddings:
    """Per-token vectors plus attention and special-token flags."""

    vectors: np.ndarray  # [tokens, hidden], float64
    mask: np.ndarray  # [tokens], {0,1}
    special: np.ndarray  # [tokens], bool

    def __post_init__(self):
        if self.vectors.ndim != 2 or len(self.vectors) != len(self.mask):
            raise InferenceError("embedding row count disagrees with mask length")
        if len(self.mask) != len(self.special):
            raise InferenceError("mask and special flags disagree")
        if not np.isfinite(self.vectors).all():
            raise InferenceError("non-finite embedding values")


def _require_text(text: str, which: str) -> str:
    if not text or not text.strip():
        raise EmptyTextError(f"{which} is empty")
    return text


def _encode(bundle: ModelBundle, text_a: str, text_b: str | None) -> EncodedInput:
    try:
        if text_b is None:
            enc = bundle.tokenizer.encode(text_a)
        else:
            enc = bundle.tokenizer.encode(text_a, text_b)
    except Exception as exc:
        raise TokenizerError(f"tokenization failed: {exc}") from exc

    if len(enc.ids) > bundle.max_len:
        raise TokenizerError(
            f"encoding length {len(enc.ids)} exceeds max_len {bundle.max_len}"
        )
    boundary = None
    if text_b is not None:
        for i, seq in enumerate(enc.sequence_ids):
            if seq == 1:
                boundary = i
                break
    return EncodedInput(
        token_ids=tuple(enc.ids),
        attention_mask=tuple(enc.attention_mask),
        type_ids=tuple(enc.type_ids),
        special_mask=tuple(enc.special_tokens_mask),
        pair_boundary=boundary,
    )


def tokenize_pair(bundle: ModelBundle, text_a: str, text_b: str) -> EncodedInput:
    """Joint pair encoding with model-specific separators, truncated to
    max_len with the tokenizer's longest-first pair strategy."""
    if bundle.kind is not BundleKind.REGRESSION_PAIR:
        raise TokenizerError("pair tokenization requires a regression_pair bundle")
    _require_text(text_a, "text_a")
    _require_text(text_b, "text_b")
    return _encode(bundle, text_a, text_b)


def tokenize_text(bundle: ModelBundle, text: str) -> EncodedInput:
    _require_text(text, "text")
    return _encode(bundle, text, None)


def _pad_id(bundle: ModelBundle) -> int:
    for token in ("[PAD]", "<pad>"):
        token_id = bundle.tokenizer.token_to_id(token)
        if token_id is not None:
            return int(token_id)
    return 0


def _batch_arrays(bundle: ModelBundle, encoded: list[EncodedInput]):
    width = max(len(e) for e in encoded)
    pad = _pad_id(bundle)
    ids = np.full((len(encoded), width), pad, dtype=np.int64)
    mask = np.zeros((len(encoded), width), dtype=np.int64)
    types = np.zeros((len(encoded), width), dtype=np.int64)
    for row, enc in enumerate(encoded):
        n = len(enc)
        ids[row, :n] = enc.token_ids
        mask[row, :n] = enc.attention_mask
        types[row, :n] = enc.type_ids
    return ids, mask, types


def run_regression_batch(
    bundle: ModelBundle,
    encoded: list[EncodedInput],
    batch_size: int = DEFAULT_BATCH_SIZE,
) -> list[float]:
    """Run the regression graph over encodings, padding within batches."""
    if bundle.kind is not BundleKind.REGRESSION_PAIR:
        raise InferenceError("run_regression requires a regression_pair bundle")
    logits: list[float] = []
    for start in range(0, len(encoded), batch_size):
        chunk = encoded[start : start + batch_size]
        ids, mask, types = _batch_arrays(bundle, chunk)
        try:
            out = bundle.graph.regression(ids, mask, types)
        except InferenceError:
            raise
        except Exception as exc:
            raise InferenceError(f"graph execution failed: {exc}") from exc
        if not np.isfinite(out).all():
            raise InferenceError("regression graph produced non-finite logits")
        logits.extend(float(v) for v in out)
    return logits


def run_regression(bundle: ModelBundle, encoded: EncodedInput) -> float:
    """Raw regression logit for one encoded pair."""
    return run_regression_batch(bundle, [encoded], batch_size=1)[0]


def encode_tokens_batch(
    bundle: ModelBundle,
    texts: list[str],
    batch_size: int = DEFAULT_BATCH_SIZE,
) -> list[TokenEmbeddings]:
    """Per-token vectors for each text, from the bundle's encoder layer."""
    if bundle.kind is not BundleKind.ENCODER:
        raise InferenceError("encode_tokens requires an encoder bundle")
    encoded = [tokenize_text(bundle, text) for text in texts]
    out: list[TokenEmbeddings] = []
    for start in range(0, len(encoded), batch_size):
        chunk = encoded[start : start + batch_size]
        ids, mask, types = _batch_arrays(bundle, chunk)
        try:
            hidden = bundle.graph.encode(ids, mask, types)
        except InferenceError:
            raise
        except Exception as exc:
            raise InferenceError(f"graph execution failed: {exc}") from exc
        for row, enc in enumerate(chunk):
            n = len(enc)
            out.append(
                TokenEmbeddings(
                    vectors=np.array(hidden[row, :n], dtype=np.float64),
                    mask=np.array(enc.attention_mask, dtype=np.int64),
                    special=np.array(enc.special_mask, dtype=bool),
                )
            )
    return out


def encode_tokens(bundle: ModelBundle, text: str) -> TokenEmbeddings:
    return encode_tokens_batch(bundle, [text], batch_size=1)[0]


def mean_pool(embeddings: TokenEmbeddings) -> np.ndarray:
    """Arithmetic mean over attended, non-special token vectors."""
    eligible = (embeddings.mask == 1) & ~embeddings.special
    if not eligible.any():
        raise AllTokensExcludedError("no attended non-special tokens to pool")
    return embeddings.vectors[eligible].mean(axis=0)
