"""Embedding-based metrics: greedy token-matching F1 and pooled-sentence
cosine similarity.

Token matching uses independent row/column maxima over the cosine matrix
of unit-normalized token vectors — each reference token takes its best
candidate match (recall) and vice versa (precision); no assignment solver
is involved. Special tokens are excluded: they carry no content and would
inflate similarity uniformly.

Raw cosines can be negative; reported scores are clamped into [0, 1] with
the pre-clamp value preserved. Direction convention: text_a is the
reference, text_b the candidate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..backend import ModelBundle, encode_tokens_batch, mean_pool
from ..errors import AllTokensExcludedError, ZeroVectorError
from ..types import Metric, MetricScore, SentencePair, clamp01

__all__ = [
    "MatchReport",
    "cosine",
    "match_report_from_embeddings",
    "token_match_score",
    "bertscore_score",
    "sbert_score",
    "sbert_cache_config",
    "bertscore_cache_config",
]


@dataclass(frozen=True)
class MatchReport:
    """Greedy-matching precision/recall/F1 for one pair.

    ``precision``, ``recall``, and ``f1`` reflect the optional baseline
    rescaling; ``raw_f1`` is the F1 before rescaling and clamping.
    """

    precision: float
    recall: float
    f1: float
    raw_f1: float


def cosine(u, v) -> float:
    """Cosine similarity of two nonzero vectors, in [-1, 1]."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ZeroVectorError("cosine undefined for zero vectors")
    # identical vectors have cosine exactly 1; don't let rounding say 1-ulp
    if u.shape == v.shape and np.array_equal(u, v):
        return 1.0
    # guard float excess just outside [-1, 1]
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def _unit_rows(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise ZeroVectorError("token vector with zero norm")
    return matrix / norms


def _rescale(x: float, baseline: float) -> float:
    return (x - baseline) / (1.0 - baseline)


def match_report_from_embeddings(
    ref_vectors: np.ndarray,
    cand_vectors: np.ndarray,
    baseline: float | None = None,
    ref_weights: np.ndarray | None = None,
    cand_weights: np.ndarray | None = None,
) -> MatchReport:
    """Greedy max-cosine matching between two token-vector matrices.

    recall = (weighted) mean over reference tokens of their best candidate
    cosine; precision mirrors it over candidate tokens. Optional weights
    enable importance weighting; uniform by default.
    """
    ref_raw = np.asarray(ref_vectors, dtype=np.float64)
    cand_raw = np.asarray(cand_vectors, dtype=np.float64)
    ref = _unit_rows(ref_raw)
    cand = _unit_rows(cand_raw)

    if ref_raw.shape == cand_raw.shape and np.array_equal(ref_raw, cand_raw):
        # identical token matrices match perfectly on the diagonal; the
        # result is exactly 1 regardless of float rounding in the matmul
        best_for_ref = np.ones(len(ref))
        best_for_cand = np.ones(len(cand))
    else:
        sim = ref @ cand.T  # [ref_tokens, cand_tokens]
        best_for_ref = sim.max(axis=1)
        best_for_cand = sim.max(axis=0)
    if ref_weights is None:
        recall = float(best_for_ref.mean())
    else:
        w = np.asarray(ref_weights, dtype=np.float64)
        recall = float(np.dot(best_for_ref, w) / w.sum())
    if cand_weights is None:
        precision = float(best_for_cand.mean())
    else:
        w = np.asarray(cand_weights, dtype=np.float64)
        precision = float(np.dot(best_for_cand, w) / w.sum())

    raw_f1 = 0.0 if precision + recall == 0.0 else 2.0 * precision * recall / (precision + recall)

    if baseline is not None:
        precision = _rescale(precision, baseline)
        recall = _rescale(recall, baseline)
        f1_pre_clamp = _rescale(raw_f1, baseline)
    else:
        f1_pre_clamp = raw_f1

    return MatchReport(
        precision=precision,
        recall=recall,
        f1=clamp01(f1_pre_clamp),
        raw_f1=raw_f1,
    )


def _eligible_vectors(embeddings) -> np.ndarray:
    keep = (embeddings.mask == 1) & ~embeddings.special
    if not keep.any():
        raise AllTokensExcludedError("no eligible tokens for matching")
    return embeddings.vectors[keep]


def token_match_score(
    bundle: ModelBundle,
    pair: SentencePair,
    idf_weights: dict[str, float] | None = None,
) -> MatchReport:
    """Greedy token matching for one pair using the bundle's encoder.

    ``idf_weights`` (token text -> weight) switches on importance
    weighting; weights default to uniform and are never estimated here.
    """
    emb_a, emb_b = encode_tokens_batch(bundle, [pair.text_a, pair.text_b], batch_size=2)
    ref = _eligible_vectors(emb_a)
    cand = _eligible_vectors(emb_b)
    ref_w = cand_w = None
    if idf_weights is not None:
        ref_w = _token_weights(bundle, pair.text_a, emb_a, idf_weights)
        cand_w = _token_weights(bundle, pair.text_b, emb_b, idf_weights)
    return match_report_from_embeddings(
        ref, cand, baseline=bundle.rescale_baseline, ref_weights=ref_w, cand_weights=cand_w
    )


def _token_weights(bundle, text, embeddings, idf_weights) -> np.ndarray:
    enc = bundle.tokenizer.encode(text)
    keep = (embeddings.mask == 1) & ~embeddings.special
    tokens = [tok for tok, k in zip(enc.tokens, keep) if k]
    return np.array([idf_weights.get(tok, 1.0) for tok in tokens], dtype=np.float64)


def bertscore_score(
    bundle: ModelBundle,
    pair: SentencePair,
    idf_weights: dict[str, float] | None = None,
) -> tuple[MetricScore, MatchReport]:
    """Token-matching F1 as a MetricScore plus the full match report.

    ``raw`` preserves the pre-clamp F1 (after baseline rescaling when the
    bundle configures one).
    """
    report = token_match_score(bundle, pair, idf_weights=idf_weights)
    if bundle.rescale_baseline is not None:
        raw = _rescale(report.raw_f1, bundle.rescale_baseline)
    else:
        raw = report.raw_f1
    score = MetricScore(
        pair_id=pair.id,
        metric=Metric.BERTSCORE,
        score=report.f1,
        raw=raw,
        model_fingerprint=bundle.fingerprint,
    )
    return score, report


def sbert_score(bundle: ModelBundle, pair: SentencePair) -> MetricScore:
    """Cosine of mean-pooled sentence embeddings, clamped into [0, 1]."""
    emb_a, emb_b = encode_tokens_batch(bundle, [pair.text_a, pair.text_b], batch_size=2)
    raw = cosine(mean_pool(emb_a), mean_pool(emb_b))
    return MetricScore(
        pair_id=pair.id,
        metric=Metric.SBERT,
        score=clamp01(raw),
        raw=raw,
        model_fingerprint=bundle.fingerprint,
    )


def sbert_cache_config(bundle: ModelBundle) -> dict:
    return {"pooling": bundle.pooling.value, "layer": bundle.embedding_layer}


def bertscore_cache_config(bundle: ModelBundle, idf: bool = False) -> dict:
    return {
        "baseline": bundle.rescale_baseline,
        "idf": idf,
        "layer": bundle.embedding_layer,
    }
