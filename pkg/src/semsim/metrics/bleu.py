"""Sentence-level BLEU: modified n-gram precision for n=1..4, geometric
mean, and brevity penalty.

Deliberately unsmoothed: if any n-gram precision is zero the score is
exactly zero. Candidates shorter than four tokens therefore always score
zero, which is the dominant behavior on short-text benchmarks and must
not be hidden by smoothing.

Direction convention: text_a is the reference, text_b is the candidate.
"""

from __future__ import annotations

import math
import unicodedata
from collections import Counter

from ..errors import EmptyTextError
from ..types import Metric, MetricScore

__all__ = [
    "MAX_ORDER",
    "bleu_tokenize",
    "ngram_counts",
    "modified_precision",
    "brevity_penalty",
    "sentence_bleu",
    "cache_config",
]

MAX_ORDER = 4


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def bleu_tokenize(text: str) -> list[str]:
    """Deterministic tokenization: split punctuation from adjacent
    non-punctuation characters, then split on whitespace. No case folding.
    """
    if not text.strip():
        raise EmptyTextError("cannot tokenize empty text")
    parts: list[str] = []
    for ch in text:
        if _is_punct(ch):
            parts.append(f" {ch} ")
        else:
            parts.append(ch)
    return "".join(parts).split()


def ngram_counts(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def modified_precision(candidate: list[str], reference: list[str], n: int) -> tuple[int, int]:
    """Clipped n-gram matches and the candidate n-gram total.

    Each candidate n-gram type counts at most as often as it appears in
    the reference. ``total`` may be zero when the candidate is shorter
    than ``n`` tokens.
    """
    if n < 1:
        raise ValueError("n-gram order must be >= 1")
    cand_counts = ngram_counts(candidate, n)
    ref_counts = ngram_counts(reference, n)
    clipped = sum(min(count, ref_counts[ngram]) for ngram, count in cand_counts.items())
    total = sum(cand_counts.values())
    return clipped, total


def brevity_penalty(candidate_len: int, reference_len: int) -> float:
    if candidate_len > reference_len:
        return 1.0
    return math.exp(1.0 - reference_len / candidate_len)


def sentence_bleu(candidate_text: str, reference_text: str, pair_id: str = "") -> MetricScore:
    """BLEU of a candidate against a single reference.

    score = BP * exp(mean of ln p_n for n=1..4); zero as soon as any p_n
    is zero. BLEU is in [0, 1] by construction, so raw == score.
    """
    candidate = bleu_tokenize(candidate_text)
    reference = bleu_tokenize(reference_text)

    log_sum = 0.0
    zero = False
    for n in range(1, MAX_ORDER + 1):
        clipped, total = modified_precision(candidate, reference, n)
        if clipped == 0 or total == 0:
            zero = True
            break
        log_sum += math.log(clipped / total)

    if zero:
        score = 0.0
    else:
        bp = brevity_penalty(len(candidate), len(reference))
        score = bp * math.exp(log_sum / MAX_ORDER)

    return MetricScore(pair_id=pair_id, metric=Metric.BLEU, score=score, raw=score)


def cache_config() -> dict:
    return {"max_order": MAX_ORDER, "smoothing": "none", "tokenizer": "punct-split-v1"}
