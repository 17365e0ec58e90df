"""Similarity metrics: n-gram overlap, embedding-based, and regression-based."""

from .bleu import bleu_tokenize, modified_precision, sentence_bleu
from .embed import MatchReport, bertscore_score, cosine, sbert_score, token_match_score
from .sts import StsConfig, ensemble_score, sts_score

__all__ = [
    "bleu_tokenize",
    "modified_precision",
    "sentence_bleu",
    "MatchReport",
    "cosine",
    "sbert_score",
    "token_match_score",
    "bertscore_score",
    "StsConfig",
    "sts_score",
    "ensemble_score",
]
