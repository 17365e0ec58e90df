"""Content-addressed score cache.

Keys are SHA-256 digests over (metric id, model fingerprint, NFC-normalized
texts, metric config digest); equal inputs always map to the same digest
across processes. Entries are single-record JSON files under a two-level
hex-prefix directory tree, written atomically via write-then-rename, so a
crashed run never leaves a torn entry and reruns resume from the cache.
"""

from __future__ import annotations

import hashlib
import json
import os
import unicodedata
import uuid
from dataclasses import dataclass
from pathlib import Path

from .errors import CacheUnavailableError, SchemaViolationError
from .types import MetricScore

__all__ = ["CacheKey", "ScoreCache", "canonical_text", "config_digest"]


def canonical_text(text: str) -> str:
    """NFC-normalize text for cache keying; no case folding (metrics are
    case-sensitive and always see the raw text)."""
    return unicodedata.normalize("NFC", text)


def config_digest(config: dict) -> str:
    """Stable hex digest of a JSON-serializable metric configuration."""
    payload = json.dumps(config, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class CacheKey:
    digest: str  # 64 lowercase hex chars

    @staticmethod
    def build(
        metric: str,
        model_fingerprint: str,
        text_a: str,
        text_b: str,
        config: str,
    ) -> "CacheKey":
        payload = json.dumps(
            {
                "metric": metric,
                "model_fingerprint": model_fingerprint,
                "text_a": canonical_text(text_a),
                "text_b": canonical_text(text_b),
                "config": config,
            },
            sort_keys=True,
            ensure_ascii=False,
            separators=(",", ":"),
        )
        return CacheKey(hashlib.sha256(payload.encode("utf-8")).hexdigest())


class ScoreCache:
    """One JSON file per key under ``root/<d0d1>/<d2d3>/<digest>.json``."""

    def __init__(self, root: Path | str):
        self.root = Path(root)

    def _path(self, key: CacheKey) -> Path:
        d = key.digest
        return self.root / d[:2] / d[2:4] / f"{d}.json"

    def get(self, key: CacheKey) -> MetricScore | None:
        """Return the cached score, or None on a miss.

        Corrupt entries are discarded and treated as misses.
        """
        path = self._path(key)
        try:
            with open(path, "r", encoding="utf-8") as fh:
                record = json.load(fh)
            return MetricScore.from_record(record)
        except FileNotFoundError:
            return None
        except (json.JSONDecodeError, SchemaViolationError, UnicodeDecodeError):
            try:
                path.unlink()
            except OSError:
                pass
            return None
        except OSError as exc:
            raise CacheUnavailableError(f"cache read failed: {exc}") from exc

    def put(self, key: CacheKey, score: MetricScore) -> None:
        """Store a score atomically (write to a temp file, then rename)."""
        path = self._path(key)
        tmp = path.with_name(f".{path.name}.{uuid.uuid4().hex}.tmp")
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(tmp, "w", encoding="utf-8") as fh:
                json.dump(score.to_record(), fh, ensure_ascii=False)
            os.replace(tmp, path)
        except OSError as exc:
            try:
                tmp.unlink()
            except OSError:
                pass
            raise CacheUnavailableError(f"cache write failed: {exc}") from exc
