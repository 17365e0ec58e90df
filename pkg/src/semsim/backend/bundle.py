"""Portable model bundles: a self-contained directory holding a
computation graph, a tokenizer spec, a config, and a content fingerprint.

Directory layout (file names are a contract shared with the export tool):

    <bundle>/
      model.onnx        graph file; alternative formats keep their own
                        name, recorded in bundle.json under "graph"
                        (e.g. model.pt, model.fixture.json)
      tokenizer.json    serialized tokenizer
      bundle.json       kind, max_len, pooling, output_scale,
                        rescale_baseline, embedding_layer, graph
      fingerprint.txt   lowercase hex sha-256 over graph file, tokenizer
                        file, and bundle.json bytes, concatenated in that
                        order

A loaded bundle is immutable and shareable across threads.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from tokenizers import Tokenizer

from ..errors import (
    BundleFileMissingError,
    FingerprintMismatchError,
    MalformedConfigError,
    TokenizerError,
)
from .graphs import GraphRuntime, open_graph

__all__ = [
    "BundleKind",
    "Pooling",
    "ModelBundle",
    "BUNDLE_CONFIG_FILE",
    "TOKENIZER_FILE",
    "FINGERPRINT_FILE",
    "DEFAULT_GRAPH_FILE",
    "compute_fingerprint",
    "write_fingerprint",
    "load_bundle",
]

BUNDLE_CONFIG_FILE = "bundle.json"
TOKENIZER_FILE = "tokenizer.json"
FINGERPRINT_FILE = "fingerprint.txt"
DEFAULT_GRAPH_FILE = "model.onnx"


class BundleKind(str, Enum):
    REGRESSION_PAIR = "regression_pair"
    ENCODER = "encoder"


class Pooling(str, Enum):
    MEAN = "mean"
    NONE = "none"


@dataclass(frozen=True)
class ModelBundle:
    path: Path
    kind: BundleKind
    graph_file: str
    max_len: int
    pooling: Pooling
    output_scale: float
    rescale_baseline: float | None
    embedding_layer: int | str
    fingerprint: str
    tokenizer: Tokenizer = field(compare=False, repr=False)
    graph: GraphRuntime = field(compare=False, repr=False)


def compute_fingerprint(bundle_dir: Path, graph_file: str) -> str:
    """SHA-256 over graph, tokenizer, and config bytes, in that order."""
    digest = hashlib.sha256()
    for name in (graph_file, TOKENIZER_FILE, BUNDLE_CONFIG_FILE):
        path = bundle_dir / name
        if not path.is_file():
            raise BundleFileMissingError(f"bundle file missing: {path}")
        with open(path, "rb") as fh:
            while chunk := fh.read(1 << 20):
                digest.update(chunk)
    return digest.hexdigest()


def write_fingerprint(bundle_dir: Path, graph_file: str = DEFAULT_GRAPH_FILE) -> str:
    """Compute and record the fingerprint; returns the digest."""
    fingerprint = compute_fingerprint(Path(bundle_dir), graph_file)
    (Path(bundle_dir) / FINGERPRINT_FILE).write_text(fingerprint + "\n", encoding="utf-8")
    return fingerprint


def _parse_config(bundle_dir: Path) -> dict:
    config_path = bundle_dir / BUNDLE_CONFIG_FILE
    if not config_path.is_file():
        raise BundleFileMissingError(f"bundle file missing: {config_path}")
    try:
        with open(config_path, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedConfigError(f"unreadable bundle.json: {exc}") from exc
    if not isinstance(config, dict):
        raise MalformedConfigError("bundle.json must hold a JSON object")
    return config


def load_bundle(path: Path | str) -> ModelBundle:
    """Load and validate a bundle directory.

    The fingerprint is recomputed from the files on disk and must match
    the recorded value; any tampered or partially-copied bundle is
    rejected before inference.
    """
    bundle_dir = Path(path)
    if not bundle_dir.is_dir():
        raise BundleFileMissingError(f"bundle directory missing: {bundle_dir}")

    config = _parse_config(bundle_dir)
    try:
        kind = BundleKind(config["kind"])
        max_len = int(config["max_len"])
        pooling = Pooling(config["pooling"])
        output_scale = float(config.get("output_scale", 1.0))
        baseline = config.get("rescale_baseline")
        rescale_baseline = None if baseline is None else float(baseline)
        embedding_layer = config.get("embedding_layer", "last")
        graph_file = str(config.get("graph", DEFAULT_GRAPH_FILE))
    except (KeyError, ValueError, TypeError) as exc:
        raise MalformedConfigError(f"bad bundle.json field: {exc}") from exc

    if max_len < 1:
        raise MalformedConfigError("max_len must be positive")
    if kind is BundleKind.REGRESSION_PAIR:
        if pooling is not Pooling.NONE:
            raise MalformedConfigError("regression bundles must declare pooling=none")
        if output_scale <= 0:
            raise MalformedConfigError("regression bundles need output_scale > 0")
    if kind is BundleKind.ENCODER and pooling is not Pooling.MEAN:
        raise MalformedConfigError("encoder bundles must declare pooling=mean")
    if rescale_baseline is not None and not (0.0 <= rescale_baseline < 1.0):
        raise MalformedConfigError("rescale_baseline must lie in [0, 1)")

    fingerprint_path = bundle_dir / FINGERPRINT_FILE
    if not fingerprint_path.is_file():
        raise BundleFileMissingError(f"bundle file missing: {fingerprint_path}")
    recorded = fingerprint_path.read_text(encoding="utf-8").strip()
    actual = compute_fingerprint(bundle_dir, graph_file)
    if recorded != actual:
        raise FingerprintMismatchError(
            f"bundle fingerprint mismatch in {bundle_dir}: recorded {recorded[:12]}…, "
            f"recomputed {actual[:12]}…"
        )

    try:
        tokenizer = Tokenizer.from_file(str(bundle_dir / TOKENIZER_FILE))
    except Exception as exc:
        raise TokenizerError(f"cannot load tokenizer: {exc}") from exc
    tokenizer.enable_truncation(max_length=max_len, strategy="longest_first")

    graph = open_graph(bundle_dir / graph_file)

    return ModelBundle(
        path=bundle_dir,
        kind=kind,
        graph_file=graph_file,
        max_len=max_len,
        pooling=pooling,
        output_scale=output_scale,
        rescale_baseline=rescale_baseline,
        embedding_layer=embedding_layer,
        fingerprint=actual,
        tokenizer=tokenizer,
        graph=graph,
    )
