"""Shared fixtures: deterministic fixture bundles and small datasets.

Fixture bundles exercise the full bundle contract (tokenizer.json,
graph file, bundle.json, fingerprint.txt) without any graph engine:
regression graphs emit a constant or a hash-derived logit, encoder
graphs map token ids to orthonormal basis vectors.
"""

from __future__ import annotations

import json
from pathlib import Path

import pytest
from tokenizers import Tokenizer, models, pre_tokenizers, processors

from semsim.backend import load_bundle, write_fingerprint
from semsim.types import DatasetName, Label, LabelKind, LabeledDataset, SentencePair

WORDS = [
    "the", "cat", "sat", "on", "mat", "dog", "ran", "fast", "blue", "sky",
    "green", "tree", "bird", "sang", "song", "river", "flows", "under",
    "bridge", "stars", "shine", "night", "sun", "rises", "east", "wind",
    "blows", "cold", "rain", "falls", "soft", "light", "house", "stands",
    "tall", "road", "turns", "left", "child", "plays", "ball", "red",
]
SPECIAL_TOKENS = ["[UNK]", "[PAD]", "[CLS]", "[SEP]"]


def build_vocab(extra: tuple[str, ...] = ()) -> dict[str, int]:
    vocab: dict[str, int] = {}
    for token in SPECIAL_TOKENS + WORDS + list(extra):
        if token not in vocab:
            vocab[token] = len(vocab)
    return vocab


def write_wordlevel_tokenizer(path: Path, vocab: dict[str, int]) -> None:
    tok = Tokenizer(models.WordLevel(vocab, unk_token="[UNK]"))
    tok.pre_tokenizer = pre_tokenizers.Whitespace()
    tok.post_processor = processors.TemplateProcessing(
        single="[CLS] $A [SEP]",
        pair="[CLS] $A:0 [SEP] $B:1 [SEP]:1",
        special_tokens=[("[CLS]", vocab["[CLS]"]), ("[SEP]", vocab["[SEP]"])],
    )
    tok.save(str(path))


def make_fixture_bundle(
    root: Path,
    kind: str,
    *,
    mode: str = "hash",
    value: float = 2.5,
    low: float = 0.0,
    high: float = 5.0,
    dim: int = 8,
    overrides: dict[int, list[float]] | None = None,
    max_len: int = 64,
    baseline: float | None = None,
    output_scale: float = 5.0,
    vocab: dict[str, int] | None = None,
) -> Path:
    root.mkdir(parents=True, exist_ok=True)
    vocab = vocab or build_vocab()
    write_wordlevel_tokenizer(root / "tokenizer.json", vocab)
    graph_name = "model.fixture.json"
    if kind == "regression_pair":
        graph = {"fixture": "regression", "mode": mode, "value": value, "low": low, "high": high}
        config = {
            "kind": "regression_pair",
            "graph": graph_name,
            "max_len": max_len,
            "pooling": "none",
            "output_scale": output_scale,
            "rescale_baseline": baseline,
            "embedding_layer": "last",
        }
    else:
        graph = {
            "fixture": "encoder",
            "dim": dim,
            "vector_overrides": {str(k): v for k, v in (overrides or {}).items()},
        }
        config = {
            "kind": "encoder",
            "graph": graph_name,
            "max_len": max_len,
            "pooling": "mean",
            "output_scale": 1.0,
            "rescale_baseline": baseline,
            "embedding_layer": "last",
        }
    (root / graph_name).write_text(json.dumps(graph), encoding="utf-8")
    (root / "bundle.json").write_text(json.dumps(config), encoding="utf-8")
    write_fingerprint(root, graph_name)
    return root


@pytest.fixture()
def fixture_vocab() -> dict[str, int]:
    return build_vocab()


@pytest.fixture()
def regression_bundle(tmp_path):
    return load_bundle(make_fixture_bundle(tmp_path / "reg", "regression_pair", mode="hash"))


@pytest.fixture()
def constant_bundle_factory(tmp_path):
    def _make(value: float):
        return load_bundle(
            make_fixture_bundle(tmp_path / f"const_{value}", "regression_pair", mode="constant", value=value)
        )

    return _make


@pytest.fixture()
def encoder_bundle(tmp_path):
    return load_bundle(make_fixture_bundle(tmp_path / "enc", "encoder", dim=8))


@pytest.fixture()
def bundles_root(tmp_path):
    """Per-metric bundle layout used by the runner and the CLI."""
    root = tmp_path / "bundles"
    make_fixture_bundle(root / "sts", "regression_pair", mode="hash")
    make_fixture_bundle(root / "sbert", "encoder", dim=8)
    make_fixture_bundle(root / "bertscore", "encoder", dim=16)
    return root


def make_dataset(rows, name=DatasetName.CUSTOM, split="test", kind=LabelKind.SIMILARITY_0_5):
    pairs = tuple(
        (SentencePair(id=row[0], text_a=row[1], text_b=row[2]), Label(kind=kind, value=row[3]))
        for row in rows
    )
    return LabeledDataset(name=name, split=split, pairs=pairs)


@pytest.fixture()
def similarity_dataset():
    return make_dataset(
        [
            ("p0", "the cat sat on the mat", "the cat sat on the mat", 5.0),
            ("p1", "the dog ran fast", "a dog sprinted quickly", 2.5),
            ("p2", "stars shine at night", "the river flows under the bridge", 0.0),
        ]
    )


@pytest.fixture()
def binary_dataset():
    # positives are verbatim copies, negatives share no tokens: BLEU
    # separates the classes perfectly
    return make_dataset(
        [
            ("b0", "the cat sat on the mat", "the cat sat on the mat", 1.0),
            ("b1", "the river flows under the bridge", "the river flows under the bridge", 1.0),
            ("b2", "stars shine at night", "child plays with ball", 0.0),
            ("b3", "sun rises in the east", "wind blows cold rain", 0.0),
        ],
        kind=LabelKind.BINARY,
    )
