"""Graph runtimes behind model bundles.

Every runtime maps batched token ids to either regression logits or
per-token hidden vectors. Three graph formats are supported, selected by
file suffix:

- ``*.fixture.json``: a deterministic stand-in with no graph engine at
  all, used by the test suite. Regression fixtures emit a configured
  constant or a hash-derived value; encoder fixtures map token ids to
  fixed orthonormal basis vectors (with optional per-id overrides).
- ``*.pt``: a TorchScript module traced with the signature
  ``(input_ids, attention_mask, token_type_ids)``.
- ``*.onnx``: executed via onnxruntime when that package is installed.

All runtimes are deterministic functions of (graph file, inputs) and are
safe to call from multiple threads.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Protocol

import numpy as np

from ..errors import InferenceError, MalformedConfigError, UnsupportedGraphError

__all__ = ["GraphRuntime", "FixtureGraph", "TorchScriptGraph", "OnnxGraph", "open_graph"]


class GraphRuntime(Protocol):
    def regression(self, ids: np.ndarray, mask: np.ndarray, type_ids: np.ndarray) -> np.ndarray:
        """[B, T] int arrays -> [B] float64 logits."""
        ...

    def encode(self, ids: np.ndarray, mask: np.ndarray, type_ids: np.ndarray) -> np.ndarray:
        """[B, T] int arrays -> [B, T, H] float64 hidden vectors."""
        ...


class FixtureGraph:
    """Deterministic fixture runtime configured by a small JSON file."""

    def __init__(self, config: dict):
        self.kind = config.get("fixture")
        if self.kind not in ("regression", "encoder"):
            raise MalformedConfigError(f"unknown fixture kind: {self.kind!r}")
        self.mode = config.get("mode", "constant")
        self.value = float(config.get("value", 0.0))
        self.low = float(config.get("low", 0.0))
        self.high = float(config.get("high", 5.0))
        self.dim = int(config.get("dim", 8))
        overrides = config.get("vector_overrides", {}) or {}
        self.vector_overrides = {
            int(token_id): np.asarray(vec, dtype=np.float64) for token_id, vec in overrides.items()
        }
        for vec in self.vector_overrides.values():
            if vec.shape != (self.dim,):
                raise MalformedConfigError("vector override dimension mismatch")

    @classmethod
    def load(cls, path: Path) -> "FixtureGraph":
        with open(path, "r", encoding="utf-8") as fh:
            return cls(json.load(fh))

    def _hash_logit(self, row_ids: np.ndarray) -> float:
        digest = hashlib.sha256(row_ids.astype("<i8").tobytes()).digest()
        frac = int.from_bytes(digest[:8], "little") / 2.0**64
        return self.low + (self.high - self.low) * frac

    def regression(self, ids: np.ndarray, mask: np.ndarray, type_ids: np.ndarray) -> np.ndarray:
        out = np.empty(len(ids), dtype=np.float64)
        for b in range(len(ids)):
            if self.mode == "constant":
                out[b] = self.value
            else:
                out[b] = self._hash_logit(ids[b][mask[b] == 1])
        return out

    def encode(self, ids: np.ndarray, mask: np.ndarray, type_ids: np.ndarray) -> np.ndarray:
        batch, toks = ids.shape
        out = np.zeros((batch, toks, self.dim), dtype=np.float64)
        for b in range(batch):
            for t in range(toks):
                token_id = int(ids[b, t])
                override = self.vector_overrides.get(token_id)
                if override is not None:
                    out[b, t] = override
                else:
                    out[b, t, token_id % self.dim] = 1.0
        return out


class TorchScriptGraph:
    """TorchScript module with signature (input_ids, attention_mask, token_type_ids)."""

    def __init__(self, path: Path):
        try:
            import torch
        except ImportError as exc:
            raise UnsupportedGraphError(
                "TorchScript bundle requires torch; install the 'models' extra"
            ) from exc
        self._torch = torch
        self._module = torch.jit.load(str(path), map_location="cpu")
        self._module.eval()

    def _run(self, ids: np.ndarray, mask: np.ndarray, type_ids: np.ndarray):
        torch = self._torch
        with torch.no_grad():
            out = self._module(
                torch.from_numpy(ids.astype(np.int64)),
                torch.from_numpy(mask.astype(np.int64)),
                torch.from_numpy(type_ids.astype(np.int64)),
            )
        return out.numpy()

    def regression(self, ids: np.ndarray, mask: np.ndarray, type_ids: np.ndarray) -> np.ndarray:
        out = self._run(ids, mask, type_ids)
        if out.ndim == 2 and out.shape[1] == 1:
            out = out[:, 0]
        if out.ndim != 1:
            raise InferenceError(f"regression graph returned shape {out.shape}")
        return out.astype(np.float64)

    def encode(self, ids: np.ndarray, mask: np.ndarray, type_ids: np.ndarray) -> np.ndarray:
        out = self._run(ids, mask, type_ids)
        if out.ndim != 3:
            raise InferenceError(f"encoder graph returned shape {out.shape}")
        return out.astype(np.float64)


class OnnxGraph:
    """ONNX graph executed with onnxruntime; feeds only the inputs the
    graph declares among input_ids / attention_mask / token_type_ids."""

    def __init__(self, path: Path):
        try:
            import onnxruntime
        except ImportError as exc:
            raise UnsupportedGraphError(
                "this bundle ships an .onnx graph but onnxruntime is not installed"
            ) from exc
        self._session = onnxruntime.InferenceSession(
            str(path), providers=["CPUExecutionProvider"]
        )
        self._input_names = [inp.name for inp in self._session.get_inputs()]

    def _run(self, ids: np.ndarray, mask: np.ndarray, type_ids: np.ndarray) -> np.ndarray:
        feed = {
            "input_ids": ids.astype(np.int64),
            "attention_mask": mask.astype(np.int64),
            "token_type_ids": type_ids.astype(np.int64),
        }
        feed = {name: feed[name] for name in self._input_names if name in feed}
        return self._session.run(None, feed)[0]

    def regression(self, ids: np.ndarray, mask: np.ndarray, type_ids: np.ndarray) -> np.ndarray:
        out = self._run(ids, mask, type_ids)
        if out.ndim == 2 and out.shape[1] == 1:
            out = out[:, 0]
        if out.ndim != 1:
            raise InferenceError(f"regression graph returned shape {out.shape}")
        return out.astype(np.float64)

    def encode(self, ids: np.ndarray, mask: np.ndarray, type_ids: np.ndarray) -> np.ndarray:
        out = self._run(ids, mask, type_ids)
        if out.ndim != 3:
            raise InferenceError(f"encoder graph returned shape {out.shape}")
        return out.astype(np.float64)


def open_graph(path: Path) -> GraphRuntime:
    name = path.name
    if name.endswith(".fixture.json"):
        return FixtureGraph.load(path)
    if name.endswith(".pt"):
        return TorchScriptGraph(path)
    if name.endswith(".onnx"):
        return OnnxGraph(path)
    raise UnsupportedGraphError(f"no runtime for graph file {name!r}")
