"""Dataset loaders for the four benchmark formats plus a canonical
JSONL pair-exchange format, and deterministic subsetting.

Column handling per source format (header names matched case-insensitively):

- stsb: a header line containing ``sentence1``/``sentence2``/``score``
  selects the headered layout (an ``index`` column, when present, supplies
  pair ids); otherwise the file is read as the original headerless
  benchmark layout ``genre, file, year, index, score, sentence1, sentence2``.
- mrpc: ``quality, #1 id, #2 id, #1 string, #2 string``.
- qqp: ``id, qid1, qid2, question1, question2, is_duplicate``; the test
  split carries no labels and is refused.
- wmt22_zh_en: comma- or tab-separated with a header; text_a from
  ``reference``/``ref``, text_b from ``hypothesis``/``hyp``/``mt``/
  ``candidate``/``output``, label from ``score``/``mqm``/``mqm_score``/
  ``mqm_avg_score``, ids from ``seg_id``/``segment_id``/``id`` plus an
  optional ``system`` column. Scores are taken as-is, sign and scale
  unmodified.
- canonical_jsonl: one JSON object per line with fields
  ``id, text_a, text_b, label_kind, label, split``.

Texts are stripped of surrounding whitespace; empty-after-trim texts are
rejected at ingestion rather than silently scored. Row order is always
preserved.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError, ParseError, SchemaViolationError, WrongSplitError
from .types import DatasetName, Label, LabelKind, LabeledDataset, SentencePair

__all__ = [
    "SourceKind",
    "DatasetSource",
    "load_dataset",
    "load_dataset_counted",
    "to_canonical",
    "from_canonical",
    "write_canonical",
    "subset",
]

CANONICAL_FIELDS = ("id", "text_a", "text_b", "label_kind", "label", "split")


class SourceKind(str, Enum):
    STSB = "stsb"
    MRPC = "mrpc"
    QQP = "qqp"
    WMT22_ZH_EN = "wmt22_zh_en"
    CANONICAL_JSONL = "canonical_jsonl"


@dataclass(frozen=True)
class DatasetSource:
    kind: SourceKind
    path: Path
    split: str = ""


_WMT_REF_COLUMNS = ("reference", "ref")
_WMT_HYP_COLUMNS = ("hypothesis", "hyp", "mt", "candidate", "output", "sys_output")
_WMT_SCORE_COLUMNS = ("score", "mqm", "mqm_score", "mqm_avg_score")
_WMT_SEG_COLUMNS = ("seg_id", "segment_id", "id")
_WMT_SYSTEM_COLUMNS = ("system", "sys_name", "system_name")


def _clean_text(raw: str, column: str, path, line_no: int) -> str:
    text = raw.strip()
    if not text:
        raise ParseError(f"empty text in column {column!r}", path=path, line=line_no)
    return text


def _split_tsv(line: str) -> list[str]:
    return line.rstrip("\r\n").split("\t")


def _header_map(fields: list[str]) -> dict[str, int]:
    return {name.strip().lower(): i for i, name in enumerate(fields)}


def _find_column(header: dict[str, int], names: tuple[str, ...]) -> int | None:
    for name in names:
        if name in header:
            return header[name]
    return None


class _RowReader:
    """Iterates data rows with line numbers, optionally skipping rows
    whose field count disagrees with the header (lenient mode)."""

    def __init__(self, path: Path, lenient: bool):
        self.path = path
        self.lenient = lenient
        self.skipped = 0

    def rows(self, lines, expected: int, start_line: int):
        for offset, line in enumerate(lines):
            line_no = start_line + offset
            if not line.strip():
                continue
            fields = _split_tsv(line)
            if len(fields) < expected:
                if self.lenient:
                    self.skipped += 1
                    continue
                raise ParseError(
                    f"expected {expected} fields, got {len(fields)}",
                    path=self.path,
                    line=line_no,
                )
            yield line_no, fields


def _parse_float(raw: str, what: str, path, line_no: int) -> float:
    try:
        value = float(raw)
    except ValueError as exc:
        raise ParseError(f"unparseable {what}: {raw!r}", path=path, line=line_no) from exc
    if not math.isfinite(value):
        raise ParseError(f"non-finite {what}: {raw!r}", path=path, line=line_no)
    return value


def _parse_binary(raw: str, path, line_no: int) -> float:
    value = raw.strip()
    if value not in ("0", "1"):
        raise ParseError(f"binary label must be 0 or 1, got {value!r}", path=path, line=line_no)
    return float(value)


def _load_stsb(source: DatasetSource, lenient: bool):
    path = Path(source.path)
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    if not lines:
        return [], 0

    reader = _RowReader(path, lenient)
    pairs: list[tuple[SentencePair, Label]] = []
    header = _header_map(_split_tsv(lines[0]))
    headered = "sentence1" in header and "sentence2" in header

    if headered:
        if "score" not in header:
            raise ParseError("stsb file has no score column", path=path, line=1)
        col_s1, col_s2, col_score = header["sentence1"], header["sentence2"], header["score"]
        col_index = header.get("index")
        expected = max(col_s1, col_s2, col_score) + 1
        data = reader.rows(lines[1:], expected, start_line=2)
        for line_no, fields in data:
            pair_id = fields[col_index].strip() if col_index is not None else str(len(pairs))
            pairs.append(_stsb_pair(pair_id, fields[col_s1], fields[col_s2], fields[col_score], path, line_no))
    else:
        # headerless original layout: genre, file, year, index, score, s1, s2
        data = reader.rows(lines, 7, start_line=1)
        for line_no, fields in data:
            pairs.append(_stsb_pair(str(len(pairs)), fields[5], fields[6], fields[4], path, line_no))
    return pairs, reader.skipped


def _stsb_pair(pair_id, raw_a, raw_b, raw_score, path, line_no):
    score = _parse_float(raw_score, "similarity score", path, line_no)
    if not (0.0 <= score <= 5.0):
        raise ParseError(f"similarity score {score} outside [0, 5]", path=path, line=line_no)
    return (
        SentencePair(
            id=pair_id,
            text_a=_clean_text(raw_a, "sentence1", path, line_no),
            text_b=_clean_text(raw_b, "sentence2", path, line_no),
        ),
        Label(kind=LabelKind.SIMILARITY_0_5, value=score),
    )


def _load_mrpc(source: DatasetSource, lenient: bool):
    path = Path(source.path)
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    if not lines:
        return [], 0
    header = _header_map(_split_tsv(lines[0]))
    required = ("quality", "#1 string", "#2 string")
    if any(name not in header for name in required):
        raise ParseError("mrpc header must name quality, #1 string, #2 string", path=path, line=1)
    col_q = header["quality"]
    col_a = header["#1 string"]
    col_b = header["#2 string"]
    col_id1 = header.get("#1 id")
    col_id2 = header.get("#2 id")
    expected = max(col_q, col_a, col_b) + 1

    reader = _RowReader(path, lenient)
    pairs = []
    for line_no, fields in reader.rows(lines[1:], expected, start_line=2):
        if col_id1 is not None and col_id2 is not None:
            pair_id = f"{fields[col_id1].strip()}_{fields[col_id2].strip()}"
        else:
            pair_id = str(len(pairs))
        pairs.append(
            (
                SentencePair(
                    id=pair_id,
                    text_a=_clean_text(fields[col_a], "#1 string", path, line_no),
                    text_b=_clean_text(fields[col_b], "#2 string", path, line_no),
                ),
                Label(kind=LabelKind.BINARY, value=_parse_binary(fields[col_q], path, line_no)),
            )
        )
    return pairs, reader.skipped


def _load_qqp(source: DatasetSource, lenient: bool):
    if source.split.strip().lower() == "test":
        raise WrongSplitError("qqp test labels are not distributed; use the train split")
    path = Path(source.path)
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    if not lines:
        return [], 0
    header = _header_map(_split_tsv(lines[0]))
    required = ("question1", "question2", "is_duplicate")
    if any(name not in header for name in required):
        raise ParseError("qqp header must name question1, question2, is_duplicate", path=path, line=1)
    col_a = header["question1"]
    col_b = header["question2"]
    col_label = header["is_duplicate"]
    col_id = header.get("id")
    expected = max(col_a, col_b, col_label) + 1

    reader = _RowReader(path, lenient)
    pairs = []
    for line_no, fields in reader.rows(lines[1:], expected, start_line=2):
        pair_id = fields[col_id].strip() if col_id is not None else str(len(pairs))
        pairs.append(
            (
                SentencePair(
                    id=pair_id,
                    text_a=_clean_text(fields[col_a], "question1", path, line_no),
                    text_b=_clean_text(fields[col_b], "question2", path, line_no),
                ),
                Label(kind=LabelKind.BINARY, value=_parse_binary(fields[col_label], path, line_no)),
            )
        )
    return pairs, reader.skipped


def _load_wmt22(source: DatasetSource, lenient: bool):
    path = Path(source.path)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        sample = fh.readline()
        if not sample.strip():
            return [], 0
        delimiter = "\t" if sample.count("\t") >= sample.count(",") else ","
        fh.seek(0)
        rows = list(csv.reader(fh, delimiter=delimiter))

    header = _header_map(rows[0])
    col_ref = _find_column(header, _WMT_REF_COLUMNS)
    col_hyp = _find_column(header, _WMT_HYP_COLUMNS)
    col_score = _find_column(header, _WMT_SCORE_COLUMNS)
    if col_ref is None or col_hyp is None or col_score is None:
        raise ParseError(
            "wmt22 file must name reference, hypothesis, and score columns",
            path=path,
            line=1,
        )
    col_seg = _find_column(header, _WMT_SEG_COLUMNS)
    col_sys = _find_column(header, _WMT_SYSTEM_COLUMNS)
    expected = max(col_ref, col_hyp, col_score) + 1

    skipped = 0
    pairs = []
    for offset, fields in enumerate(rows[1:]):
        line_no = offset + 2
        if not fields or not any(f.strip() for f in fields):
            continue
        if len(fields) < expected:
            if lenient:
                skipped += 1
                continue
            raise ParseError(
                f"expected {expected} fields, got {len(fields)}", path=path, line=line_no
            )
        seg = fields[col_seg].strip() if col_seg is not None else str(len(pairs))
        if col_sys is not None and fields[col_sys].strip():
            pair_id = f"{fields[col_sys].strip()}:{seg}"
        else:
            pair_id = seg
        pairs.append(
            (
                SentencePair(
                    id=pair_id,
                    text_a=_clean_text(fields[col_ref], "reference", path, line_no),
                    text_b=_clean_text(fields[col_hyp], "hypothesis", path, line_no),
                ),
                Label(
                    kind=LabelKind.MQM,
                    value=_parse_float(fields[col_score], "mqm score", path, line_no),
                ),
            )
        )
    return pairs, skipped


def _load_canonical(source: DatasetSource):
    path = Path(source.path)
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc}", path=path, line=line_no) from exc
            records.append(record)
    return records


_SOURCE_TO_NAME = {
    SourceKind.STSB: DatasetName.STSB,
    SourceKind.MRPC: DatasetName.MRPC,
    SourceKind.QQP: DatasetName.QQP,
    SourceKind.WMT22_ZH_EN: DatasetName.WMT22_ZH_EN,
    SourceKind.CANONICAL_JSONL: DatasetName.CUSTOM,
}

_LOADERS = {
    SourceKind.STSB: _load_stsb,
    SourceKind.MRPC: _load_mrpc,
    SourceKind.QQP: _load_qqp,
    SourceKind.WMT22_ZH_EN: _load_wmt22,
}


def load_dataset_counted(source: DatasetSource, lenient: bool = False) -> tuple[LabeledDataset, int]:
    """Load a dataset and report how many malformed rows were skipped.

    ``lenient`` skips rows whose field count disagrees with the header
    instead of failing (some upstream distributions contain malformed
    rows); the count is recorded in run manifests for auditability.
    """
    if not Path(source.path).is_file():
        raise DataError(f"dataset file not found: {source.path}")
    if source.kind is SourceKind.CANONICAL_JSONL:
        records = _load_canonical(source)
        dataset = from_canonical(records, split=source.split or None)
        skipped = 0
    else:
        pairs, skipped = _LOADERS[source.kind](source, lenient)
        dataset = LabeledDataset(
            name=_SOURCE_TO_NAME[source.kind],
            split=source.split,
            pairs=tuple(pairs),
        )
    _check_unique_ids(dataset, source.path)
    return dataset, skipped


def load_dataset(source: DatasetSource, lenient: bool = False) -> LabeledDataset:
    """Load a dataset from one of the supported source formats."""
    return load_dataset_counted(source, lenient)[0]


def _check_unique_ids(dataset: LabeledDataset, path) -> None:
    seen: set[str] = set()
    for pair, _ in dataset.pairs:
        if pair.id in seen:
            raise ParseError(f"duplicate pair id {pair.id!r}", path=path)
        seen.add(pair.id)


def to_canonical(dataset: LabeledDataset) -> list[dict]:
    """Dataset as canonical records (field order fixed for stable bytes)."""
    return [
        {
            "id": pair.id,
            "text_a": pair.text_a,
            "text_b": pair.text_b,
            "label_kind": label.kind.value,
            "label": label.value,
            "split": dataset.split,
        }
        for pair, label in dataset.pairs
    ]


def from_canonical(
    records: list[dict],
    name: DatasetName = DatasetName.CUSTOM,
    split: str | None = None,
) -> LabeledDataset:
    """Build a dataset from canonical records.

    The record schema carries no dataset name, so ``name`` defaults to
    custom; ``split`` defaults to the records' own split value.
    """
    pairs = []
    kinds = set()
    record_split = split
    for i, record in enumerate(records):
        if not isinstance(record, dict):
            raise SchemaViolationError(f"record {i} is not an object")
        for field_name in CANONICAL_FIELDS:
            if field_name not in record:
                raise SchemaViolationError(f"record {i} missing field {field_name!r}")
        try:
            kind = LabelKind(record["label_kind"])
        except ValueError as exc:
            raise SchemaViolationError(
                f"record {i} has unknown label_kind {record['label_kind']!r}"
            ) from exc
        if not isinstance(record["label"], (int, float)) or isinstance(record["label"], bool):
            raise SchemaViolationError(f"record {i} field 'label' must be a number")
        for field_name in ("id", "text_a", "text_b", "split"):
            if not isinstance(record[field_name], str):
                raise SchemaViolationError(f"record {i} field {field_name!r} must be a string")

        kinds.add(kind)
        if len(kinds) > 1:
            raise SchemaViolationError("records mix label kinds")
        label = Label(kind=kind, value=float(record["label"]))
        if not label.is_valid():
            raise SchemaViolationError(
                f"record {i} label {label.value!r} invalid for kind {kind.value}"
            )
        text_a = record["text_a"].strip()
        text_b = record["text_b"].strip()
        if not text_a or not text_b:
            raise SchemaViolationError(f"record {i} has an empty text")
        if record_split is None:
            record_split = record["split"]
        pairs.append((SentencePair(id=record["id"], text_a=text_a, text_b=text_b), label))

    return LabeledDataset(name=name, split=record_split or "", pairs=tuple(pairs))


def write_canonical(dataset: LabeledDataset, path: Path | str) -> None:
    """Serialize to canonical JSONL; byte-identical across repeated calls."""
    with open(path, "w", encoding="utf-8") as fh:
        for record in to_canonical(dataset):
            fh.write(json.dumps(record, ensure_ascii=False))
            fh.write("\n")


def _stratified_counts(n: int, class_sizes: dict[float, int], total: int) -> dict[float, int]:
    # largest-remainder apportionment keeps each class within one pair
    # of its exact proportional share
    quotas = {c: n * size / total for c, size in class_sizes.items()}
    counts = {c: int(q) for c, q in quotas.items()}
    remainder = n - sum(counts.values())
    by_frac = sorted(quotas, key=lambda c: (quotas[c] - counts[c], c), reverse=True)
    for c in by_frac[:remainder]:
        counts[c] += 1
    return counts


def subset(dataset: LabeledDataset, n: int, seed: int, stratify: bool = False) -> LabeledDataset:
    """Deterministic sample of ``n`` pairs, preserving original order.

    ``stratify`` keeps binary class proportions within one pair per class
    and is only valid for binary datasets.
    """
    size = len(dataset)
    if not (1 <= n <= size):
        raise ConfigError(f"subset size {n} out of range [1, {size}]")
    if stratify and dataset.label_kind is not LabelKind.BINARY:
        raise ConfigError("stratified subsetting requires a binary dataset")
    if n == size:
        return dataset

    rng = np.random.default_rng(seed)
    if stratify:
        class_indices: dict[float, list[int]] = {0.0: [], 1.0: []}
        for i, (_, label) in enumerate(dataset.pairs):
            class_indices[label.value].append(i)
        class_sizes = {c: len(ix) for c, ix in class_indices.items()}
        counts = _stratified_counts(n, class_sizes, size)
        chosen: list[int] = []
        for c in sorted(class_indices):  # fixed class order keeps the draw reproducible
            take = min(counts[c], class_sizes[c])
            chosen.extend(rng.choice(class_indices[c], size=take, replace=False))
        indices = np.sort(np.array(chosen, dtype=np.int64))
    else:
        indices = np.sort(rng.choice(size, size=n, replace=False))

    pairs = tuple(dataset.pairs[i] for i in indices)
    return LabeledDataset(name=dataset.name, split=dataset.split, pairs=pairs)
