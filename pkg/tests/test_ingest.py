import json
from pathlib import Path

import pytest

from semsim.errors import ConfigError, DataError, ParseError, SchemaViolationError, WrongSplitError
from semsim.ingest import (
    DatasetSource,
    SourceKind,
    from_canonical,
    load_dataset,
    load_dataset_counted,
    subset,
    to_canonical,
    write_canonical,
)
from semsim.types import DatasetName, LabelKind, validate_dataset

from conftest import make_dataset

DATA = Path(__file__).parent / "data"


def _src(kind, filename, split="test"):
    return DatasetSource(kind=kind, path=DATA / filename, split=split)


class TestStsbLoader:
    def test_glue_layout(self):
        ds = load_dataset(_src(SourceKind.STSB, "stsb_glue.tsv"))
        assert len(ds) == 3
        assert ds.name is DatasetName.STSB
        assert ds.label_kind is LabelKind.SIMILARITY_0_5
        assert ds.label_values() == [0.0, 2.5, 5.0]
        assert ds.pair_ids() == ["0", "1", "2"]

    def test_original_headerless_layout(self):
        ds = load_dataset(_src(SourceKind.STSB, "stsb_original.tsv"))
        assert len(ds) == 2
        assert ds.label_values() == [3.8, 1.2]
        assert ds.pairs[0][0].text_a == "A man is slicing bread."

    def test_out_of_range_score_is_a_parse_error(self, tmp_path):
        bad = tmp_path / "bad.tsv"
        bad.write_text(
            "index\tscore\tsentence1\tsentence2\n0\t7.2\tA man sings.\tA woman sings.\n",
            encoding="utf-8",
        )
        with pytest.raises(ParseError) as err:
            load_dataset(DatasetSource(SourceKind.STSB, bad, "test"))
        assert err.value.line == 2

    def test_empty_text_rejected_at_ingestion(self, tmp_path):
        bad = tmp_path / "bad.tsv"
        bad.write_text(
            "index\tscore\tsentence1\tsentence2\n0\t1.0\t   \tA woman sings.\n",
            encoding="utf-8",
        )
        with pytest.raises(ParseError):
            load_dataset(DatasetSource(SourceKind.STSB, bad, "test"))


class TestMrpcLoader:
    def test_quality_one_is_positive_binary(self):
        ds = load_dataset(_src(SourceKind.MRPC, "mrpc.tsv"))
        assert ds.label_kind is LabelKind.BINARY
        assert ds.label_values() == [1.0, 0.0, 1.0, 0.0]
        assert ds.pair_ids()[0] == "702876_702977"

    def test_non_binary_quality_is_a_parse_error(self, tmp_path):
        bad = tmp_path / "bad.tsv"
        bad.write_text(
            "Quality\t#1 ID\t#2 ID\t#1 String\t#2 String\n0.5\t1\t2\ta b\tc d\n",
            encoding="utf-8",
        )
        with pytest.raises(ParseError):
            load_dataset(DatasetSource(SourceKind.MRPC, bad, "test"))


class TestQqpLoader:
    def test_loads_train_rows(self):
        ds = load_dataset(_src(SourceKind.QQP, "qqp.tsv", split="train"))
        assert ds.label_kind is LabelKind.BINARY
        assert ds.label_values() == [1.0, 0.0, 1.0, 0.0]

    def test_test_split_is_refused(self):
        with pytest.raises(WrongSplitError):
            load_dataset(_src(SourceKind.QQP, "qqp.tsv", split="test"))

    def test_lenient_mode_skips_malformed_rows(self, tmp_path):
        bad = tmp_path / "qqp.tsv"
        bad.write_text(
            "id\tqid1\tqid2\tquestion1\tquestion2\tis_duplicate\n"
            "1\t10\t11\tWhat is a cat?\tDefine cat?\t1\n"
            "2\t12\tbroken row\n"
            "3\t14\t15\tWhy rain?\tWhat causes rain?\t1\n",
            encoding="utf-8",
        )
        with pytest.raises(ParseError):
            load_dataset(DatasetSource(SourceKind.QQP, bad, "train"))
        ds, skipped = load_dataset_counted(DatasetSource(SourceKind.QQP, bad, "train"), lenient=True)
        assert len(ds) == 2
        assert skipped == 1


class TestWmt22Loader:
    def test_reference_hypothesis_and_raw_mqm(self):
        ds = load_dataset(_src(SourceKind.WMT22_ZH_EN, "wmt22.csv"))
        assert ds.label_kind is LabelKind.MQM
        assert len(ds) == 4
        # MQM scores taken as-is: sign and scale unmodified
        assert ds.label_values() == [-1.0, -3.5, -0.5, -7.0]
        pair = ds.pairs[0][0]
        assert pair.id == "sysA:1"
        assert pair.text_a == "The cat sat on the mat."
        assert pair.text_b == "The cat sat on a mat."

    def test_tab_separated_variant(self, tmp_path):
        path = tmp_path / "wmt.tsv"
        path.write_text(
            "SEG_ID\tREF\tHYP\tMQM_SCORE\n7\tgold text here\tsystem output here\t-2.25\n",
            encoding="utf-8",
        )
        ds = load_dataset(DatasetSource(SourceKind.WMT22_ZH_EN, path, "test"))
        assert ds.pairs[0][0].id == "7"
        assert ds.label_values() == [-2.25]

    def test_missing_score_column_is_a_parse_error(self, tmp_path):
        path = tmp_path / "wmt.csv"
        path.write_text("reference,hypothesis\na,b\n", encoding="utf-8")
        with pytest.raises(ParseError):
            load_dataset(DatasetSource(SourceKind.WMT22_ZH_EN, path, "test"))


class TestCanonical:
    def test_round_trip_is_identity(self, similarity_dataset):
        records = to_canonical(similarity_dataset)
        rebuilt = from_canonical(records, name=similarity_dataset.name)
        assert rebuilt == similarity_dataset

    def test_file_round_trip_via_loader(self, similarity_dataset, tmp_path):
        path = tmp_path / "pairs.jsonl"
        write_canonical(similarity_dataset, path)
        ds = load_dataset(DatasetSource(SourceKind.CANONICAL_JSONL, path, "test"))
        assert ds.pairs == similarity_dataset.pairs

    def test_record_field_names_are_exact(self, similarity_dataset):
        record = to_canonical(similarity_dataset)[0]
        assert list(record) == ["id", "text_a", "text_b", "label_kind", "label", "split"]

    def test_missing_field_is_schema_violation(self):
        record = {"id": "p", "text_a": "a", "label_kind": "binary", "label": 1, "split": "t"}
        with pytest.raises(SchemaViolationError) as err:
            from_canonical([record])
        assert "text_b" in str(err.value)

    def test_binary_one_is_positive(self):
        record = {
            "id": "p", "text_a": "a", "text_b": "b",
            "label_kind": "binary", "label": 1, "split": "t",
        }
        ds = from_canonical([record])
        assert ds.pairs[0][1].value == 1.0
        assert ds.label_kind is LabelKind.BINARY

    def test_mixed_kinds_rejected(self):
        records = [
            {"id": "a", "text_a": "x", "text_b": "y", "label_kind": "binary", "label": 1, "split": "t"},
            {"id": "b", "text_a": "x", "text_b": "y", "label_kind": "mqm", "label": -2, "split": "t"},
        ]
        with pytest.raises(SchemaViolationError):
            from_canonical(records)

    def test_serialization_is_deterministic(self, tmp_path):
        ds = load_dataset(_src(SourceKind.STSB, "stsb_glue.tsv"))
        p1, p2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        write_canonical(ds, p1)
        write_canonical(load_dataset(_src(SourceKind.STSB, "stsb_glue.tsv")), p2)
        assert p1.read_bytes() == p2.read_bytes()


class TestLoaderInvariants:
    @pytest.mark.parametrize(
        "kind,filename,split,expected_kind",
        [
            (SourceKind.STSB, "stsb_glue.tsv", "test", LabelKind.SIMILARITY_0_5),
            (SourceKind.MRPC, "mrpc.tsv", "test", LabelKind.BINARY),
            (SourceKind.QQP, "qqp.tsv", "train", LabelKind.BINARY),
            (SourceKind.WMT22_ZH_EN, "wmt22.csv", "test", LabelKind.MQM),
        ],
    )
    def test_every_loaded_dataset_validates_with_expected_kind(
        self, kind, filename, split, expected_kind
    ):
        ds = load_dataset(_src(kind, filename, split))
        assert validate_dataset(ds) == []
        assert ds.label_kind is expected_kind

    def test_duplicate_ids_rejected(self, tmp_path):
        path = tmp_path / "dup.jsonl"
        record = {"id": "p", "text_a": "a", "text_b": "b", "label_kind": "binary", "label": 1, "split": "t"}
        path.write_text(json.dumps(record) + "\n" + json.dumps(record) + "\n", encoding="utf-8")
        with pytest.raises(ParseError):
            load_dataset(DatasetSource(SourceKind.CANONICAL_JSONL, path, "t"))

    def test_missing_file_is_a_data_error(self, tmp_path):
        with pytest.raises(DataError):
            load_dataset(DatasetSource(SourceKind.STSB, tmp_path / "nope.tsv", "test"))


class TestSubset:
    @staticmethod
    def _binary(n_pos, n_neg):
        rows = [(f"p{i}", f"text {i} a", f"text {i} b", 1.0) for i in range(n_pos)]
        rows += [(f"n{i}", f"text {i} c", f"text {i} d", 0.0) for i in range(n_neg)]
        return make_dataset(rows, kind=LabelKind.BINARY)

    def test_full_size_returns_identical_dataset(self, similarity_dataset):
        assert subset(similarity_dataset, len(similarity_dataset), seed=1) == similarity_dataset

    def test_fixed_seed_is_deterministic(self):
        ds = self._binary(30, 20)
        a = subset(ds, 10, seed=7)
        b = subset(ds, 10, seed=7)
        assert a == b
        assert subset(ds, 10, seed=8) != a

    def test_subset_preserves_original_order(self):
        ds = self._binary(30, 20)
        sample = subset(ds, 10, seed=3)
        order = {p.id: i for i, (p, _) in enumerate(ds.pairs)}
        positions = [order[p.id] for p, _ in sample.pairs]
        assert positions == sorted(positions)

    def test_stratified_keeps_class_proportions_within_one(self):
        ds = self._binary(60, 40)
        sample = subset(ds, 50, seed=5, stratify=True)
        labels = sample.label_values()
        n_pos = sum(1 for v in labels if v == 1.0)
        n_neg = len(labels) - n_pos
        assert abs(n_pos - 30) <= 1
        assert abs(n_neg - 20) <= 1

    def test_out_of_range_n(self, similarity_dataset):
        with pytest.raises(ConfigError):
            subset(similarity_dataset, 0, seed=1)
        with pytest.raises(ConfigError):
            subset(similarity_dataset, 99, seed=1)

    def test_stratify_requires_binary(self, similarity_dataset):
        with pytest.raises(ConfigError):
            subset(similarity_dataset, 2, seed=1, stratify=True)
