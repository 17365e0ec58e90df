from semsim.types import (
    DatasetName,
    Label,
    LabelKind,
    LabeledDataset,
    Metric,
    MetricScore,
    SentencePair,
    clamp01,
    validate_dataset,
)

from conftest import make_dataset


class TestClamp:
    def test_inside_range_unchanged(self):
        assert clamp01(0.42) == 0.42

    def test_clamps_both_ends(self):
        assert clamp01(-0.3) == 0.0
        assert clamp01(1.08) == 1.0


class TestMetricScoreRecord:
    def test_round_trip_identity(self):
        score = MetricScore(pair_id="p1", metric=Metric.STS, score=0.9, raw=1.08, model_fingerprint="ab12")
        assert MetricScore.from_record(score.to_record()) == score

    def test_record_field_names(self):
        record = MetricScore("p", Metric.BLEU, 0.5, 0.5).to_record()
        assert set(record) == {"pair_id", "metric", "score", "raw", "model_fingerprint"}


class TestValidateDataset:
    def test_well_formed_dataset_has_no_violations(self, similarity_dataset):
        assert validate_dataset(similarity_dataset) == []

    def test_binary_label_half_is_flagged(self):
        ds = make_dataset([("p0", "a b", "c d", 0.5)], kind=LabelKind.BINARY)
        violations = validate_dataset(ds)
        assert len(violations) == 1
        assert violations[0].pair_id == "p0"
        assert violations[0].rule == "label-range"

    def test_duplicate_pair_id_yields_one_violation(self):
        ds = make_dataset([("p0", "a b", "c d", 1.0), ("p0", "e f", "g h", 2.0)])
        violations = validate_dataset(ds)
        assert [v.rule for v in violations] == ["id-unique"]
        assert violations[0].pair_id == "p0"

    def test_empty_text_after_trim_is_flagged(self):
        ds = make_dataset([("p0", "   ", "c d", 1.0)])
        assert [v.rule for v in validate_dataset(ds)] == ["text-nonempty"]

    def test_empty_id_is_flagged(self):
        ds = make_dataset([("", "a b", "c d", 1.0)])
        assert [v.rule for v in validate_dataset(ds)] == ["id-nonempty"]

    def test_mixed_label_kinds_are_flagged(self):
        pairs = (
            (SentencePair("p0", "a", "b"), Label(LabelKind.BINARY, 1.0)),
            (SentencePair("p1", "c", "d"), Label(LabelKind.MQM, -3.0)),
        )
        ds = LabeledDataset(name=DatasetName.CUSTOM, split="", pairs=pairs)
        assert [v.rule for v in validate_dataset(ds)] == ["label-kind-uniform"]

    def test_similarity_range_violation(self):
        ds = make_dataset([("p0", "a b", "c d", 7.2)])
        assert [v.rule for v in validate_dataset(ds)] == ["label-range"]

    def test_mqm_allows_any_finite_value(self):
        ds = make_dataset([("p0", "a b", "c d", -17.5)], kind=LabelKind.MQM)
        assert validate_dataset(ds) == []

    def test_non_finite_label_is_flagged(self):
        ds = make_dataset([("p0", "a b", "c d", float("nan"))], kind=LabelKind.MQM)
        assert [v.rule for v in validate_dataset(ds)] == ["label-range"]


class TestLabeledDataset:
    def test_len_and_kind(self, similarity_dataset):
        assert len(similarity_dataset) == 3
        assert similarity_dataset.label_kind is LabelKind.SIMILARITY_0_5

    def test_label_values_preserve_order(self, similarity_dataset):
        assert similarity_dataset.label_values() == [5.0, 2.5, 0.0]
