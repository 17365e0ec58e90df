import numpy as np
import pytest

from semsim.errors import (
    ConstantInputError,
    EmptyClassError,
    LengthMismatchError,
    SingleClassError,
)
from semsim.stats import (
    class_summary,
    correlation_report,
    median_length_split,
    pair_length,
    pearson,
    roc_auc,
    spearman,
)

from conftest import make_dataset
from oracles import auc_oracle, pearson_oracle, spearman_oracle


class TestPearson:
    def test_perfect_linearity(self):
        assert pearson([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0, abs=1e-12)

    def test_perfect_inverse(self):
        assert pearson([1, 2, 3], [6, 4, 2]) == pytest.approx(-1.0, abs=1e-12)

    def test_known_value(self):
        # frozen from the definitional oracle
        assert pearson([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8, abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            pearson([1, 2], [1, 2, 3])

    def test_too_short(self):
        with pytest.raises(LengthMismatchError):
            pearson([1], [2])

    def test_constant_input_is_flagged_not_zero(self):
        with pytest.raises(ConstantInputError):
            pearson([3, 3, 3], [1, 2, 3])
        with pytest.raises(ConstantInputError):
            pearson([1, 2, 3], [7, 7, 7])

    def test_affine_invariance_and_sign_flip(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=30)
        y = rng.normal(size=30)
        base = pearson(x, y)
        assert pearson(2.5 * x + 3.0, y) == pytest.approx(base, abs=1e-12)
        assert pearson(x, 0.1 * y - 7.0) == pytest.approx(base, abs=1e-12)
        assert pearson(-2.0 * x, y) == pytest.approx(-base, abs=1e-12)


class TestSpearman:
    def test_monotone_increasing_is_one(self):
        assert spearman([1, 2, 5, 9], [0.1, 0.2, 0.3, 10.0]) == pytest.approx(1.0, abs=1e-12)

    def test_monotone_decreasing_is_minus_one(self):
        assert spearman([1, 2, 5, 9], [4, 3, 2, -10]) == pytest.approx(-1.0, abs=1e-12)

    def test_tied_values_use_average_ranks(self):
        # frozen from the rank-then-pearson oracle
        expected = 0.9486832980505138
        assert spearman([1, 2, 2, 3], [1, 3, 2, 4]) == pytest.approx(expected, abs=1e-12)
        assert spearman_oracle([1, 2, 2, 3], [1, 3, 2, 4]) == pytest.approx(expected, abs=1e-15)

    def test_tie_free_equals_pearson_of_integer_ranks(self):
        rng = np.random.default_rng(11)
        x = rng.permutation(40).astype(float)
        y = rng.permutation(40).astype(float)
        rank_x = np.argsort(np.argsort(x)) + 1.0
        rank_y = np.argsort(np.argsort(y)) + 1.0
        assert spearman(x, y) == pearson(rank_x, rank_y)

    def test_invariant_under_strictly_increasing_transform(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=25)
        y = rng.normal(size=25)
        assert spearman(x, y) == spearman(x, np.exp(y))


class TestClassSummary:
    def test_zero_variance_class(self):
        neg, pos = class_summary([0.1, 0.3, 0.5, 0.5], [0, 0, 1, 1])
        assert pos.mean == 0.5
        assert pos.std == 0.0
        assert pos.n == 2

    def test_known_std_uses_n_minus_one(self):
        neg, _ = class_summary([0.0, 1.0, 0.5, 0.5], [0, 0, 1, 1])
        assert neg.mean == pytest.approx(0.5)
        assert neg.std == pytest.approx(0.7071067811865476, abs=1e-15)

    def test_empty_class_raises(self):
        with pytest.raises(EmptyClassError):
            class_summary([0.1, 0.2], [1, 1])

    def test_rejects_non_binary_labels(self):
        with pytest.raises(ValueError):
            class_summary([0.1, 0.2], [0, 2])


class TestRocAuc:
    def test_perfect_separation(self):
        assert roc_auc([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]).auc == 1.0

    def test_all_ties_is_half(self):
        assert roc_auc([0.4, 0.4, 0.4, 0.4], [1, 0, 1, 0]).auc == 0.5

    def test_known_value(self):
        # frozen from brute force over all four (pos, neg) pairs
        assert roc_auc([0.8, 0.4, 0.6, 0.2], [1, 1, 0, 0]).auc == 0.75

    def test_single_class_raises(self):
        with pytest.raises(SingleClassError):
            roc_auc([0.1, 0.2], [1, 1])

    def test_points_start_and_end_invariants(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            n = rng.integers(4, 40)
            labels = rng.integers(0, 2, size=n)
            if labels.min() == labels.max():
                labels[0] = 1 - labels[0]
            scores = rng.choice([0.0, 0.2, 0.4, 0.6, 0.8, 1.0], size=n)
            roc = roc_auc(scores, labels)
            assert roc.points[0] == (0.0, 0.0)
            assert roc.points[-1] == (1.0, 1.0)
            xs = [p[0] for p in roc.points]
            ys = [p[1] for p in roc.points]
            assert all(b >= a for a, b in zip(xs, xs[1:]))
            assert all(b >= a for a, b in zip(ys, ys[1:]))
            # trapezoid area of the sweep equals the rank-based AUC
            area = float(np.trapezoid(ys, xs))
            assert area == pytest.approx(roc.auc, abs=1e-12)

    def test_complement_labels_sum_to_one(self):
        rng = np.random.default_rng(9)
        scores = rng.random(60)
        labels = rng.integers(0, 2, size=60)
        labels[0], labels[1] = 0, 1
        a = roc_auc(scores, labels).auc
        b = roc_auc(scores, 1 - labels).auc
        assert a + b == pytest.approx(1.0, abs=1e-12)

    def test_invariance_under_strictly_increasing_transform(self):
        rng = np.random.default_rng(13)
        scores = rng.random(50)  # positive, so x**3 is strictly increasing
        labels = rng.integers(0, 2, size=50)
        labels[0], labels[1] = 0, 1
        assert roc_auc(scores, labels).auc == roc_auc(scores**3, labels).auc

    def test_matches_rational_oracle(self):
        rng = np.random.default_rng(21)
        for _ in range(25):
            n = int(rng.integers(4, 30))
            scores = [float(s) for s in rng.choice([0.1, 0.25, 0.5, 0.75, 0.9], size=n)]
            labels = [int(v) for v in rng.integers(0, 2, size=n)]
            if min(labels) == max(labels):
                labels[0] = 1 - labels[0]
            assert roc_auc(scores, labels).auc == float(auc_oracle(scores, labels))


class TestCorrelationReport:
    def test_contains_both_coefficients(self):
        report = correlation_report([1, 2, 3, 4], [1, 3, 2, 4])
        assert report.pearson_r == pytest.approx(0.8, abs=1e-12)
        assert report.n == 4
        assert report.spearman_rho == pytest.approx(spearman_oracle([1, 2, 3, 4], [1, 3, 2, 4]), abs=1e-12)


class TestMedianLengthSplit:
    @staticmethod
    def _dataset_with_lengths(lengths):
        rows = [(f"p{i}", "x" * n, "x" * n, 1.0) for i, n in enumerate(lengths)]
        return make_dataset(rows)

    def test_even_split(self):
        ds = self._dataset_with_lengths([10, 20, 30, 40])
        shorter, longer, median = median_length_split(ds)
        assert median == 25.0
        assert [p.id for p, _ in shorter.pairs] == ["p0", "p1"]
        assert [p.id for p, _ in longer.pairs] == ["p2", "p3"]

    def test_median_element_goes_to_longer(self):
        ds = self._dataset_with_lengths([1, 2, 3])
        shorter, longer, median = median_length_split(ds)
        assert median == 2.0
        assert [p.id for p, _ in shorter.pairs] == ["p0"]
        assert [p.id for p, _ in longer.pairs] == ["p1", "p2"]

    def test_pair_length_is_mean_of_character_counts(self):
        assert pair_length("abcd", "ab") == 3.0

    def test_partition_properties(self):
        rng = np.random.default_rng(2)
        lengths = rng.integers(1, 120, size=31)
        ds = self._dataset_with_lengths(lengths)
        shorter, longer, median = median_length_split(ds)
        assert len(shorter) + len(longer) == len(ds)
        ids = [p.id for p, _ in shorter.pairs] + [p.id for p, _ in longer.pairs]
        assert sorted(ids) == sorted(p.id for p, _ in ds.pairs)
        at_median = sum(1 for p, _ in ds.pairs if pair_length(p.text_a, p.text_b) == median)
        assert abs(len(longer) - len(shorter)) <= max(at_median, 1)


class TestOracleAgreement:
    def test_pearson_and_spearman_match_oracles(self):
        rng = np.random.default_rng(17)
        for _ in range(30):
            n = int(rng.integers(3, 50))
            x = list(rng.normal(size=n))
            y = list(rng.normal(size=n))
            assert pearson(x, y) == pytest.approx(pearson_oracle(x, y), abs=1e-12)
            assert spearman(x, y) == pytest.approx(spearman_oracle(x, y), abs=1e-12)
