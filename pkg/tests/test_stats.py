"""Tests for KS screening, ECDF reports, and information-gain ranking.

Oracles used here are deliberately independent of the implementation:
a brute-force ECDF sweep for the KS distance, full enumeration of label
assignments for the exact p-value, and direct entropy formulas for
information gain.
"""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from channel_audit.stats import (
    EXACT_ENUMERATION_LIMIT,
    EcdfReport,
    KSResult,
    RankedAttribute,
    class_entropy,
    ecdf_report,
    info_gain,
    info_gain_rank,
    ks_two_sample,
    mdl_cut_points,
    stratified_folds,
)

# ---------------------------------------------------------------- oracles


def brute_force_d(a, b):
    """sup |ECDF_a - ECDF_b| via an explicit sweep over all sample points."""
    best = 0.0
    for x in sorted(set(a) | set(b)):
        fa = sum(v <= x for v in a) / len(a)
        fb = sum(v <= x for v in b) / len(b)
        best = max(best, abs(fa - fb))
    return best


def enumerate_exact_p(n1, n2, d_observed):
    """P(D >= d) by enumerating every assignment of a tie-free pooled sample."""
    n = n1 + n2
    pooled = list(range(n))
    hits = total = 0
    for positions in itertools.combinations(range(n), n1):
        chosen = set(positions)
        a = [pooled[i] for i in positions]
        b = [pooled[i] for i in range(n) if i not in chosen]
        if brute_force_d(a, b) >= d_observed - 1e-12:
            hits += 1
        total += 1
    return hits / total


def entropy_bits(counts):
    total = sum(counts)
    return -sum(c / total * math.log2(c / total) for c in counts if c)


samples = st.lists(st.floats(0, 100, allow_nan=False), min_size=1, max_size=40)


# ---------------------------------------------------------------- KS


class TestKSDistance:
    def test_identical_samples(self):
        result = ks_two_sample([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert result.d_statistic == 0.0
        assert result.p_value == 1.0

    def test_disjoint_supports(self):
        assert ks_two_sample([1, 2, 3], [4, 5, 6]).d_statistic == 1.0

    def test_quarter_overlap(self):
        result = ks_two_sample([1, 2, 3, 4], [2, 3, 4, 5])
        assert result.d_statistic == 0.25
        assert result.d_statistic == brute_force_d([1, 2, 3, 4], [2, 3, 4, 5])

    def test_empty_sample_rejected(self):
        with pytest.raises(ValueError):
            ks_two_sample([], [1.0])
        with pytest.raises(ValueError):
            ks_two_sample([1.0], [])

    @given(samples, samples)
    @settings(max_examples=150)
    def test_matches_brute_force_oracle(self, a, b):
        result = ks_two_sample(a, b)
        assert abs(result.d_statistic - brute_force_d(a, b)) < 1e-12

    @given(samples, samples)
    @settings(max_examples=100)
    def test_symmetry(self, a, b):
        forward = ks_two_sample(a, b)
        backward = ks_two_sample(b, a)
        assert forward.d_statistic == backward.d_statistic
        assert forward.p_value == backward.p_value

    @given(samples, samples)
    @settings(max_examples=100)
    def test_monotone_transform_invariance(self, a, b):
        plain = ks_two_sample(a, b).d_statistic
        # power-of-two scaling is exact in floats, hence strictly monotone
        scaled = ks_two_sample([x * 4.0 for x in a], [x * 4.0 for x in b]).d_statistic
        assert abs(plain - scaled) < 1e-12
        # rank mapping is strictly monotone by construction
        ranks = {x: i for i, x in enumerate(sorted(set(a) | set(b)))}
        ranked = ks_two_sample([ranks[x] for x in a], [ranks[x] for x in b]).d_statistic
        assert abs(plain - ranked) < 1e-12


class TestKSPValue:
    def test_exact_matches_full_enumeration(self):
        rng = np.random.default_rng(7)
        for _ in range(8):
            n1 = int(rng.integers(2, 7))
            n2 = int(rng.integers(2, 7))
            a, b = rng.random(n1), rng.random(n2)
            result = ks_two_sample(a, b, method="exact")
            oracle = enumerate_exact_p(n1, n2, result.d_statistic)
            assert abs(result.p_value - oracle) < 1e-12

    def test_method_selection_by_sample_product(self):
        small = ks_two_sample(np.arange(10.0), np.arange(10.0) + 0.5)
        assert small.method == "exact"
        assert 10 * 10 <= EXACT_ENUMERATION_LIMIT
        big = ks_two_sample(np.random.default_rng(0).random(150),
                            np.random.default_rng(1).random(150))
        assert big.method == "asymptotic"

    def test_method_override(self):
        a = np.random.default_rng(2).random(20)
        b = np.random.default_rng(3).random(20)
        assert ks_two_sample(a, b, method="asymptotic").method == "asymptotic"
        with pytest.raises(ValueError):
            ks_two_sample(a, b, method="bootstrap")

    def test_p_in_unit_interval(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            a = rng.random(int(rng.integers(1, 30)))
            b = rng.random(int(rng.integers(1, 30)))
            for method in ("exact", "asymptotic"):
                p = ks_two_sample(a, b, method=method).p_value
                assert 0.0 < p <= 1.0

    def test_far_separated_samples_have_tiny_p(self):
        a = np.arange(100.0)
        b = np.arange(100.0) + 1000.0
        result = ks_two_sample(a, b)
        assert result.d_statistic == 1.0
        assert result.p_value < 1e-20

    def test_asymptotic_tracks_exact_in_validity_regime(self):
        # well-separated sizes, away from small-rational ratios, p >= 0.01
        rng = np.random.default_rng(23)
        checked = 0
        for n1, n2 in [(30, 41), (34, 47), (37, 50), (40, 47), (29, 40)]:
            for _ in range(6):
                a, b = rng.random(n1), rng.random(n2)
                exact = ks_two_sample(a, b, method="exact")
                if exact.p_value < 0.01:
                    continue
                asym = ks_two_sample(a, b, method="asymptotic")
                assert abs(asym.p_value - exact.p_value) / exact.p_value < 0.10
                checked += 1
        assert checked >= 10

    def test_ties_still_yield_valid_result(self):
        result = ks_two_sample([1, 1, 1, 2], [1, 2, 2, 2], method="exact")
        assert 0.0 < result.p_value <= 1.0
        assert result.d_statistic == 0.5

    def test_result_validation(self):
        with pytest.raises(ValueError):
            KSResult(d_statistic=1.5, p_value=0.5, n1=3, n2=3, method="exact")
        with pytest.raises(ValueError):
            KSResult(d_statistic=0.5, p_value=0.0, n1=3, n2=3, method="exact")
        with pytest.raises(ValueError):
            KSResult(d_statistic=0.5, p_value=0.5, n1=0, n2=3, method="exact")


# ---------------------------------------------------------------- ECDF


class TestEcdfReport:
    def test_simple_ecdf(self):
        report = ecdf_report({"s": [1.0, 1.0, 2.0]}, feature="views")
        assert report.rows == [(1.0, 2 / 3), (2.0, 1.0)]
        assert report.means == {"s": 4 / 3}

    def test_single_sample_steps_to_one(self):
        report = ecdf_report({"s": [5.0]})
        assert report.rows == [(5.0, 1.0)]

    def test_two_classes_share_grid(self):
        report = ecdf_report({"s": [1.0, 3.0], "d": [2.0]}, feature="views")
        assert report.classes == ("s", "d")
        assert report.rows == [(1.0, 0.5, 0.0), (2.0, 0.5, 1.0), (3.0, 1.0, 1.0)]

    def test_empty_class_rejected(self):
        with pytest.raises(ValueError):
            ecdf_report({"s": []})
        with pytest.raises(ValueError):
            ecdf_report({})

    @given(samples, samples)
    @settings(max_examples=100)
    def test_columns_monotone_and_end_at_one(self, a, b):
        report = ecdf_report({"a": a, "b": b})
        for column in (1, 2):
            values = [row[column] for row in report.rows]
            assert all(x <= y for x, y in zip(values, values[1:]))
            assert values[-1] == 1.0


# ---------------------------------------------------------------- entropy / IG


class TestEntropy:
    def test_balanced_binary_is_one_bit(self):
        assert class_entropy([0, 1, 0, 1]) == 1.0

    def test_single_class_is_zero(self):
        assert class_entropy([1, 1, 1]) == 0.0

    def test_corpus_scale_prior(self):
        labels = [0] * 779 + [1] * 559
        expected = entropy_bits([779, 559])
        assert math.isclose(class_entropy(labels), expected, abs_tol=1e-12)
        assert math.isclose(class_entropy(labels), 0.9804, abs_tol=5e-4)


class TestMdlCutPoints:
    def test_clean_separation_single_cut(self):
        cuts = mdl_cut_points([0.0, 0.0, 1.0, 1.0], [0, 0, 1, 1])
        assert cuts == [0.5]

    def test_uninformative_feature_no_cut(self):
        assert mdl_cut_points([0.0, 0.0, 1.0, 1.0], [0, 1, 1, 0]) == []

    def test_constant_feature_no_cut(self):
        assert mdl_cut_points([2.0, 2.0, 2.0, 2.0], [0, 1, 0, 1]) == []

    def test_mdl_threshold_arithmetic(self):
        # 4 balanced samples, perfect split: gain 1.0 must clear
        # (log2(N-1) + log2(3^k - 2) - k*H(S)) / N with zero child entropies.
        n, k, h_parent = 4, 2, 1.0
        threshold = (math.log2(n - 1) + math.log2(3**k - 2) - k * h_parent) / n
        assert threshold < 1.0
        assert mdl_cut_points([0.0, 0.0, 1.0, 1.0], [0, 0, 1, 1]) == [0.5]

    def test_three_way_split_recurses(self):
        values = [0.0] * 20 + [1.0] * 20 + [2.0] * 20
        labels = [0] * 20 + [1] * 20 + [2] * 20
        assert mdl_cut_points(values, labels) == [0.5, 1.5]

    def test_misaligned_inputs_rejected(self):
        with pytest.raises(ValueError):
            mdl_cut_points([1.0, 2.0], [0])


class TestInfoGain:
    def test_perfect_predictor_equals_class_entropy(self):
        labels = [0, 0, 1, 1]
        assert abs(info_gain([0.0, 0.0, 1.0, 1.0], labels) - 1.0) < 1e-9

    def test_perfect_predictor_at_corpus_prior(self):
        labels = np.array([0] * 779 + [1] * 559)
        values = labels.astype(float)
        assert abs(info_gain(values, labels) - class_entropy(labels)) < 1e-9

    def test_constant_feature_is_zero(self):
        assert info_gain([3.0] * 100, [0, 1] * 50) == 0.0

    def test_noise_feature_scores_zero(self):
        rng = np.random.default_rng(5)
        values = rng.random(200)
        labels = rng.integers(0, 2, 200)
        assert info_gain(values, labels) == 0.0

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_bounded_by_class_entropy(self, seed):
        rng = np.random.default_rng(seed)
        labels = rng.integers(0, 2, 60)
        if len(np.unique(labels)) < 2:
            labels[0], labels[1] = 0, 1
        values = rng.random(60) + labels * rng.random()
        gain = info_gain(values, labels)
        assert 0.0 <= gain <= class_entropy(labels) + 1e-12


class TestStratifiedFolds:
    def test_partition_property(self):
        labels = [0] * 30 + [1] * 20
        folds = stratified_folds(labels, 10, seed=3)
        assert len(folds) == 10
        combined = np.sort(np.concatenate(folds))
        assert np.array_equal(combined, np.arange(50))

    def test_class_balance_within_one(self):
        labels = np.array([0] * 77 + [1] * 55)
        folds = stratified_folds(labels, 10, seed=1)
        for cls in (0, 1):
            per_fold = [int(np.sum(labels[f] == cls)) for f in folds]
            assert max(per_fold) - min(per_fold) <= 1

    def test_deterministic_given_seed(self):
        labels = [0, 1] * 25
        first = stratified_folds(labels, 5, seed=9)
        second = stratified_folds(labels, 5, seed=9)
        assert all(np.array_equal(x, y) for x, y in zip(first, second))

    def test_invalid_fold_counts(self):
        with pytest.raises(ValueError):
            stratified_folds([0, 1], 1)
        with pytest.raises(ValueError):
            stratified_folds([0, 1], 3)


class TestInfoGainRank:
    def _matrix(self, seed=0):
        rng = np.random.default_rng(seed)
        labels = np.array([0] * 60 + [1] * 60)
        strong = labels + rng.normal(0, 0.05, 120)        # nearly perfect
        weak = labels * 0.3 + rng.normal(0, 1.0, 120)     # faint signal
        noise = rng.random(120)                           # no signal
        matrix = np.column_stack([noise, weak, strong])
        return matrix, labels

    def test_ranking_order(self):
        matrix, labels = self._matrix()
        ranked = info_gain_rank(matrix, labels, names=["noise", "weak", "strong"], seed=4)
        assert ranked[0].name == "strong"
        assert ranked[0].mean_info_gain > ranked[-1].mean_info_gain
        assert ranked[-1].name in ("noise", "weak")

    def test_mean_is_average_of_folds(self):
        matrix, labels = self._matrix()
        for attr in info_gain_rank(matrix, labels, seed=4):
            assert len(attr.fold_scores) == 10
            assert math.isclose(
                attr.mean_info_gain, sum(attr.fold_scores) / 10, abs_tol=1e-12
            )

    def test_fold_scores_bounded_by_entropy(self):
        matrix, labels = self._matrix()
        ceiling = class_entropy(labels) + 1e-9
        for attr in info_gain_rank(matrix, labels, seed=4):
            assert all(0.0 <= s <= ceiling for s in attr.fold_scores)

    def test_deterministic_given_seed(self):
        matrix, labels = self._matrix()
        first = info_gain_rank(matrix, labels, seed=11)
        second = info_gain_rank(matrix, labels, seed=11)
        assert first == second

    def test_single_class_rejected(self):
        with pytest.raises(ValueError):
            info_gain_rank([[1.0], [2.0]], [0, 0])

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            info_gain_rank([[1.0], [float("nan")]], [0, 1])

    def test_name_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            info_gain_rank([[1.0, 2.0]] * 4, [0, 1, 0, 1], names=["only-one"])

    def test_ranked_attribute_validation(self):
        with pytest.raises(ValueError):
            RankedAttribute(name="x", mean_info_gain=0.5, fold_scores=(0.1, 0.1))
        with pytest.raises(ValueError):
            RankedAttribute(name="x", mean_info_gain=-0.1, fold_scores=())
