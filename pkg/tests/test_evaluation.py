from __future__ import annotations

import numpy as np
import pytest

import oracles
from vadkit.core import MetricUndefinedError, ScoreSeries, VideoMeta
from vadkit.evaluation import (
    average_precision,
    expand_lattice,
    expand_scores,
    roc_auc,
    threshold_detections,
)


class TestExpandScores:
    def test_nearest_with_earlier_midpoint(self):
        got = expand_lattice([0, 16], [0.0, 1.0], 32)
        assert got[:9].tolist() == [0.0] * 9  # frames 0..8, midpoint 8 -> earlier
        assert got[9:].tolist() == [1.0] * 23

    def test_single_lattice_point_is_constant(self):
        got = expand_lattice([0], [0.7], 10)
        assert got.tolist() == [0.7] * 10

    def test_stride_one_is_identity(self):
        values = [0.1, 0.5, 0.9, 0.2]
        got = expand_lattice([0, 1, 2, 3], values, 4)
        assert got.tolist() == values

    def test_lattice_positions_kept_exactly(self):
        rng = np.random.default_rng(2)
        lattice = list(range(0, 200, 16))
        values = rng.uniform(0, 1, len(lattice)).tolist()
        got = expand_lattice(lattice, values, 200)
        for f, v in zip(lattice, values):
            assert got[f] == v

    def test_hold_mode(self):
        got = expand_lattice([0, 16], [0.0, 1.0], 32, mode="hold")
        assert got[:16].tolist() == [0.0] * 16
        assert got[16:].tolist() == [1.0] * 16

    def test_series_wrapper_uses_refined(self):
        series = ScoreSeries("v", (0, 16), (0.1, 0.9), refined=(0.25, 0.75))
        meta = VideoMeta("v", 20, 30.0)
        got = expand_scores(series, meta)
        assert got[0] == 0.25
        assert got[19] == 0.75


class TestRocAuc:
    def test_perfect_separation(self):
        assert roc_auc([0.9, 0.1, 0.8, 0.3], [1, 0, 1, 0]) == 1.0

    def test_all_ties_is_half(self):
        assert roc_auc([0.4] * 6, [1, 0, 1, 0, 1, 0]) == 0.5

    def test_derived_example(self):
        assert roc_auc([0.2, 0.8, 0.6, 0.4], [0, 1, 0, 1]) == 0.75
        assert oracles.pairwise_auc([0.2, 0.8, 0.6, 0.4], [0, 1, 0, 1]) == 0.75

    def test_single_class_undefined(self):
        with pytest.raises(MetricUndefinedError):
            roc_auc([0.1, 0.2], [1, 1])
        with pytest.raises(MetricUndefinedError):
            roc_auc([0.1, 0.2], [0, 0])

    def test_matches_pair_counting_oracle(self):
        rng = np.random.default_rng(13)
        for _ in range(30):
            n = int(rng.integers(5, 200))
            scores = rng.choice([0.0, 0.25, 0.5, 0.6, 1.0], n)
            labels = rng.integers(0, 2, n)
            if labels.sum() in (0, n):
                continue
            got = roc_auc(scores, labels)
            want = oracles.pairwise_auc(scores, labels)
            assert got == pytest.approx(want, abs=1e-9)

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(14)
        scores = rng.uniform(0, 1, 300)
        labels = rng.integers(0, 2, 300)
        base = roc_auc(scores, labels)
        assert roc_auc(np.exp(5 * scores), labels) == pytest.approx(base, abs=1e-12)
        assert roc_auc(scores ** 3 + 2, labels) == pytest.approx(base, abs=1e-12)

    def test_label_flip_complement(self):
        rng = np.random.default_rng(15)
        scores = rng.choice([0.0, 0.3, 0.3, 0.9], 100)
        labels = rng.integers(0, 2, 100)
        total = roc_auc(scores, labels) + roc_auc(scores, 1 - labels)
        assert total == pytest.approx(1.0, abs=1e-12)


class TestAveragePrecision:
    def test_derived_example(self):
        got = average_precision([0.9, 0.8, 0.7], [1, 0, 1])
        assert got == pytest.approx(5 / 6, abs=1e-12)

    def test_positives_ranked_first(self):
        assert average_precision([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]) == 1.0

    def test_all_positive_labels(self):
        assert average_precision([0.5, 0.1, 0.9], [1, 1, 1]) == 1.0

    def test_no_positives_undefined(self):
        with pytest.raises(MetricUndefinedError):
            average_precision([0.4, 0.2], [0, 0])

    def test_matches_rank_walk_oracle(self):
        rng = np.random.default_rng(16)
        for _ in range(30):
            n = int(rng.integers(3, 150))
            scores = rng.choice([0.0, 0.25, 0.5, 1.0], n)
            labels = rng.integers(0, 2, n)
            if labels.sum() == 0:
                continue
            got = average_precision(scores, labels)
            want = oracles.precision_at_positives_ap(scores, labels)
            assert got == pytest.approx(want, abs=1e-9)

    def test_tie_perturbation_robustness(self):
        rng = np.random.default_rng(18)
        for _ in range(20):
            n = int(rng.integers(10, 120))
            scores = rng.choice([0.1, 0.5, 0.5, 0.5, 0.9], n)
            labels = rng.integers(0, 2, n)
            if labels.sum() == 0:
                continue
            base = average_precision(scores, labels)
            # distinct epsilons < 1e-12, decreasing with index, preserve
            # the documented tie order
            eps = (n - np.arange(n)) * 1e-15
            perturbed = average_precision(scores + eps, labels)
            assert abs(perturbed - base) < 1e-9


class TestBruteForceScale:
    def test_metrics_match_oracles_at_n2000(self):
        rng = np.random.default_rng(20)
        scores = rng.choice(np.linspace(0, 1, 11), 2000)
        labels = rng.integers(0, 2, 2000)
        assert roc_auc(scores, labels) == pytest.approx(
            oracles.pairwise_auc(scores, labels), abs=1e-9
        )
        assert average_precision(scores, labels) == pytest.approx(
            oracles.precision_at_positives_ap(scores, labels), abs=1e-9
        )


class TestThresholdDetections:
    def test_run_extraction(self):
        assert threshold_detections([0, 1, 1, 0], 0.5) == [(1, 2)]

    def test_zero_threshold_covers_video(self):
        assert threshold_detections([0.2, 0.4, 0.1], 0.0) == [(0, 2)]

    def test_threshold_above_max_yields_nothing(self):
        assert threshold_detections([0.9, 0.8], 1.0) == []

    def test_multiple_runs(self):
        scores = [0.9, 0.1, 0.8, 0.8, 0.0, 0.7]
        assert threshold_detections(scores, 0.5) == [(0, 0), (2, 3), (5, 5)]

    def test_threshold_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            threshold_detections([0.5], 1.5)
