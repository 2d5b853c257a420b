import math
import random

import pytest

from _oracles import pairwise_auc
from modeval.curves import (CalibrationReport, auc, average_precision,
                            break_even_point, calibration_error, lift, pr_curve,
                            roc_curve)
from modeval.dataset import ScoredBinarySet
from modeval.errors import DataError, DefinednessError, UsageError


def random_scored(rng, n=None, tie_grid=None):
    n = n or rng.randint(2, 50)
    while True:
        flags = [rng.random() < 0.5 for _ in range(n)]
        if any(flags) and not all(flags):
            break
    if tie_grid:
        scores = [rng.randrange(tie_grid) / tie_grid for _ in range(n)]
    else:
        scores = [rng.random() for _ in range(n)]
    return ScoredBinarySet(flags, scores)


class TestRocCurve:
    def test_s1_point_list(self, s1):
        curve = roc_curve(s1)
        assert len(curve.points) == 7
        expected = [(0.0, 0.0, math.inf),
                    (0.0, 1 / 3, 0.9), (0.0, 2 / 3, 0.8), (1 / 3, 2 / 3, 0.7),
                    (1 / 3, 1.0, 0.4), (2 / 3, 1.0, 0.3), (1.0, 1.0, 0.2)]
        for point, (fpr, tpr, threshold) in zip(curve.points, expected):
            assert point.fpr == pytest.approx(fpr, abs=1e-15)
            assert point.tpr == pytest.approx(tpr, abs=1e-15)
            assert point.threshold == threshold

    def test_perfect_separation_passes_through_corner(self):
        data = ScoredBinarySet([True, True, False, False], [0.9, 0.8, 0.2, 0.1])
        curve = roc_curve(data)
        assert any(p.fpr == 0.0 and p.tpr == 1.0 for p in curve.points)
        assert auc(curve).value == 1.0

    def test_all_scores_identical(self):
        data = ScoredBinarySet([True, False, True, False], [0.3] * 4)
        curve = roc_curve(data)
        assert [(p.fpr, p.tpr) for p in curve.points] == [(0.0, 0.0), (1.0, 1.0)]
        assert auc(curve).value == 0.5

    def test_single_class_rejected(self):
        with pytest.raises(DefinednessError):
            roc_curve(ScoredBinarySet([True, True], [0.5, 0.6]))

    def test_monotone_axes(self):
        rng = random.Random(61)
        for _ in range(100):
            curve = roc_curve(random_scored(rng, tie_grid=rng.choice([None, 4, 10])))
            points = curve.points
            assert points[0] == (0.0, 0.0, math.inf)
            assert points[-1].fpr == 1.0 and points[-1].tpr == 1.0
            for a, b in zip(points, points[1:]):
                assert b.fpr >= a.fpr and b.tpr >= a.tpr
                assert 0.0 <= b.fpr <= 1.0 and 0.0 <= b.tpr <= 1.0


class TestAuc:
    def test_s1_value(self, s1):
        assert auc(roc_curve(s1)).value == pytest.approx(8 / 9, rel=1e-12)

    def test_matches_pairwise_oracle(self, s1):
        assert auc(roc_curve(s1)).value == pytest.approx(
            pairwise_auc(s1.flags, s1.scores), rel=1e-12)

    def test_oracle_with_ties(self):
        rng = random.Random(67)
        for _ in range(300):
            data = random_scored(rng, tie_grid=rng.choice([None, 3, 8]))
            value = auc(roc_curve(data)).value
            assert value == pytest.approx(pairwise_auc(data.flags, data.scores),
                                          rel=1e-12, abs=1e-12)

    def test_monotone_transform_invariance(self):
        rng = random.Random(71)
        for _ in range(100):
            data = random_scored(rng, tie_grid=rng.choice([None, 5]))
            base = auc(roc_curve(data)).value
            warped = ScoredBinarySet(data.labels,
                                     [math.exp(2.0 * s) for s in data.scores])
            assert auc(roc_curve(warped)).value == base

    def test_sign_flip_reverses(self):
        rng = random.Random(73)
        for _ in range(100):
            data = random_scored(rng, tie_grid=rng.choice([None, 5]))
            base = auc(roc_curve(data)).value
            flipped = ScoredBinarySet(data.labels, [-s for s in data.scores])
            assert auc(roc_curve(flipped)).value == pytest.approx(1.0 - base,
                                                                  rel=1e-12,
                                                                  abs=1e-12)


class TestPrCurve:
    def test_s1_points(self, s1):
        points = pr_curve(s1).points
        expected = [(1 / 3, 1.0, 0.9), (2 / 3, 1.0, 0.8), (2 / 3, 2 / 3, 0.7),
                    (1.0, 3 / 4, 0.4), (1.0, 3 / 5, 0.3), (1.0, 1 / 2, 0.2)]
        assert len(points) == len(expected)
        for point, (recall, precision, threshold) in zip(points, expected):
            assert point.recall == pytest.approx(recall, abs=1e-15)
            assert point.precision == pytest.approx(precision, abs=1e-15)
            assert point.threshold == threshold

    def test_recall_reaches_one(self):
        rng = random.Random(79)
        for _ in range(100):
            data = random_scored(rng, tie_grid=rng.choice([None, 4]))
            points = pr_curve(data).points
            assert points[-1].recall == 1.0
            for a, b in zip(points, points[1:]):
                assert b.recall >= a.recall

    def test_no_positives_rejected(self):
        with pytest.raises(DefinednessError):
            pr_curve(ScoredBinarySet([False, False], [0.2, 0.4]))


class TestAveragePrecision:
    def test_perfect_ranking(self):
        data = ScoredBinarySet([True, True, False], [0.9, 0.8, 0.1])
        assert average_precision(data).value == 1.0

    def test_s1_value(self, s1):
        assert average_precision(s1).value == pytest.approx(11 / 12, rel=1e-12)

    def test_single_positive_ranked_last(self):
        m = 5
        flags = [False] * (m - 1) + [True]
        scores = [float(m - i) for i in range(m)]
        assert average_precision(ScoredBinarySet(flags, scores)).value == \
            pytest.approx(1 / m, rel=1e-12)

    def test_range_and_perfection(self):
        # AP == 1 exactly when every positive outranks every negative
        rng = random.Random(83)
        for _ in range(200):
            data = random_scored(rng, tie_grid=rng.choice([None, 4]))
            value = average_precision(data).value
            assert -1e-12 <= value <= 1.0 + 1e-12
            separable = all(
                sp > sn
                for sp, f1 in zip(data.scores, data.flags) if f1
                for sn, f2 in zip(data.scores, data.flags) if not f2)
            if separable:
                assert value == pytest.approx(1.0, rel=1e-12)
            else:
                assert value < 1.0


class TestBreakEven:
    def test_perfect_ranking(self):
        data = ScoredBinarySet([True, False], [0.9, 0.1])
        assert break_even_point(pr_curve(data)).value == 1.0

    def test_s1_crossing_on_vertex(self, s1):
        # precision == recall == 2/3 exactly at the 0.7 threshold vertex
        assert break_even_point(pr_curve(s1)).value == pytest.approx(2 / 3,
                                                                     rel=1e-12)

    def test_constant_precision_half(self):
        data = ScoredBinarySet([True, False, True, False], [2.0, 2.0, 1.0, 1.0])
        assert break_even_point(pr_curve(data)).value == pytest.approx(0.5,
                                                                       rel=1e-12)

    def test_no_crossing(self):
        data = ScoredBinarySet([True, False, False, False], [0.5] * 4)
        mv = break_even_point(pr_curve(data))
        assert mv.reason == "no_crossing"

    def test_interpolated_crossing(self):
        # ranked [+, -, -, +]: gaps swing from +2/3 at recall 1/2 to -1/4 at 1
        data = ScoredBinarySet([True, False, False, True], [4.0, 3.0, 2.0, 1.0])
        points = pr_curve(data).points
        gaps = [p.precision - p.recall for p in points]
        assert gaps[0] > 0 > gaps[-1]
        value = break_even_point(pr_curve(data)).value
        # hand interpolation between (1/2, 2/3) and (1/2, 1/2): gap hits zero at
        # the second segment; recompute the same walk the long way
        expected = None
        for i in range(len(points) - 1):
            g0, g1 = gaps[i], gaps[i + 1]
            if g0 == 0:
                expected = points[i].recall
                break
            if (g0 > 0) != (g1 > 0):
                s = g0 / (g0 - g1)
                expected = points[i].recall + s * (points[i + 1].recall -
                                                   points[i].recall)
                break
        assert value == pytest.approx(expected, rel=1e-12)
        assert 0.0 <= value <= 1.0


class TestLift:
    def test_perfect_ranking_half(self):
        data = ScoredBinarySet([True, True, False, False], [4.0, 3.0, 2.0, 1.0])
        assert lift(data, 0.5).value == pytest.approx(2.0, rel=1e-12)

    def test_whole_dataset_is_exactly_one(self):
        rng = random.Random(89)
        for _ in range(50):
            data = random_scored(rng)
            assert lift(data, 1.0).value == 1.0

    def test_decimal_fraction_cuts_exactly(self):
        # top 20% of 10 items is exactly 2, despite 0.2 being inexact in binary
        flags = [True, True] + [False] * 8
        scores = [float(10 - i) for i in range(10)]
        assert lift(ScoredBinarySet(flags, scores), 0.2).value == \
            pytest.approx(1.0 / 0.2, rel=1e-12)

    def test_tie_at_cut_flagged(self):
        data = ScoredBinarySet([True, False, True, False], [1.0, 0.5, 0.5, 0.1])
        mv = lift(data, 0.5)
        assert "tie_at_cut" in mv.flags

    def test_fraction_bounds(self, s1):
        for bad in (0.0, -0.5, 1.5):
            with pytest.raises(UsageError):
                lift(s1, bad)

    def test_no_positives(self):
        with pytest.raises(DefinednessError):
            lift(ScoredBinarySet([False, False], [0.1, 0.2]), 0.5)


class TestCalibration:
    def test_alternating_constant_scores(self):
        # 200 cases, all scored 0.5, labels alternating: every window holds 50
        flags = [i % 2 == 0 for i in range(200)]
        report = calibration_error(ScoredBinarySet(flags, [0.5] * 200))
        assert report.cal == 0.0
        assert len(report.window_errors) == 101
        assert report.window_size == 100

    def test_confident_and_wrong(self):
        report = calibration_error(ScoredBinarySet([False] * 120, [1.0] * 120))
        assert report.cal == 1.0
        assert all(e == 1.0 for e in report.window_errors)

    def test_too_few_cases(self):
        with pytest.raises(DataError, match="100"):
            calibration_error(ScoredBinarySet([True] * 50, [0.5] * 50))

    def test_score_out_of_range(self):
        with pytest.raises(DataError):
            calibration_error(ScoredBinarySet([True] * 100, [1.5] * 100))

    def test_single_flip_moves_cal_by_window_share(self):
        n = 150
        flags = [i % 2 == 0 for i in range(n)]
        base = calibration_error(ScoredBinarySet(flags, [0.5] * n))
        assert base.cal == 0.0
        window_count = n - 100 + 1
        for position in (10, 75):
            mutated = list(flags)
            mutated[position] = not mutated[position]
            report = calibration_error(ScoredBinarySet(mutated, [0.5] * n))
            containing = (min(position, n - 100) - max(0, position - 99)) + 1
            expected = containing * (1 / 100) / window_count
            assert report.cal == pytest.approx(expected, rel=1e-12)

    def test_permutation_invariant_with_distinct_scores(self):
        rng = random.Random(97)
        n = 130
        scores = rng.sample([i / 1000 for i in range(1000)], n)
        flags = [rng.random() < s for s in scores]
        base = calibration_error(ScoredBinarySet(flags, scores)).cal
        order = list(range(n))
        rng.shuffle(order)
        shuffled = calibration_error(
            ScoredBinarySet([flags[i] for i in order],
                            [scores[i] for i in order])).cal
        assert shuffled == base

    def test_report_mean_invariant(self):
        rng = random.Random(101)
        scores = [rng.random() for _ in range(110)]
        flags = [rng.random() < 0.5 for _ in range(110)]
        report = calibration_error(ScoredBinarySet(flags, scores))
        assert report.cal == pytest.approx(
            math.fsum(report.window_errors) / len(report.window_errors), rel=1e-15)
