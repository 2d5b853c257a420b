import pytest

from modeval.dataset import ConfusionMatrix2, PairedSeries, ScoredBinarySet


@pytest.fixture
def f1() -> PairedSeries:
    # reference regression fixture: residuals [-1, 0, -1, -1]
    return PairedSeries([1, 2, 3, 4], [2, 2, 4, 5], ordered=True)


@pytest.fixture
def c1() -> ConfusionMatrix2:
    # reference confusion fixture: P = N = 10
    return ConfusionMatrix2(tp=8, fp=5, fn=2, tn=5)


@pytest.fixture
def s1() -> ScoredBinarySet:
    # reference ranking fixture: positives [0.9, 0.8, 0.4], negatives [0.7, 0.3, 0.2]
    return ScoredBinarySet([True, True, True, False, False, False],
                           [0.9, 0.8, 0.4, 0.7, 0.3, 0.2])
