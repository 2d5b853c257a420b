"""Confusion-matrix, probabilistic, margin, and distance metrics for classifiers.

Zero-denominator policy: every rate returns an undefined status rather than
0, infinity, or NaN, and composite metrics propagate undefinedness. Reasons
used here:

  zero_denominator       a rate or distance denominator is zero
  undefined_component    a constituent rate of a composite is undefined
  zero_precision_recall  precision and recall are both zero under F-beta
  degenerate_marginals   chance agreement p_e == 1 under Cohen's kappa

Log-style losses floor every logarithm argument at ``CLAMP_EPSILON`` so a
zero probability costs -log(1e-15) instead of blowing up, while an exact 1
still costs exactly 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import fsum

from .dataset import (POSITIVE, ConfusionMatrix2, ConfusionMatrixK, MetricValue,
                      PairedSeries, ScoredBinarySet)
from .errors import DataError, UsageError

CLAMP_EPSILON = 1e-15

FORMULA_NOTES = {
    "TPR": "TPR = TP / (TP + FN)",
    "TNR": "TNR = TN / (TN + FP)",
    "PPV": "PPV = TP / (TP + FP)",
    "NPV": "NPV = TN / (TN + FN)",
    "FPR": "FPR = FP / (FP + TN)",
    "FNR": "FNR = FN / (FN + TP)",
    "FDR": "FDR = FP / (FP + TP)",
    "FOR": "FOR = FN / (FN + TN)  [complement of NPV]",
    "LR_PLUS": "LR+ = TPR / FPR",
    "LR_MINUS": "LR- = FNR / TNR",
    "DOR": "DOR = LR+ / LR-  [= (TP*TN)/(FP*FN)]",
    "ACC": "ACC = (TP + TN) / (TP + TN + FP + FN)",
    "F_BETA": "F_beta = (1 + b^2)*TP / ((1 + b^2)*TP + b^2*FN + FP)",
    "MCC": "MCC = (TP*TN - FP*FN) / sqrt((TP+FP)(TP+FN)(TN+FP)(TN+FN))  "
           "[four-factor denominator]",
    "BM": "BM = TPR + TNR - 1",
    "MK": "MK = PPV + NPV - 1",
    "ACA": "ACA = w*TPR + (1 - w)*TNR  [weighted per-class recall]",
    "BACC": "BACC = mean of per-class recall (empty classes excluded)",
    "KAPPA": "kappa = (p_o - p_e) / (1 - p_e)",
    "HAMMING": "HAMMING = fraction of positions where actual != predicted",
    "LOG_LOSS": "LOG_LOSS = -mean(log p[true class]); log arguments floored at 1e-15",
    "MXE": "MXE = -mean(y*log(s) + (1-y)*log(1-s)); log arguments floored at 1e-15",
    "BRIER": "BRIER = mean((s_i - y_i)^2), y in {0,1}",
    "HINGE": "HINGE = mean(max(0, 1 - q*y)), q = +/-1",
    "CM": "CM = sum(|A_i - P_i| / (|A_i| + |P_i|))",
    "WHD": "WHD = sum(|A_i - P_i| / max(A_i, P_i))  [non-negative inputs assumed]",
}


@dataclass(frozen=True)
class RateSet:
    """The eight confusion-matrix rates; complements pair up where defined."""

    tpr: MetricValue
    tnr: MetricValue
    ppv: MetricValue
    npv: MetricValue
    fpr: MetricValue
    fnr: MetricValue
    fdr: MetricValue
    for_rate: MetricValue

    def as_dict(self) -> dict:
        return {"TPR": self.tpr, "TNR": self.tnr, "PPV": self.ppv, "NPV": self.npv,
                "FPR": self.fpr, "FNR": self.fnr, "FDR": self.fdr, "FOR": self.for_rate}


def _rate(metric_id: str, numerator: int, denominator: int) -> MetricValue:
    if denominator == 0:
        return MetricValue.undefined(metric_id, "zero_denominator")
    return MetricValue.defined(metric_id, numerator / denominator)


def rates(matrix: ConfusionMatrix2) -> RateSet:
    """All eight basic rates of a 2-class confusion matrix."""
    tp, fp, fn, tn = matrix.tp, matrix.fp, matrix.fn, matrix.tn
    return RateSet(
        tpr=_rate("TPR", tp, tp + fn),
        tnr=_rate("TNR", tn, tn + fp),
        ppv=_rate("PPV", tp, tp + fp),
        npv=_rate("NPV", tn, tn + fn),
        fpr=_rate("FPR", fp, fp + tn),
        fnr=_rate("FNR", fn, fn + tp),
        fdr=_rate("FDR", fp, fp + tp),
        for_rate=_rate("FOR", fn, fn + tn),
    )


def likelihood_ratios(matrix: ConfusionMatrix2):
    """Positive/negative likelihood ratios and the diagnostic odds ratio."""
    r = rates(matrix)

    def ratio(metric_id, num, den):
        if not (num.is_defined and den.is_defined):
            return MetricValue.undefined(metric_id, "undefined_component")
        if den.value == 0:
            return MetricValue.undefined(metric_id, "zero_denominator")
        return MetricValue.defined(metric_id, num.value / den.value)

    lr_plus = ratio("LR_PLUS", r.tpr, r.fpr)
    lr_minus = ratio("LR_MINUS", r.fnr, r.tnr)
    dor = ratio("DOR", lr_plus, lr_minus)
    return lr_plus, lr_minus, dor


def accuracy(matrix: ConfusionMatrix2) -> MetricValue:
    return MetricValue.defined("ACC", (matrix.tp + matrix.tn) / matrix.total)


def f_beta(matrix: ConfusionMatrix2, beta: float) -> MetricValue:
    """Weighted harmonic mean of precision and recall.

    Evaluated from the counts, (1+b^2)TP / ((1+b^2)TP + b^2 FN + FP), which
    extends the rate form to matrices where exactly one of precision/recall
    is undefined. Precision and recall both undefined, or both zero, yields
    an undefined result.
    """
    beta = float(beta)
    if not beta > 0:
        raise UsageError(f"beta must be positive, got {beta!r}")
    metric_id = f"F{beta:g}"
    tp, fp, fn = matrix.tp, matrix.fp, matrix.fn
    if tp + fp == 0 and tp + fn == 0:
        return MetricValue.undefined(metric_id, "undefined_component")
    if tp == 0 and fp > 0 and fn > 0:
        return MetricValue.undefined(metric_id, "zero_precision_recall")
    b2 = beta * beta
    return MetricValue.defined(metric_id, (1.0 + b2) * tp / ((1.0 + b2) * tp + b2 * fn + fp))


def mcc(matrix: ConfusionMatrix2) -> MetricValue:
    tp, fp, fn, tn = matrix.tp, matrix.fp, matrix.fn, matrix.tn
    product = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    if product == 0:
        return MetricValue.undefined("MCC", "zero_denominator")
    value = (tp * tn - fp * fn) / math.sqrt(product)
    return MetricValue.defined("MCC", max(-1.0, min(1.0, value)))


def _combine(metric_id, first, second, combine):
    if not (first.is_defined and second.is_defined):
        return MetricValue.undefined(metric_id, "undefined_component")
    return MetricValue.defined(metric_id, combine(first.value, second.value))


def informedness_markedness(matrix: ConfusionMatrix2):
    """Bookmaker informedness (Youden's J) and markedness."""
    r = rates(matrix)
    bm = _combine("BM", r.tpr, r.tnr, lambda x, y: x + y - 1.0)
    mk = _combine("MK", r.ppv, r.npv, lambda x, y: x + y - 1.0)
    return bm, mk


def average_class_accuracy(matrix: ConfusionMatrix2, w: float) -> MetricValue:
    """Recall of the two classes weighted by w; w = 0.5 is balanced accuracy.

    By caller convention the positive class is the minority class, so w > 0.5
    makes the minority class contribute more.
    """
    w = float(w)
    if not 0.0 < w < 1.0:
        raise UsageError(f"weight must lie strictly between 0 and 1, got {w!r}")
    r = rates(matrix)
    return _combine("ACA", r.tpr, r.tnr, lambda x, y: w * x + (1.0 - w) * y)


def balanced_accuracy(matrix: ConfusionMatrixK) -> MetricValue:
    """Mean per-class recall; classes with no actual observations are excluded."""
    recalls = []
    excluded = 0
    for i, row in enumerate(matrix.counts):
        row_total = sum(row)
        if row_total == 0:
            excluded += 1
        else:
            recalls.append(row[i] / row_total)
    flags = ("empty_classes_excluded",) if excluded else ()
    return MetricValue.defined("BACC", fsum(recalls) / len(recalls),
                               dropped_terms=excluded, flags=flags)


def cohen_kappa(matrix: ConfusionMatrixK) -> MetricValue:
    """Agreement beyond chance between the actual and predicted labelings."""
    total = matrix.total
    pe_numerator = sum(r * c for r, c in zip(matrix.row_totals(), matrix.col_totals()))
    total_sq = total * total
    if pe_numerator == total_sq:
        return MetricValue.undefined("KAPPA", "degenerate_marginals")
    p_o = matrix.diagonal_total() / total
    p_e = pe_numerator / total_sq
    return MetricValue.defined("KAPPA", (p_o - p_e) / (1.0 - p_e))


def hamming_loss(actual, predicted) -> MetricValue:
    """Fraction of positions where the predicted label differs from the actual."""
    actual = list(actual)
    predicted = list(predicted)
    if len(actual) != len(predicted):
        raise DataError(f"{len(actual)} actual labels but {len(predicted)} predicted")
    if not actual:
        raise DataError("no observations")
    mismatches = sum(1 for a, p in zip(actual, predicted) if a != p)
    return MetricValue.defined("HAMMING", mismatches / len(actual))


@dataclass(frozen=True)
class ProbabilityMatrix:
    """Per-observation probability vectors over K classes plus the true class."""

    rows: tuple[tuple[float, ...], ...]
    true_class: tuple[int, ...]

    def __post_init__(self):
        rows = tuple(tuple(float(v) for v in row) for row in self.rows)
        true_class = tuple(int(c) for c in self.true_class)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "true_class", true_class)
        if len(rows) != len(true_class):
            raise DataError(f"{len(rows)} probability rows but {len(true_class)} true classes")
        if not rows:
            raise DataError("no observations")
        width = len(rows[0])
        for i, row in enumerate(rows):
            if len(row) != width:
                raise DataError(f"row {i} has {len(row)} entries, expected {width}")
            if any(not 0.0 <= v <= 1.0 for v in row):
                raise DataError(f"row {i} has probabilities outside [0, 1]")
            if abs(fsum(row) - 1.0) > 1e-9:
                raise DataError(f"row {i} does not sum to 1 within 1e-9")
        for i, c in enumerate(true_class):
            if not 0 <= c < width:
                raise DataError(f"true_class[{i}] = {c} outside 0..{width - 1}")

    def __len__(self) -> int:
        return len(self.rows)


def _clamped_log(x: float) -> float:
    return math.log(x if x > CLAMP_EPSILON else CLAMP_EPSILON)


def log_loss(probs: ProbabilityMatrix) -> MetricValue:
    """Mean negative log probability assigned to the true class.

    Exactly zero iff every true-class probability is 1; a zero probability
    contributes -log(1e-15) per the clamp.
    """
    terms = [-_clamped_log(row[c]) for row, c in zip(probs.rows, probs.true_class)]
    return MetricValue.defined("LOG_LOSS", fsum(terms) / len(terms))


def _check_probability_scores(data: ScoredBinarySet):
    for i, s in enumerate(data.scores):
        if not 0.0 <= s <= 1.0:
            raise DataError(f"scores[{i}] = {s!r} outside [0, 1]")


def mean_cross_entropy(data: ScoredBinarySet) -> MetricValue:
    """Binary cross entropy of scores interpreted as positive-class probabilities.

    Coincides with log_loss on the equivalent two-column probability matrix.
    """
    _check_probability_scores(data)
    terms = [-_clamped_log(s) if is_pos else -_clamped_log(1.0 - s)
             for is_pos, s in zip(data.flags, data.scores)]
    return MetricValue.defined("MXE", fsum(terms) / len(terms))


def brier_score(data: ScoredBinarySet) -> MetricValue:
    """Mean squared gap between forecast probability and the 0/1 outcome."""
    _check_probability_scores(data)
    terms = [(s - (1.0 if is_pos else 0.0)) ** 2
             for is_pos, s in zip(data.flags, data.scores)]
    return MetricValue.defined("BRIER", fsum(terms) / len(terms))


def hinge_loss(data: ScoredBinarySet) -> MetricValue:
    """Mean hinge penalty max(0, 1 - q*y) with q = +1/-1 and y the raw score."""
    terms = [max(0.0, 1.0 - (1.0 if is_pos else -1.0) * s)
             for is_pos, s in zip(data.flags, data.scores)]
    return MetricValue.defined("HINGE", fsum(terms) / len(terms))


def _negative_input_flags(data: PairedSeries) -> tuple[str, ...]:
    if any(v < 0 for v in data.actual) or any(v < 0 for v in data.predicted):
        return ("negative_inputs",)
    return ()


def canberra(data: PairedSeries) -> MetricValue:
    """Canberra distance between the actual and predicted vectors (a sum)."""
    flags = _negative_input_flags(data)
    terms = []
    for a, p in zip(data.actual, data.predicted):
        denom = abs(a) + abs(p)
        if denom == 0:
            return MetricValue.undefined("CM", "zero_denominator")
        terms.append(abs(a - p) / denom)
    return MetricValue.defined("CM", fsum(terms), flags=flags)


def wave_hedges(data: PairedSeries) -> MetricValue:
    """Wave Hedges distance; each gap is normalized by the pairwise maximum."""
    flags = _negative_input_flags(data)
    terms = []
    for a, p in zip(data.actual, data.predicted):
        denom = max(a, p)
        if denom == 0:
            return MetricValue.undefined("WHD", "zero_denominator")
        terms.append(abs(a - p) / denom)
    return MetricValue.defined("WHD", fsum(terms), flags=flags)


def probability_matrix_from_scores(data: ScoredBinarySet) -> ProbabilityMatrix:
    """Two-column probability matrix [1-s, s] with the positive class as column 1."""
    _check_probability_scores(data)
    rows = tuple((1.0 - s, s) for s in data.scores)
    true_class = tuple(1 if l == POSITIVE else 0 for l in data.labels)
    return ProbabilityMatrix(rows, true_class)
