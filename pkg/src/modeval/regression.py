"""Pointwise and aggregate error metrics for regression predictions.

The catalog covers the signed/absolute/squared/percentage error families,
geometric means, normalized variants, correlation R, the coefficient of
determination R2, and the scaled error MASE. The residual sign convention is
E_i = A_i - P_i everywhere, so a positive mean error means the model
underestimates on average.

Every metric returns a MetricValue: impossible inputs yield an explicit
undefined status with a machine-readable reason instead of NaN or an
exception. Reasons used here:

  zero_actual         some A_i == 0 under a division by A_i
  zero_pair           |A_i| + |P_i| == 0 under FAE
  constant_actual     deviations of A from its mean vanish
  zero_mean_actual    mean(A) == 0 under NRMSE
  constant_predicted  deviations of P from its mean vanish (R only)
  unordered_series    MASE on a series whose order is not meaningful
  too_short           n < 2 where a difference or an n-1 variance is needed
  zero_naive_error    MASE's naive one-step denominator vanishes

Per-term failures (for example one zero actual under MAPE) make the whole
metric undefined by default; ``skip_undefined_terms`` instead recomputes over
the defined subset and records how many terms were dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import fsum

from ._stats import sum_abs_dev, sum_sq_dev
from .dataset import MetricValue, PairedSeries
from .errors import UsageError

FORMULA_NOTES = {
    "ME": "ME = mean(E_i), E_i = A_i - P_i",
    "MNB": "MNB = mean(E_i / A_i)",
    "MPE": "MPE = 100 * mean(E_i / A_i)",
    "MAE": "MAE = mean(|E_i|)",
    "MAPE": "MAPE = 100 * mean(|E_i / A_i|)",
    "RAE": "RAE = sum(|E_i|) / sum(|A_i - mean(A)|)  [mean-of-actuals baseline]",
    "MARE": "MARE = mean(|E_i / A_i|)",
    "MRAE": "MRAE = mean(|E_i| / |A_i - mean(A)|)  [per-term mean-of-actuals baseline]",
    "GMAE": "GMAE = exp(mean(log|E_i|)); 0 when any E_i == 0",
    "FAE": "FAE = mean(2|E_i| / (|A_i| + |P_i|))",
    "MSE": "MSE = sum(E_i^2) / n",
    "RMSE": "RMSE = sqrt(MSE)",
    "SSE": "SSE = sum(E_i^2)",
    "RSE": "RSE = sum(E_i^2) / sum((A_i - mean(A))^2)",
    "RRSE": "RRSE = sqrt(RSE)",
    "GRMSE": "GRMSE = exp(mean(log|E_i|)); algebraically equal to GMAE",
    "MSPE": "MSPE = 100 * mean((E_i / A_i)^2)",
    "RMSPE": "RMSPE = 100 * sqrt(mean((E_i / A_i)^2))",
    "NRMSE": "NRMSE = RMSE / mean(A)",
    "NRMSE_SD": "NRMSE_SD = RMSE / stdev(A)  [n-1 denominator]",
    "NMSE": "NMSE = MSE / variance(A)  [n-1 denominator, single power]",
    "R2": "R2 = 1 - sum((P_i - A_i)^2) / sum((A_i - mean(A))^2)",
    "R": "R = Pearson correlation of A and P",
    "MASE": "MASE = MAE / mean(|A_i - A_{i-1}|, i=2..n)  [naive one-step scaling; "
            "requires an ordered series]",
}


@dataclass(frozen=True)
class RegressionReport:
    """Batch result: one MetricValue per requested id plus shared statistics."""

    metrics: dict
    n: int
    a_mean: float
    formula_notes: dict


class _SeriesStats:
    """Per-series sums shared by the metric evaluators (computed once)."""

    __slots__ = ("a", "p", "n", "e", "abs_e", "a_mean", "p_mean", "sse",
                 "sum_abs_e", "s_aa", "abs_dev_a", "s_pp", "s_ap", "ordered")

    def __init__(self, data: PairedSeries):
        a, p = data.actual, data.predicted
        self.a, self.p, self.n = a, p, len(a)
        self.e = tuple(ai - pi for ai, pi in zip(a, p))
        self.abs_e = tuple(abs(ei) for ei in self.e)
        self.a_mean = fsum(a) / self.n
        self.p_mean = fsum(p) / self.n
        self.sse = fsum(ei * ei for ei in self.e)
        self.sum_abs_e = fsum(self.abs_e)
        self.s_aa = sum_sq_dev(a, self.a_mean)
        self.abs_dev_a = sum_abs_dev(a, self.a_mean)
        self.s_pp = sum_sq_dev(p, self.p_mean)
        self.s_ap = fsum((ai - self.a_mean) * (pi - self.p_mean) for ai, pi in zip(a, p))
        self.ordered = data.ordered


def residuals(data: PairedSeries) -> tuple[float, ...]:
    """Signed residuals E_i = A_i - P_i, in input order."""
    return tuple(a - p for a, p in zip(data.actual, data.predicted))


def _term_metric(metric_id, terms, bad, skip, reason, aggregate):
    """Aggregate per-term values where individual terms may be undefined."""
    if bad and not skip:
        return MetricValue.undefined(metric_id, reason)
    if not terms:
        return MetricValue.undefined(metric_id, reason, dropped_terms=bad)
    return MetricValue.defined(metric_id, aggregate(terms), dropped_terms=bad)


def _signed_ratio_terms(st):
    terms, bad = [], 0
    for ei, ai in zip(st.e, st.a):
        if ai == 0:
            bad += 1
        else:
            terms.append(ei / ai)
    return terms, bad


def _abs_ratio_terms(st):
    terms, bad = _signed_ratio_terms(st)
    return [abs(t) for t in terms], bad


def _sq_ratio_terms(st):
    terms, bad = _signed_ratio_terms(st)
    return [t * t for t in terms], bad


def _mean(terms):
    return fsum(terms) / len(terms)


def _me(st, skip):
    return MetricValue.defined("ME", fsum(st.e) / st.n)


def _mnb(st, skip):
    terms, bad = _signed_ratio_terms(st)
    return _term_metric("MNB", terms, bad, skip, "zero_actual", _mean)


def _mpe(st, skip):
    inner = _mnb(st, skip)
    if not inner.is_defined:
        return MetricValue.undefined("MPE", inner.reason, inner.dropped_terms)
    return MetricValue.defined("MPE", 100.0 * inner.value, inner.dropped_terms)


def _mae(st, skip):
    return MetricValue.defined("MAE", st.sum_abs_e / st.n)


def _mare(st, skip):
    terms, bad = _abs_ratio_terms(st)
    return _term_metric("MARE", terms, bad, skip, "zero_actual", _mean)


def _mape(st, skip):
    inner = _mare(st, skip)
    if not inner.is_defined:
        return MetricValue.undefined("MAPE", inner.reason, inner.dropped_terms)
    return MetricValue.defined("MAPE", 100.0 * inner.value, inner.dropped_terms)


def _rae(st, skip):
    if st.abs_dev_a == 0:
        return MetricValue.undefined("RAE", "constant_actual")
    return MetricValue.defined("RAE", st.sum_abs_e / st.abs_dev_a)


def _mrae(st, skip):
    terms, bad = [], 0
    for ei, ai in zip(st.abs_e, st.a):
        dev = abs(ai - st.a_mean)
        if dev == 0:
            bad += 1
        else:
            terms.append(ei / dev)
    return _term_metric("MRAE", terms, bad, skip, "constant_actual", _mean)


def _geo_mean_abs(st) -> float:
    # Log-domain product to dodge overflow/underflow; a single exact-zero
    # residual pins the geometric mean at zero.
    if any(v == 0.0 for v in st.abs_e):
        return 0.0
    return math.exp(fsum(math.log(v) for v in st.abs_e) / st.n)


def _gmae(st, skip):
    return MetricValue.defined("GMAE", _geo_mean_abs(st))


def _grmse(st, skip):
    return MetricValue.defined("GRMSE", _geo_mean_abs(st))


def _fae(st, skip):
    terms, bad = [], 0
    for ei, ai, pi in zip(st.abs_e, st.a, st.p):
        denom = abs(ai) + abs(pi)
        if denom == 0:
            bad += 1
        else:
            terms.append(2.0 * ei / denom)
    return _term_metric("FAE", terms, bad, skip, "zero_pair", _mean)


def _mse(st, skip):
    return MetricValue.defined("MSE", st.sse / st.n)


def _rmse(st, skip):
    return MetricValue.defined("RMSE", math.sqrt(st.sse / st.n))


def _sse(st, skip):
    return MetricValue.defined("SSE", st.sse)


def _rse(st, skip):
    if st.s_aa == 0:
        return MetricValue.undefined("RSE", "constant_actual")
    return MetricValue.defined("RSE", st.sse / st.s_aa)


def _rrse(st, skip):
    if st.s_aa == 0:
        return MetricValue.undefined("RRSE", "constant_actual")
    return MetricValue.defined("RRSE", math.sqrt(st.sse / st.s_aa))


def _mspe(st, skip):
    terms, bad = _sq_ratio_terms(st)
    return _term_metric("MSPE", terms, bad, skip, "zero_actual",
                        lambda t: 100.0 * _mean(t))


def _rmspe(st, skip):
    terms, bad = _sq_ratio_terms(st)
    return _term_metric("RMSPE", terms, bad, skip, "zero_actual",
                        lambda t: 100.0 * math.sqrt(_mean(t)))


def _nrmse(st, skip):
    if st.a_mean == 0:
        return MetricValue.undefined("NRMSE", "zero_mean_actual")
    return MetricValue.defined("NRMSE", math.sqrt(st.sse / st.n) / st.a_mean)


def _sample_variance(st):
    # Two-pass n-1 variance; None encodes the undefined reason for the caller.
    if st.n < 2:
        return None, "too_short"
    var = st.s_aa / (st.n - 1)
    if var == 0:
        return None, "constant_actual"
    return var, None


def _nrmse_sd(st, skip):
    var, reason = _sample_variance(st)
    if reason:
        return MetricValue.undefined("NRMSE_SD", reason)
    return MetricValue.defined("NRMSE_SD", math.sqrt(st.sse / st.n) / math.sqrt(var))


def _nmse(st, skip):
    var, reason = _sample_variance(st)
    if reason:
        return MetricValue.undefined("NMSE", reason)
    return MetricValue.defined("NMSE", (st.sse / st.n) / var)


def _r2(st, skip):
    if st.s_aa == 0:
        return MetricValue.undefined("R2", "constant_actual")
    return MetricValue.defined("R2", 1.0 - st.sse / st.s_aa)


def _r(st, skip):
    if st.s_aa == 0:
        return MetricValue.undefined("R", "constant_actual")
    if st.s_pp == 0:
        return MetricValue.undefined("R", "constant_predicted")
    r = st.s_ap / math.sqrt(st.s_aa * st.s_pp)
    return MetricValue.defined("R", max(-1.0, min(1.0, r)))


def _mase(st, skip):
    if not st.ordered:
        return MetricValue.undefined("MASE", "unordered_series")
    if st.n < 2:
        return MetricValue.undefined("MASE", "too_short")
    naive = fsum(abs(st.a[i] - st.a[i - 1]) for i in range(1, st.n)) / (st.n - 1)
    if naive == 0:
        return MetricValue.undefined("MASE", "zero_naive_error")
    return MetricValue.defined("MASE", (st.sum_abs_e / st.n) / naive)


_METRICS = {
    "ME": _me, "MNB": _mnb, "MPE": _mpe, "MAE": _mae, "MAPE": _mape,
    "RAE": _rae, "MARE": _mare, "MRAE": _mrae, "GMAE": _gmae, "FAE": _fae,
    "MSE": _mse, "RMSE": _rmse, "SSE": _sse, "RSE": _rse, "RRSE": _rrse,
    "GRMSE": _grmse, "MSPE": _mspe, "RMSPE": _rmspe, "NRMSE": _nrmse,
    "NRMSE_SD": _nrmse_sd, "NMSE": _nmse, "R2": _r2, "R": _r, "MASE": _mase,
}

METRIC_IDS: tuple[str, ...] = tuple(_METRICS)


def _validate_ids(ids) -> tuple[str, ...]:
    requested = set(ids)
    if not requested:
        raise UsageError("at least one regression metric id is required")
    unknown = sorted(requested - set(_METRICS))
    if unknown:
        raise UsageError(f"unknown regression metric id(s): {', '.join(unknown)}")
    return tuple(i for i in METRIC_IDS if i in requested)


def point_metric(metric_id: str, data: PairedSeries, *,
                 skip_undefined_terms: bool = False) -> MetricValue:
    """Evaluate one metric from the catalog on a paired series."""
    fn = _METRICS.get(metric_id)
    if fn is None:
        raise UsageError(f"unknown regression metric id {metric_id!r}")
    return fn(_SeriesStats(data), skip_undefined_terms)


def regression_report(data: PairedSeries, ids, *,
                      skip_undefined_terms: bool = False) -> RegressionReport:
    """Evaluate a set of metric ids, computing shared statistics once.

    Results are keyed by id and ordered by catalog order regardless of the
    order ids were supplied in.
    """
    selected = _validate_ids(ids)
    st = _SeriesStats(data)
    metrics = {i: _METRICS[i](st, skip_undefined_terms) for i in selected}
    return RegressionReport(metrics=metrics, n=st.n, a_mean=st.a_mean,
                            formula_notes={i: FORMULA_NOTES[i] for i in selected})
