"""Multi-criteria model-validation procedures beyond single-metric reporting.

Covers the through-origin slope criterion (k, k', m, n), the external
predictability indicator Rm, the observation-to-parameter adequacy ratio, the
train/validation composite objective, and the normalized reference index for
ranking candidate models.

R-squared here is the squared Pearson correlation of actuals and predictions,
which requires both series to be non-constant; degenerate inputs raise
DefinednessError rather than returning a number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import fsum

from ._stats import sum_sq_dev
from .dataset import MetricValue, PairedSeries
from .errors import DefinednessError, UsageError
from .regression import point_metric

SLOPE_RANGE = (0.85, 1.15)
INDEX_LIMIT = 0.1
RM_THRESHOLD = 0.5
ADEQUACY_RANGE = (3.0, 5.0)

FORMULA_NOTES = {
    "TROPSHA": "k = sum(A*P)/sum(P^2); k' = sum(A*P)/sum(A^2); "
               "Ro2 = 1 - sum((P - k*P)^2)/sum((P - mean(P))^2); "
               "Ro2' = 1 - sum((A - k'*A)^2)/sum((A - mean(A))^2); "
               "m = (R2 - Ro2)/R2; n = (R2 - Ro2')/R2; R2 = squared Pearson R",
    "RM": "Rm = R2 * (1 - sqrt(|R2 - Ro2|)); good fit when Rm > 0.5",
    "ADEQUACY": "ratio = observations / parameters; adequate when ratio >= 3 "
                "(3 to 5 is the recommended band)",
    "OBJ": "OBJ = ((Nt - Nv)/(Nt + Nv)) * (RMSE_t + MAE_t)/R2_t "
           "+ (2*Nv/(Nt + Nv)) * (RMSE_v + MAE_v)/R2_v; lower is better",
    "RI": "RI = mean of min-max normalized (RMSE, MAE, MAPE) across the model "
          "set; lower is better; zero-range columns normalize to 0",
}


@dataclass(frozen=True)
class TropshaReport:
    """Through-origin slopes, their performance indexes, and the pass flags."""

    r2: float
    k: float
    k_prime: float
    ro2: float
    ro2_prime: float
    m_index: float | None
    n_index: float | None
    pass_k: bool
    pass_m: bool
    pass_n: bool
    overall_pass: bool


@dataclass(frozen=True)
class RmReport:
    """External predictability indicator with its pass flag."""

    rm: float
    r2: float
    ro2: float
    passed: bool
    threshold: float = RM_THRESHOLD


@dataclass(frozen=True)
class AdequacyReport:
    """Observations-per-parameter ratio with its verdict."""

    ratio: float
    verdict: str  # below | within | above
    adequate: bool


@dataclass(frozen=True)
class SplitSeries:
    """Train and validation predictions evaluated together."""

    train: PairedSeries
    validation: PairedSeries


@dataclass(frozen=True)
class RiRanking:
    """Per-model normalized metrics, reference indexes, and the ranking."""

    model_ids: tuple[str, ...]
    normalized: dict
    ri: tuple[float, ...]
    ranking: tuple[int, ...]
    tied_columns: tuple[str, ...]


def _squared_pearson(data: PairedSeries) -> float:
    a, p = data.actual, data.predicted
    n = len(a)
    a_mean = fsum(a) / n
    p_mean = fsum(p) / n
    s_aa = sum_sq_dev(a, a_mean)
    s_pp = sum_sq_dev(p, p_mean)
    if s_aa == 0:
        raise DefinednessError("actual series is constant; correlation undefined")
    if s_pp == 0:
        raise DefinednessError("predicted series is constant; correlation undefined")
    s_ap = fsum((ai - a_mean) * (pi - p_mean) for ai, pi in zip(a, p))
    r = max(-1.0, min(1.0, s_ap / math.sqrt(s_aa * s_pp)))
    return r * r


def _origin_slopes(data: PairedSeries) -> tuple[float, float]:
    a, p = data.actual, data.predicted
    s_ap = fsum(ai * pi for ai, pi in zip(a, p))
    s_pp = fsum(pi * pi for pi in p)
    s_aa = fsum(ai * ai for ai in a)
    if s_pp == 0:
        raise DefinednessError("sum(P^2) is zero; through-origin slope k undefined")
    if s_aa == 0:
        raise DefinednessError("sum(A^2) is zero; through-origin slope k' undefined")
    return s_ap / s_pp, s_ap / s_aa


def _ro2(values, slope, centered_ss) -> float:
    # 1 - sum((v - slope*v)^2) / sum((v - mean)^2)
    return 1.0 - fsum((v - slope * v) ** 2 for v in values) / centered_ss


def _tropsha_parts(data: PairedSeries):
    if len(data) < 3:
        raise DefinednessError("slope criterion needs at least 3 observations")
    r2 = _squared_pearson(data)
    k, k_prime = _origin_slopes(data)
    a, p = data.actual, data.predicted
    p_mean = fsum(p) / len(p)
    a_mean = fsum(a) / len(a)
    ro2 = _ro2(p, k, sum_sq_dev(p, p_mean))
    ro2_prime = _ro2(a, k_prime, sum_sq_dev(a, a_mean))
    return r2, k, k_prime, ro2, ro2_prime


def tropsha_criteria(data: PairedSeries, slope_range=SLOPE_RANGE,
                     index_limit: float = INDEX_LIMIT) -> TropshaReport:
    """Slope-through-origin validation with configurable pass thresholds.

    Passes when at least one slope lies within ``slope_range`` and both
    performance indexes are below ``index_limit`` in magnitude.
    """
    r2, k, k_prime, ro2, ro2_prime = _tropsha_parts(data)
    low, high = slope_range
    if r2 == 0:
        m_index = n_index = None
    else:
        m_index = (r2 - ro2) / r2
        n_index = (r2 - ro2_prime) / r2
    pass_k = (low <= k <= high) or (low <= k_prime <= high)
    pass_m = m_index is not None and abs(m_index) < index_limit
    pass_n = n_index is not None and abs(n_index) < index_limit
    return TropshaReport(r2=r2, k=k, k_prime=k_prime, ro2=ro2, ro2_prime=ro2_prime,
                         m_index=m_index, n_index=n_index, pass_k=pass_k,
                         pass_m=pass_m, pass_n=pass_n,
                         overall_pass=pass_k and pass_m and pass_n)


def roy_rm(data: PairedSeries, threshold: float = RM_THRESHOLD) -> RmReport:
    """External predictability indicator Rm = R2 * (1 - sqrt(|R2 - Ro2|))."""
    r2, k, _k_prime, ro2, _ro2_prime = _tropsha_parts(data)
    rm = r2 * (1.0 - math.sqrt(abs(r2 - ro2)))
    return RmReport(rm=rm, r2=r2, ro2=ro2, passed=rm > threshold, threshold=threshold)


def data_adequacy_ratio(observation_count: int, parameter_count: int) -> AdequacyReport:
    """Observations per input parameter; below 3 is flagged as inadequate."""
    observation_count = int(observation_count)
    parameter_count = int(parameter_count)
    if parameter_count < 1:
        raise UsageError(f"parameter count must be >= 1, got {parameter_count}")
    if observation_count < 0:
        raise UsageError(f"observation count must be >= 0, got {observation_count}")
    ratio = observation_count / parameter_count
    low, high = ADEQUACY_RANGE
    if ratio < low:
        verdict = "below"
    elif ratio <= high:
        verdict = "within"
    else:
        verdict = "above"
    return AdequacyReport(ratio=ratio, verdict=verdict, adequate=verdict != "below")


def _split_terms(series: PairedSeries):
    rmse = point_metric("RMSE", series).value
    mae = point_metric("MAE", series).value
    r2 = _squared_pearson(series)
    if r2 == 0:
        raise DefinednessError("squared correlation is zero; objective undefined")
    return rmse, mae, r2


def gandomi_objective(data: SplitSeries) -> MetricValue:
    """Two-term train/validation composite; zero iff both splits fit perfectly."""
    rmse_t, mae_t, r2_t = _split_terms(data.train)
    rmse_v, mae_v, r2_v = _split_terms(data.validation)
    nt, nv = len(data.train), len(data.validation)
    total = nt + nv
    value = (((nt - nv) / total) * (rmse_t + mae_t) / r2_t
             + (2.0 * nv / total) * (rmse_v + mae_v) / r2_v)
    return MetricValue.defined("OBJ", value)


def _min_max_normalize(column):
    low, high = min(column), max(column)
    if high == low:
        return [0.0] * len(column), True
    return [(v - low) / (high - low) for v in column], False


def reference_index_from_metrics(model_ids, triples) -> RiRanking:
    """Rank models by the mean of min-max normalized (RMSE, MAE, MAPE).

    ``triples`` holds one (rmse, mae, mape) per model. Zero-range columns
    normalize to 0 for every model and are reported in ``tied_columns``.
    """
    model_ids = tuple(str(m) for m in model_ids)
    triples = [tuple(float(v) for v in t) for t in triples]
    if len(model_ids) != len(triples):
        raise UsageError(f"{len(model_ids)} model ids but {len(triples)} metric triples")
    if len(model_ids) < 2:
        raise UsageError("reference index needs at least 2 models")
    if len(set(model_ids)) != len(model_ids):
        raise UsageError(f"duplicate model ids in {model_ids}")
    normalized = {}
    tied = []
    for j, name in enumerate(("RMSE", "MAE", "MAPE")):
        column, is_tied = _min_max_normalize([t[j] for t in triples])
        normalized[name] = tuple(column)
        if is_tied:
            tied.append(name)
    ri = tuple(fsum(normalized[name][i] for name in ("RMSE", "MAE", "MAPE")) / 3.0
               for i in range(len(model_ids)))
    ranking = tuple(sorted(range(len(model_ids)), key=ri.__getitem__))
    return RiRanking(model_ids=model_ids, normalized=normalized, ri=ri,
                     ranking=ranking, tied_columns=tuple(tied))


def reference_index(models) -> RiRanking:
    """Evaluate RMSE/MAE/MAPE per (model_id, PairedSeries) pair and rank them."""
    models = list(models)
    if len(models) < 2:
        raise UsageError("reference index needs at least 2 models")
    ids, triples = [], []
    for model_id, series in models:
        triple = []
        for metric_id in ("RMSE", "MAE", "MAPE"):
            mv = point_metric(metric_id, series)
            if not mv.is_defined:
                raise DefinednessError(
                    f"model {model_id!r}: {metric_id} undefined ({mv.reason})")
            triple.append(mv.value)
        ids.append(str(model_id))
        triples.append(tuple(triple))
    return reference_index_from_metrics(ids, triples)
