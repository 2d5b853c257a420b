"""Fitness and error metrics for evaluating regression and classification models.

A small, dependency-free library plus a ``modeval`` CLI. Metrics never return
NaN: results are MetricValue objects carrying either a finite value or an
explicit undefined status with a machine-readable reason.
"""

__version__ = "0.1.0"

from .dataset import (ConfusionMatrix2, ConfusionMatrixK, MetricValue, NEGATIVE,
                      PairedSeries, POSITIVE, ScoredBinarySet, binarize,
                      confusion_from_labels, confusion_from_scores,
                      load_paired_csv, load_scored_csv)
from .errors import (DataError, DefinednessError, EmptyInputError, MetricsError,
                     SchemaError, UsageError)

__all__ = [
    "__version__",
    "ConfusionMatrix2", "ConfusionMatrixK", "MetricValue", "NEGATIVE",
    "PairedSeries", "POSITIVE", "ScoredBinarySet", "binarize",
    "confusion_from_labels", "confusion_from_scores", "load_paired_csv",
    "load_scored_csv",
    "DataError", "DefinednessError", "EmptyInputError", "MetricsError",
    "SchemaError", "UsageError",
]
