"""Input data types, CSV ingestion, and confusion-matrix construction.

Every type here is immutable after construction and safe to share across
threads; all operations are pure functions of their inputs. Non-finite values
(NaN, +/-inf) are rejected at ingestion so that downstream definedness
contracts stay testable instead of silently propagating NaN.

CSV dialect: comma separator, first row is a header, ``.`` decimal point,
optional CRLF line endings.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

from .errors import DataError, EmptyInputError, SchemaError, UsageError

POSITIVE = "positive"
NEGATIVE = "negative"

DEFINED = "defined"
UNDEFINED = "undefined"


@dataclass(frozen=True)
class MetricValue:
    """A metric result: either a finite value or an explicit undefined status.

    ``reason`` is a machine-readable token (``zero_actual``,
    ``zero_denominator``, ...) populated exactly when the status is undefined.
    ``dropped_terms`` counts per-term exclusions performed under a lenient
    recomputation; ``flags`` carries advisory markers such as ``tie_at_cut``.
    """

    id: str
    value: float | None
    status: str
    reason: str | None = None
    dropped_terms: int = 0
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        if self.status == DEFINED:
            if self.value is None or not math.isfinite(self.value):
                raise DataError(f"{self.id}: a defined metric must carry a finite value")
            if self.reason is not None:
                raise DataError(f"{self.id}: a defined metric must not carry a reason")
        elif self.status == UNDEFINED:
            if self.value is not None or not self.reason:
                raise DataError(f"{self.id}: an undefined metric needs a reason and no value")
        else:
            raise UsageError(f"{self.id}: unknown status {self.status!r}")

    @classmethod
    def defined(cls, metric_id: str, value: float, dropped_terms: int = 0,
                flags: tuple[str, ...] = ()) -> "MetricValue":
        return cls(metric_id, float(value), DEFINED, None, dropped_terms, tuple(flags))

    @classmethod
    def undefined(cls, metric_id: str, reason: str, dropped_terms: int = 0) -> "MetricValue":
        return cls(metric_id, None, UNDEFINED, reason, dropped_terms)

    @property
    def is_defined(self) -> bool:
        return self.status == DEFINED


def _check_finite(values, name):
    for i, v in enumerate(values):
        if not math.isfinite(v):
            raise DataError(f"{name}[{i}] is not finite: {v!r}")


@dataclass(frozen=True)
class PairedSeries:
    """Aligned actual/predicted observations in the units of the modeled quantity.

    ``ordered`` declares whether index order is a meaningful time/sequence
    order; metrics that difference consecutive actuals (MASE) require it.
    """

    actual: tuple[float, ...]
    predicted: tuple[float, ...]
    ordered: bool = False

    def __post_init__(self):
        actual = tuple(float(a) for a in self.actual)
        predicted = tuple(float(p) for p in self.predicted)
        object.__setattr__(self, "actual", actual)
        object.__setattr__(self, "predicted", predicted)
        if len(actual) != len(predicted):
            raise DataError(
                f"actual has {len(actual)} values but predicted has {len(predicted)}")
        if not actual:
            raise EmptyInputError("a paired series needs at least one observation")
        _check_finite(actual, "actual")
        _check_finite(predicted, "predicted")

    def __len__(self) -> int:
        return len(self.actual)


def _coerce_label(label):
    if label is True:
        return POSITIVE
    if label is False:
        return NEGATIVE
    if label in (POSITIVE, NEGATIVE):
        return label
    raise DataError(f"label must be {POSITIVE!r}/{NEGATIVE!r} or a bool, got {label!r}")


@dataclass(frozen=True)
class ScoredBinarySet:
    """Binary ground-truth labels with real-valued classifier scores.

    Scores are probabilities in [0, 1] when the consuming metric demands one,
    otherwise any real margin. Labels accept booleans (True = positive) or the
    ``POSITIVE``/``NEGATIVE`` constants.
    """

    labels: tuple[str, ...]
    scores: tuple[float, ...]

    def __post_init__(self):
        labels = tuple(_coerce_label(l) for l in self.labels)
        scores = tuple(float(s) for s in self.scores)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "scores", scores)
        if len(labels) != len(scores):
            raise DataError(f"{len(labels)} labels but {len(scores)} scores")
        if not labels:
            raise EmptyInputError("a scored set needs at least one observation")
        _check_finite(scores, "scores")

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def flags(self) -> tuple[bool, ...]:
        """Labels as booleans, True for the positive class."""
        return tuple(l == POSITIVE for l in self.labels)

    @property
    def positive_count(self) -> int:
        return sum(1 for l in self.labels if l == POSITIVE)

    @property
    def negative_count(self) -> int:
        return len(self.labels) - self.positive_count


@dataclass(frozen=True)
class ConfusionMatrix2:
    """2-class count table: true/false positives and negatives."""

    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        for name in ("tp", "fp", "fn", "tn"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise DataError(f"{name} must be a non-negative integer, got {v!r}")
        if self.total < 1:
            raise DataError("a confusion matrix needs at least one observation")

    @property
    def real_positives(self) -> int:
        return self.tp + self.fn

    @property
    def real_negatives(self) -> int:
        return self.fp + self.tn

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class ConfusionMatrixK:
    """K-class count table; rows are actual classes, columns predicted classes."""

    classes: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        classes = tuple(str(c) for c in self.classes)
        counts = tuple(tuple(int(v) for v in row) for row in self.counts)
        object.__setattr__(self, "classes", classes)
        object.__setattr__(self, "counts", counts)
        if len(classes) < 2:
            raise SchemaError("a class confusion table needs at least 2 classes")
        if len(set(classes)) != len(classes):
            raise SchemaError(f"duplicate class ids in {classes}")
        k = len(classes)
        if len(counts) != k or any(len(row) != k for row in counts):
            raise DataError(f"counts must be a {k}x{k} table")
        if any(v < 0 for row in counts for v in row):
            raise DataError("counts must be non-negative")
        if self.total < 1:
            raise DataError("a confusion matrix needs at least one observation")

    @property
    def total(self) -> int:
        return sum(v for row in self.counts for v in row)

    def row_totals(self) -> tuple[int, ...]:
        return tuple(sum(row) for row in self.counts)

    def col_totals(self) -> tuple[int, ...]:
        return tuple(sum(row[j] for row in self.counts) for j in range(len(self.classes)))

    def diagonal_total(self) -> int:
        return sum(self.counts[i][i] for i in range(len(self.classes)))

    def index(self, class_id) -> int:
        try:
            return self.classes.index(str(class_id))
        except ValueError:
            raise SchemaError(f"unknown class {class_id!r}; classes are {self.classes}") from None


# ---------------------------------------------------------------------------
# CSV ingestion


def _decode(source) -> str:
    data = source.read() if hasattr(source, "read") else source
    if isinstance(data, (bytes, bytearray)):
        return bytes(data).decode("utf-8")
    if isinstance(data, str):
        return data
    raise UsageError("CSV source must be bytes, text, or a file-like object")


def _csv_rows(text):
    rows = [row for row in csv.reader(text.splitlines()) if row]
    if not rows:
        raise EmptyInputError("CSV has no header row")
    return rows[0], rows[1:]


def _column_index(header, name):
    try:
        return header.index(name)
    except ValueError:
        raise SchemaError(f"column {name!r} not found in header {header}") from None


def _parse_cell(row, row_number, index, column) -> float:
    try:
        cell = row[index]
    except IndexError:
        raise DataError(f"row {row_number}: missing value in column {column!r}") from None
    try:
        value = float(cell)
    except ValueError:
        raise DataError(
            f"row {row_number}, column {column!r}: cannot parse {cell!r} as a number") from None
    if not math.isfinite(value):
        raise DataError(f"row {row_number}, column {column!r}: non-finite value {cell!r}")
    return value


def load_paired_csv(source, actual_column: str, predicted_column: str,
                    ordered: bool = False, *, drop_bad_rows: bool = False,
                    warnings: list | None = None) -> PairedSeries:
    """Parse a header-bearing CSV into a PairedSeries, keeping file order.

    With ``drop_bad_rows`` an unparseable or non-finite cell discards the
    offending row instead of raising; the count of dropped rows is appended to
    ``warnings`` when a list is supplied.
    """
    header, rows = _csv_rows(_decode(source))
    ai = _column_index(header, actual_column)
    pi = _column_index(header, predicted_column)
    actual, predicted, dropped = [], [], 0
    for number, row in enumerate(rows, start=1):
        try:
            a = _parse_cell(row, number, ai, actual_column)
            p = _parse_cell(row, number, pi, predicted_column)
        except DataError:
            if not drop_bad_rows:
                raise
            dropped += 1
            continue
        actual.append(a)
        predicted.append(p)
    if dropped and warnings is not None:
        warnings.append(f"dropped {dropped} row(s) with unusable cells")
    if not actual:
        raise EmptyInputError("no usable data rows")
    return PairedSeries(actual, predicted, ordered)


def load_scored_csv(source, label_column: str, score_column: str,
                    positive_label: str, *, drop_bad_rows: bool = False,
                    warnings: list | None = None) -> ScoredBinarySet:
    """Parse a header-bearing CSV into a ScoredBinarySet.

    The label column must hold at most two distinct strings; with two, one of
    them must equal ``positive_label``. A file whose only label differs from
    ``positive_label`` loads as all-negative with a warning, so degenerate
    single-class data can still be scored.
    """
    header, rows = _csv_rows(_decode(source))
    li = _column_index(header, label_column)
    si = _column_index(header, score_column)
    raw_labels, scores, dropped = [], [], 0
    for number, row in enumerate(rows, start=1):
        try:
            try:
                label = row[li]
            except IndexError:
                raise DataError(
                    f"row {number}: missing value in column {label_column!r}") from None
            score = _parse_cell(row, number, si, score_column)
        except DataError:
            if not drop_bad_rows:
                raise
            dropped += 1
            continue
        raw_labels.append(label)
        scores.append(score)
    if dropped and warnings is not None:
        warnings.append(f"dropped {dropped} row(s) with unusable cells")
    if not raw_labels:
        raise EmptyInputError("no usable data rows")
    distinct = sorted(set(raw_labels))
    if len(distinct) > 2:
        raise SchemaError(
            f"label column {label_column!r} has {len(distinct)} distinct values "
            f"{distinct}; at most two expected")
    if len(distinct) == 2 and positive_label not in distinct:
        raise SchemaError(
            f"positive label {positive_label!r} not among labels {distinct}")
    if len(distinct) == 1 and distinct[0] != positive_label and warnings is not None:
        warnings.append(
            f"single label {distinct[0]!r} differs from positive label "
            f"{positive_label!r}; all rows treated as negative")
    labels = [POSITIVE if l == positive_label else NEGATIVE for l in raw_labels]
    return ScoredBinarySet(labels, scores)


# ---------------------------------------------------------------------------
# Confusion-matrix construction


def confusion_from_scores(data: ScoredBinarySet, threshold: float) -> ConfusionMatrix2:
    """Tally a 2-class confusion matrix at a decision threshold.

    Ties go positive: score >= threshold predicts the positive class.
    """
    threshold = float(threshold)
    if not math.isfinite(threshold):
        raise UsageError(f"threshold must be finite, got {threshold!r}")
    tp = fp = fn = tn = 0
    for is_positive, score in zip(data.flags, data.scores):
        predicted_positive = score >= threshold
        if is_positive and predicted_positive:
            tp += 1
        elif is_positive:
            fn += 1
        elif predicted_positive:
            fp += 1
        else:
            tn += 1
    return ConfusionMatrix2(tp=tp, fp=fp, fn=fn, tn=tn)


def confusion_from_labels(actual, predicted) -> ConfusionMatrixK:
    """Tally a K-class confusion matrix from two label sequences.

    The class set is the union of values seen, sorted lexicographically, so
    repeated runs on the same data index identically.
    """
    actual = [str(a) for a in actual]
    predicted = [str(p) for p in predicted]
    if len(actual) != len(predicted):
        raise DataError(f"{len(actual)} actual labels but {len(predicted)} predicted")
    if not actual:
        raise EmptyInputError("no observations")
    classes = sorted(set(actual) | set(predicted))
    if len(classes) < 2:
        raise SchemaError(f"need at least 2 distinct classes, saw {classes}")
    index = {c: i for i, c in enumerate(classes)}
    counts = [[0] * len(classes) for _ in classes]
    for a, p in zip(actual, predicted):
        counts[index[a]][index[p]] += 1
    return ConfusionMatrixK(tuple(classes), tuple(tuple(row) for row in counts))


def binarize(matrix: ConfusionMatrixK, positive_class) -> ConfusionMatrix2:
    """One-vs-rest reduction of a K-class matrix to a 2-class matrix."""
    pos = matrix.index(positive_class)
    tp = matrix.counts[pos][pos]
    fn = matrix.row_totals()[pos] - tp
    fp = matrix.col_totals()[pos] - tp
    tn = matrix.total - tp - fn - fp
    return ConfusionMatrix2(tp=tp, fp=fp, fn=fn, tn=tn)
