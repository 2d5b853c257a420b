"""Command-line front end emitting deterministic JSON reports.

Report layout (fixed key order): tool_version, command, input_digest,
metrics, warnings. Each metrics entry carries id, value (null when
undefined), status, optional reason/dropped_terms/flags, and formula_note.
Floats serialize with round-trip precision; identical inputs and flags
produce byte-identical reports.

Exit codes: 0 success, 1 usage error, 2 data/schema error, 3 when --strict
sees an undefined requested metric. Diagnostics go to stderr, reports to
stdout.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

from . import __version__
from . import classification, curves, regression, validation
from .dataset import (ConfusionMatrixK, MetricValue, NEGATIVE, PairedSeries,
                      POSITIVE, confusion_from_scores, load_paired_csv,
                      load_scored_csv)
from .errors import DataError, SchemaError, UsageError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_STRICT = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; the exit-code contract wants 1
    def error(self, message):
        raise UsageError(message)


def _entry(mv: MetricValue, note: str) -> dict:
    out = {"id": mv.id, "value": mv.value, "status": mv.status}
    if mv.reason is not None:
        out["reason"] = mv.reason
    if mv.dropped_terms:
        out["dropped_terms"] = mv.dropped_terms
    if mv.flags:
        out["flags"] = list(mv.flags)
    out["formula_note"] = note
    return out


def _plain_entry(entry_id: str, value, note: str = "") -> dict:
    return {"id": entry_id, "value": value, "status": "defined", "formula_note": note}


def _render_table(doc) -> str:
    lines = [f"tool_version: {doc['tool_version']}",
             f"command: {doc['command']}",
             f"input_digest: {doc['input_digest']}",
             f"{'ID':<14} {'VALUE':<24} {'STATUS':<10} REASON"]
    for entry in doc["metrics"]:
        value = entry["value"]
        text = "null" if value is None else (repr(value) if isinstance(value, float)
                                             else str(value))
        lines.append(f"{entry['id']:<14} {text:<24} {entry['status']:<10} "
                     f"{entry.get('reason', '')}".rstrip())
    for warning in doc["warnings"]:
        lines.append(f"warning: {warning}")
    return "\n".join(lines) + "\n"


def _finish(args, digest: str, entries: list, warnings: list) -> int:
    doc = {
        "tool_version": __version__,
        "command": "modeval " + " ".join(args.raw_argv),
        "input_digest": digest,
        "metrics": entries,
        "warnings": warnings,
    }
    if args.format == "table":
        sys.stdout.write(_render_table(doc))
    else:
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    strict = getattr(args, "strict", False)
    if strict and any(e["status"] == "undefined" for e in entries):
        return EXIT_STRICT
    return EXIT_OK


def _read_bytes(path: str, hasher) -> bytes:
    data = Path(path).read_bytes()
    hasher.update(data)
    return data


def _parse_metric_list(text: str, catalog, kind: str) -> list[str]:
    if text.strip().lower() == "all":
        return list(catalog)
    ids = [t.strip().upper() for t in text.split(",") if t.strip()]
    if not ids:
        raise UsageError(f"empty {kind} metric list")
    unknown = [i for i in ids if i not in catalog]
    if unknown:
        raise UsageError(f"unknown {kind} metric id(s): {', '.join(unknown)}")
    # catalog order, duplicates collapsed
    requested = set(ids)
    return [i for i in catalog if i in requested]


# ---------------------------------------------------------------------------
# regress


def _cmd_regress(args) -> int:
    hasher = hashlib.sha256()
    raw = _read_bytes(args.input, hasher)
    warnings: list[str] = []
    data = load_paired_csv(raw, args.actual_col, args.predicted_col, args.ordered,
                           drop_bad_rows=args.drop_bad_rows, warnings=warnings)
    ids = _parse_metric_list(args.metrics, regression.METRIC_IDS, "regression")
    report = regression.regression_report(data, ids,
                                          skip_undefined_terms=args.skip_undefined_terms)
    entries = [_entry(report.metrics[i], report.formula_notes[i]) for i in ids]
    return _finish(args, hasher.hexdigest(), entries, warnings)


# ---------------------------------------------------------------------------
# classify

CLASSIFY_IDS = ("TPR", "TNR", "PPV", "NPV", "FPR", "FNR", "FDR", "FOR",
                "LR_PLUS", "LR_MINUS", "DOR", "ACC", "F1", "F2", "MCC", "BM",
                "MK", "ACA", "BACC", "KAPPA", "HAMMING", "LOG_LOSS", "BRIER",
                "MXE", "HINGE", "CM", "WHD")


class _ClassifyContext:
    """Lazily shares the confusion matrix and rate set across requested ids."""

    def __init__(self, data, threshold, aca_weight):
        self.data = data
        self.threshold = threshold
        self.matrix = confusion_from_scores(data, threshold)
        self.aca_weight = aca_weight
        self._rates = None
        self._lr = None

    def rates(self):
        if self._rates is None:
            self._rates = classification.rates(self.matrix)
        return self._rates

    def likelihood(self):
        if self._lr is None:
            self._lr = classification.likelihood_ratios(self.matrix)
        return self._lr

    def kmatrix(self) -> ConfusionMatrixK:
        m = self.matrix
        return ConfusionMatrixK((NEGATIVE, POSITIVE),
                                ((m.tn, m.fp), (m.fn, m.tp)))

    def label_pairs(self):
        actual = self.data.labels
        predicted = tuple(POSITIVE if s >= self.threshold else NEGATIVE
                          for s in self.data.scores)
        return actual, predicted

    def indicator_series(self) -> PairedSeries:
        return PairedSeries([1.0 if f else 0.0 for f in self.data.flags],
                            self.data.scores)


def _classify_value(metric_id: str, ctx: _ClassifyContext) -> tuple[MetricValue, str]:
    notes = classification.FORMULA_NOTES
    if metric_id in ("TPR", "TNR", "PPV", "NPV", "FPR", "FNR", "FDR", "FOR"):
        return ctx.rates().as_dict()[metric_id], notes[metric_id]
    if metric_id in ("LR_PLUS", "LR_MINUS", "DOR"):
        trio = dict(zip(("LR_PLUS", "LR_MINUS", "DOR"), ctx.likelihood()))
        return trio[metric_id], notes[metric_id]
    if metric_id == "ACC":
        return classification.accuracy(ctx.matrix), notes["ACC"]
    if metric_id == "F1":
        return classification.f_beta(ctx.matrix, 1.0), notes["F_BETA"]
    if metric_id == "F2":
        return classification.f_beta(ctx.matrix, 2.0), notes["F_BETA"]
    if metric_id == "MCC":
        return classification.mcc(ctx.matrix), notes["MCC"]
    if metric_id == "BM":
        return classification.informedness_markedness(ctx.matrix)[0], notes["BM"]
    if metric_id == "MK":
        return classification.informedness_markedness(ctx.matrix)[1], notes["MK"]
    if metric_id == "ACA":
        return (classification.average_class_accuracy(ctx.matrix, ctx.aca_weight),
                notes["ACA"] + f" [w = {ctx.aca_weight:g}]")
    if metric_id == "BACC":
        return classification.balanced_accuracy(ctx.kmatrix()), notes["BACC"]
    if metric_id == "KAPPA":
        return classification.cohen_kappa(ctx.kmatrix()), notes["KAPPA"]
    if metric_id == "HAMMING":
        actual, predicted = ctx.label_pairs()
        return classification.hamming_loss(actual, predicted), notes["HAMMING"]
    if metric_id == "LOG_LOSS":
        probs = classification.probability_matrix_from_scores(ctx.data)
        return classification.log_loss(probs), notes["LOG_LOSS"]
    if metric_id == "BRIER":
        return classification.brier_score(ctx.data), notes["BRIER"]
    if metric_id == "MXE":
        return classification.mean_cross_entropy(ctx.data), notes["MXE"]
    if metric_id == "HINGE":
        return classification.hinge_loss(ctx.data), notes["HINGE"]
    if metric_id == "CM":
        return (classification.canberra(ctx.indicator_series()),
                notes["CM"] + " [on (indicator label, score) pairs]")
    if metric_id == "WHD":
        return (classification.wave_hedges(ctx.indicator_series()),
                notes["WHD"] + " [on (indicator label, score) pairs]")
    raise UsageError(f"unknown classification metric id {metric_id!r}")


def _cmd_classify(args) -> int:
    if not math.isfinite(args.threshold):
        raise UsageError(f"--threshold must be finite, got {args.threshold!r}")
    hasher = hashlib.sha256()
    raw = _read_bytes(args.input, hasher)
    warnings: list[str] = []
    data = load_scored_csv(raw, args.label_col, args.score_col, args.positive,
                           drop_bad_rows=args.drop_bad_rows, warnings=warnings)
    ids = _parse_metric_list(args.metrics, CLASSIFY_IDS, "classification")
    ctx = _ClassifyContext(data, args.threshold, args.aca_weight)
    m = ctx.matrix
    entries = [_plain_entry("TP", m.tp), _plain_entry("FP", m.fp),
               _plain_entry("FN", m.fn), _plain_entry("TN", m.tn)]
    for metric_id in ids:
        mv, note = _classify_value(metric_id, ctx)
        entries.append(_entry(mv, note))
    return _finish(args, hasher.hexdigest(), entries, warnings)


# ---------------------------------------------------------------------------
# curves


def _format_float(value: float) -> str:
    return repr(float(value))


def _write_points(path: str, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("threshold,x,y\n")
        for threshold, x, y in rows:
            fh.write(f"{_format_float(threshold)},{_format_float(x)},"
                     f"{_format_float(y)}\n")


def _cmd_curves(args) -> int:
    hasher = hashlib.sha256()
    raw = _read_bytes(args.input, hasher)
    warnings: list[str] = []
    data = load_scored_csv(raw, args.label_col, args.score_col, args.positive,
                           warnings=warnings)
    entries = []
    if args.kind == "roc":
        curve = curves.roc_curve(data)
        entries.append(_entry(curves.auc(curve), curves.FORMULA_NOTES["AUC"]))
        points = [(p.threshold, p.fpr, p.tpr) for p in curve.points]
    else:
        curve = curves.pr_curve(data)
        entries.append(_entry(curves.average_precision(data),
                              curves.FORMULA_NOTES["AP"]))
        entries.append(_entry(curves.break_even_point(curve),
                              curves.FORMULA_NOTES["BREAK_EVEN"]))
        points = [(p.threshold, p.recall, p.precision) for p in curve.points]
    if args.lift_fraction is not None:
        entries.append(_entry(curves.lift(data, args.lift_fraction),
                              curves.FORMULA_NOTES["LIFT"]
                              + f" [fraction = {args.lift_fraction:g}]"))
    if args.cal:
        report = curves.calibration_error(data)
        entries.append(_plain_entry(
            "CAL", report.cal,
            curves.FORMULA_NOTES["CAL"] + f" [{len(report.window_errors)} windows]"))
    if args.emit_points:
        _write_points(args.emit_points, points)
    return _finish(args, hasher.hexdigest(), entries, warnings)


# ---------------------------------------------------------------------------
# validate


def _require(args, names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"--check {args.check} requires {', '.join(missing)}")


def _load_series(path: str, args, hasher, warnings) -> "PairedSeries":
    raw = _read_bytes(path, hasher)
    return load_paired_csv(raw, args.actual_col, args.predicted_col,
                           warnings=warnings)


def _bool_entry(entry_id: str, value: bool, note: str = "") -> dict:
    return _plain_entry(entry_id, bool(value), note)


def _cmd_validate(args) -> int:
    hasher = hashlib.sha256()
    warnings: list[str] = []
    note = validation.FORMULA_NOTES
    entries: list[dict] = []

    if args.check == "tropsha":
        _require(args, ("input",))
        series = _load_series(args.input, args, hasher, warnings)
        rep = validation.tropsha_criteria(series)
        entries = [_plain_entry("R2", rep.r2, note["TROPSHA"]),
                   _plain_entry("K", rep.k), _plain_entry("K_PRIME", rep.k_prime),
                   _plain_entry("RO2", rep.ro2),
                   _plain_entry("RO2_PRIME", rep.ro2_prime)]
        for entry_id, value in (("M_INDEX", rep.m_index), ("N_INDEX", rep.n_index)):
            if value is None:
                entries.append(_entry(MetricValue.undefined(entry_id, "zero_denominator"), ""))
            else:
                entries.append(_plain_entry(entry_id, value))
        entries += [_bool_entry("PASS_K", rep.pass_k, "0.85 <= k or k' <= 1.15"),
                    _bool_entry("PASS_M", rep.pass_m, "|m| < 0.1"),
                    _bool_entry("PASS_N", rep.pass_n, "|n| < 0.1"),
                    _bool_entry("OVERALL_PASS", rep.overall_pass)]
    elif args.check == "rm":
        _require(args, ("input",))
        series = _load_series(args.input, args, hasher, warnings)
        rep = validation.roy_rm(series)
        entries = [_plain_entry("RM", rep.rm, note["RM"]),
                   _plain_entry("R2", rep.r2), _plain_entry("RO2", rep.ro2),
                   _bool_entry("PASS_RM", rep.passed, f"Rm > {rep.threshold:g}")]
    elif args.check == "adequacy":
        _require(args, ("observations", "parameters"))
        hasher.update(f"observations={args.observations},"
                      f"parameters={args.parameters}".encode())
        rep = validation.data_adequacy_ratio(args.observations, args.parameters)
        entries = [_plain_entry("RATIO", rep.ratio, note["ADEQUACY"]),
                   _plain_entry("VERDICT", rep.verdict),
                   _bool_entry("ADEQUATE", rep.adequate)]
    elif args.check == "objective":
        _require(args, ("train", "validation"))
        train = _load_series(args.train, args, hasher, warnings)
        holdout = _load_series(args.validation, args, hasher, warnings)
        mv = validation.gandomi_objective(validation.SplitSeries(train, holdout))
        entries = [_entry(mv, note["OBJ"])]
    elif args.check == "ri":
        models = args.model or []
        if len(models) < 2:
            raise UsageError("--check ri requires at least two --model NAME=PATH flags")
        pairs = []
        for model_arg in models:
            name, sep, path = model_arg.partition("=")
            if not sep or not name or not path:
                raise UsageError(f"--model expects NAME=PATH, got {model_arg!r}")
            pairs.append((name, _load_series(path, args, hasher, warnings)))
        ranking = validation.reference_index(pairs)
        for index in ranking.ranking:
            entries.append(_plain_entry(f"RI[{ranking.model_ids[index]}]",
                                        ranking.ri[index], note["RI"]))
        entries.append(_plain_entry(
            "RANKING", ",".join(ranking.model_ids[i] for i in ranking.ranking)))
        if ranking.tied_columns:
            warnings.append("tied metric column(s): " + ",".join(ranking.tied_columns))
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown check {args.check!r}")
    return _finish(args, hasher.hexdigest(), entries, warnings)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> _Parser:
    parser = _Parser(prog="modeval",
                     description="Fitness and error metrics for model predictions")
    sub = parser.add_subparsers(dest="command", required=True)

    regress = sub.add_parser("regress", help="regression error metrics")
    regress.add_argument("--input", required=True)
    regress.add_argument("--actual-col", required=True)
    regress.add_argument("--predicted-col", required=True)
    regress.add_argument("--ordered", action="store_true",
                         help="declare index order meaningful (enables MASE)")
    regress.add_argument("--metrics", default="all")
    regress.add_argument("--format", choices=("json", "table"), default="json")
    regress.add_argument("--skip-undefined-terms", action="store_true")
    regress.add_argument("--strict", action="store_true")
    regress.add_argument("--drop-bad-rows", action="store_true")
    regress.set_defaults(func=_cmd_regress)

    classify = sub.add_parser("classify", help="threshold classification metrics")
    classify.add_argument("--input", required=True)
    classify.add_argument("--label-col", required=True)
    classify.add_argument("--score-col", required=True)
    classify.add_argument("--positive", required=True)
    classify.add_argument("--threshold", type=float, default=0.5)
    classify.add_argument("--metrics", default="all")
    classify.add_argument("--aca-weight", type=float, default=0.5)
    classify.add_argument("--format", choices=("json", "table"), default="json")
    classify.add_argument("--strict", action="store_true")
    classify.add_argument("--drop-bad-rows", action="store_true")
    classify.set_defaults(func=_cmd_classify)

    curves_cmd = sub.add_parser("curves", help="ROC / precision-recall sweeps")
    curves_cmd.add_argument("--kind", choices=("roc", "pr"), required=True)
    curves_cmd.add_argument("--input", required=True)
    curves_cmd.add_argument("--label-col", required=True)
    curves_cmd.add_argument("--score-col", required=True)
    curves_cmd.add_argument("--positive", required=True)
    curves_cmd.add_argument("--emit-points", metavar="PATH")
    curves_cmd.add_argument("--lift-fraction", type=float)
    curves_cmd.add_argument("--cal", action="store_true")
    curves_cmd.add_argument("--format", choices=("json", "table"), default="json")
    curves_cmd.set_defaults(func=_cmd_curves)

    validate = sub.add_parser("validate", help="multi-criteria model validation")
    validate.add_argument("--check", required=True,
                          choices=("tropsha", "rm", "adequacy", "objective", "ri"))
    validate.add_argument("--input")
    validate.add_argument("--actual-col", default="actual")
    validate.add_argument("--predicted-col", default="predicted")
    validate.add_argument("--observations", type=int)
    validate.add_argument("--parameters", type=int)
    validate.add_argument("--train")
    validate.add_argument("--validation")
    validate.add_argument("--model", action="append", metavar="NAME=PATH")
    validate.add_argument("--format", choices=("json", "table"), default="json")
    validate.set_defaults(func=_cmd_validate)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        args.raw_argv = argv
        return args.func(args)
    except UsageError as exc:
        print(f"modeval: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SchemaError, DataError) as exc:
        print(f"modeval: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"modeval: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SystemExit as exc:  # argparse --help
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
