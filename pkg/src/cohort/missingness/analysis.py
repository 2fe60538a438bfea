"""End-to-end missingness analysis and its markdown report."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import CohortError, InvalidConfig
from .flags import COVARIATES, MissingnessFlagRecord, build_flags
from .logistic import NUMERIC, ONE_HOT, FitOptions, LogisticModel, fit_logistic, predict_proba
from .roc import CalibrationBin, RocCurve, accuracy_at_half, calibration_table, roc_auc
from .stats import ChiSquareResult, ContingencyTable, chi_square_test, crosstab

log = logging.getLogger(__name__)

CROSSTAB_COVARIATES = ("decade", "degree", "province_birth", "sex")
DEFAULT_PREDICTORS = ("decade", "degree", "province_birth")
TABLE2_PREDICTORS = ("sex", "decade", "province_birth")


@dataclass
class AnalysisResult:
    flags: list[MissingnessFlagRecord]
    crosstabs: dict[str, ContingencyTable] = field(default_factory=dict)
    chi_square: dict[str, ChiSquareResult] = field(default_factory=dict)
    model: LogisticModel | None = None
    scores: np.ndarray | None = None
    roc: RocCurve | None = None
    accuracy: float | None = None
    calibration: list[CalibrationBin] = field(default_factory=list)
    notices: list[str] = field(default_factory=list)

    @property
    def prevalence(self) -> float:
        if not self.flags:
            return float("nan")
        return sum(f.missing_school_type for f in self.flags) / len(self.flags)


def predictor_spec(names=DEFAULT_PREDICTORS, encoding: str = ONE_HOT, table2_mode: bool = False):
    unknown = [n for n in names if n not in COVARIATES]
    if unknown:
        raise InvalidConfig(f"unknown predictors: {', '.join(unknown)}; known: {', '.join(COVARIATES)}")
    if encoding not in (ONE_HOT, NUMERIC):
        raise InvalidConfig(f"unknown encoding {encoding!r}")
    if table2_mode:
        return [(n, NUMERIC) for n in TABLE2_PREDICTORS]
    return [(n, encoding) for n in names]


def analyse(v3, spec=None, options: FitOptions | None = None, bins: int = 10) -> AnalysisResult:
    """Flags, cross-tabs, chi-square tests, logistic fit, ROC and calibration.

    Degenerate inputs (empty population, a single outcome class, a one-level
    covariate) never raise here; they are recorded in ``notices``.
    """
    spec = spec or predictor_spec()
    result = AnalysisResult(flags=build_flags(v3))
    flags = result.flags
    if not flags:
        result.notices.append("empty population: no analysis performed")
        return result

    for cov in CROSSTAB_COVARIATES:
        try:
            table = crosstab(flags, cov)
        except CohortError as exc:
            result.notices.append(f"crosstab by {cov}: {type(exc).__name__}: {exc}")
            continue
        result.crosstabs[cov] = table
        try:
            result.chi_square[cov] = chi_square_test(table)
        except CohortError as exc:
            result.notices.append(f"chi-square by {cov}: {type(exc).__name__}: {exc}")

    labels = np.array([f.missing_school_type for f in flags])
    try:
        model = fit_logistic(flags, spec, options)
    except CohortError as exc:
        result.notices.append(f"logistic model: {type(exc).__name__}: {exc}")
        return result
    result.model = model
    result.scores = predict_proba(model, flags)
    result.accuracy = accuracy_at_half(result.scores, labels)
    try:
        result.roc = roc_auc(result.scores, labels)
    except CohortError as exc:
        result.notices.append(f"ROC: {type(exc).__name__}: {exc}")
    try:
        result.calibration = calibration_table(result.scores, labels, bins)
    except CohortError as exc:
        result.notices.append(f"calibration: {type(exc).__name__}: {exc}")
    return result


def _fmt(x: float, digits: int = 4) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "n/a"
    return f"{x:.{digits}f}"


def _odds(c: float) -> str:
    if c > 700:
        return "inf"
    return f"{math.exp(c):.6g}"


def render_report(result: AnalysisResult, level_labels: dict | None = None) -> str:
    level_labels = level_labels or {}
    n = len(result.flags)
    missing = sum(f.missing_school_type for f in result.flags)
    lines = ["# Missingness analysis: missing_school_type", ""]
    lines += [f"Population: {n}", f"missing_school_type = 1: {missing}"]
    lines += [f"Prevalence: {_fmt(result.prevalence)}", ""]

    for cov, table in result.crosstabs.items():
        names = level_labels.get(cov, {})
        lines += [f"## Cross-tabulation by {cov}", "",
                  "| level | n | missing | missing % |", "|---|---:|---:|---:|"]
        totals = table.counts.sum(axis=1)
        for lv, t, m, r in zip(table.row_labels, totals, table.counts[:, 1], table.row_rates()):
            label = names.get(lv, lv)
            lines.append(f"| {label} | {int(t)} | {int(m)} | {100 * r:.2f} |")
        lines.append("")

    if result.chi_square:
        lines += ["## Chi-square tests of association", "",
                  "| covariate | statistic | df | p-value |", "|---|---:|---:|---|"]
        for cov, res in result.chi_square.items():
            lines.append(f"| {cov} | {res.statistic:.2f} | {res.degrees_of_freedom} | {res.p_text()} |")
        lines.append("")

    m = result.model
    if m is not None:
        spec = ", ".join(f"{name} ({enc})" for name, enc in m.predictor_spec)
        lines += ["## Logistic model", "", f"Predictors: {spec}",
                  f"Converged: {'yes' if m.converged else 'no'} after {m.iterations} iterations "
                  f"(max |gradient| {m.gradient_norm:.2e})",
                  f"Log-likelihood: {m.log_likelihood:.4f}", "",
                  "| term | coefficient | exp(coefficient) |", "|---|---:|---:|"]
        for name, c in zip(m.column_names, m.coefficients):
            lines.append(f"| {name} | {c:.6f} | {_odds(c)} |")
        lines.append("")
        lines += ["## Model performance", "",
                  f"Accuracy (threshold 0.5, ties positive): {_fmt(result.accuracy)}"]
        if result.roc is not None:
            lines.append(f"AUC: {_fmt(result.roc.auc)}")
        lines.append("")
        if result.calibration:
            lines += ["## Calibration (equal-frequency bins)", "",
                      "| bin | n | mean predicted | observed rate |", "|---:|---:|---:|---:|"]
            for i, b in enumerate(result.calibration, start=1):
                lines.append(f"| {i} | {b.count} | {b.mean_score:.4f} | {b.observed_rate:.4f} |")
            lines.append("")

    if result.notices:
        lines += ["## Notices", ""] + [f"- {msg}" for msg in result.notices] + [""]
    return "\n".join(lines)
