"""Cross-tabulation and Pearson chi-square test of independence."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateTable, ZeroMarginal

_TINY = 1e-300


@dataclass(frozen=True)
class ContingencyTable:
    row_labels: tuple
    col_labels: tuple
    counts: np.ndarray

    def row_rates(self) -> np.ndarray:
        """Share of the last column (the flagged outcome) within each row."""
        totals = self.counts.sum(axis=1)
        return np.divide(self.counts[:, -1], totals, out=np.zeros(len(totals)), where=totals > 0)


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    degrees_of_freedom: int
    p_value: float
    log_p_value: float

    def p_text(self) -> str:
        if self.p_value < _TINY:
            return "<1e-300"
        return f"{self.p_value:.4g}"


def level_sort_key(level):
    if level is None:
        return (2, "")
    if isinstance(level, (int, np.integer)):
        return (0, int(level))
    return (1, str(level))


def crosstab(flags, by: str) -> ContingencyTable:
    """Counts of missing_school_type 0/1 per level of covariate ``by``."""
    counts: dict = {}
    for f in flags:
        level = f.covariate(by)
        row = counts.setdefault(level, [0, 0])
        row[f.missing_school_type] += 1
    levels = sorted(counts, key=level_sort_key)
    if len(levels) < 2:
        raise DegenerateTable(f"covariate {by!r} has {len(levels)} level(s)")
    labels = tuple("NA" if lv is None else lv for lv in levels)
    return ContingencyTable(labels, (0, 1), np.array([counts[lv] for lv in levels], dtype=np.int64))


# -- regularised incomplete gamma -------------------------------------------------

def _log_gamma_series(a: float, x: float) -> float:
    """log P(a, x) by the power series; converges fast for x < a + 1."""
    term = 1.0 / a
    total = term
    n = a
    for _ in range(10_000):
        n += 1.0
        term *= x / n
        total += term
        if abs(term) < abs(total) * 1e-17:
            break
    return math.log(total) - x + a * math.log(x) - math.lgamma(a)


def _log_gamma_cf(a: float, x: float) -> float:
    """log Q(a, x) by Lentz's continued fraction; for x >= a + 1."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10_000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.log(h) - x + a * math.log(x) - math.lgamma(a)


def log_gammaincc(a: float, x: float) -> float:
    """Natural log of the regularised upper incomplete gamma Q(a, x)."""
    if a <= 0:
        raise ValueError("a must be positive")
    if x <= 0:
        return 0.0
    if x < a + 1.0:
        p = math.exp(_log_gamma_series(a, x))
        return math.log1p(-p) if p < 1.0 else -math.inf
    return _log_gamma_cf(a, x)


def gammaincc(a: float, x: float) -> float:
    return math.exp(log_gammaincc(a, x))


def chi2_sf(statistic: float, df: int) -> float:
    return gammaincc(df / 2.0, statistic / 2.0)


def chi_square_test(table: ContingencyTable) -> ChiSquareResult:
    """Pearson statistic without continuity correction and its upper-tail p-value."""
    obs = np.asarray(table.counts, dtype=float)
    if obs.ndim != 2 or obs.shape[0] < 2 or obs.shape[1] < 2:
        raise DegenerateTable("chi-square needs at least a 2x2 table")
    rows, cols = obs.sum(axis=1), obs.sum(axis=0)
    if (rows <= 0).any() or (cols <= 0).any():
        raise ZeroMarginal("every row and column total must be positive")
    expected = np.outer(rows, cols) / obs.sum()
    stat = float(((obs - expected) ** 2 / expected).sum())
    df = (obs.shape[0] - 1) * (obs.shape[1] - 1)
    log_p = log_gammaincc(df / 2.0, stat / 2.0)
    p = math.exp(log_p) if log_p > -745 else 0.0
    return ChiSquareResult(stat, df, min(1.0, max(0.0, p)), log_p)
