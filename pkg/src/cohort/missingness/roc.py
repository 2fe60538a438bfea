"""Discrimination and calibration diagnostics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import SingleClass, TooFewRecords


@dataclass(frozen=True)
class RocCurve:
    points: tuple[tuple[float, float], ...]
    auc: float


def _check(scores, labels):
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels).astype(int)
    if s.shape != y.shape:
        raise ValueError("scores and labels differ in length")
    n_pos = int(y.sum())
    if n_pos == 0 or n_pos == len(y):
        raise SingleClass("both classes must be present")
    return s, y, n_pos, len(y) - n_pos


def mann_whitney_auc(scores, labels) -> float:
    """Probability a random positive outscores a random negative, ties counting half."""
    s, y, n_pos, n_neg = _check(scores, labels)
    order = np.argsort(s, kind="mergesort")
    s_sorted, y_sorted = s[order], y[order]
    # Twice the concordance count, kept in integers.
    twice = 0
    neg_below = 0
    i, n = 0, len(s_sorted)
    while i < n:
        j = i
        while j < n and s_sorted[j] == s_sorted[i]:
            j += 1
        pos_here = int(y_sorted[i:j].sum())
        neg_here = (j - i) - pos_here
        twice += pos_here * (2 * neg_below + neg_here)
        neg_below += neg_here
        i = j
    return twice / (2 * n_pos * n_neg)


def roc_points(scores, labels) -> tuple[tuple[float, float], ...]:
    """Threshold-swept (FPR, TPR) points from (0, 0) to (1, 1)."""
    s, y, n_pos, n_neg = _check(scores, labels)
    order = np.argsort(-s, kind="mergesort")
    s_sorted, y_sorted = s[order], y[order]
    distinct = np.r_[np.nonzero(np.diff(s_sorted))[0], len(s_sorted) - 1]
    tp = np.cumsum(y_sorted)[distinct]
    fp = (distinct + 1) - tp
    xs = np.r_[0.0, fp / n_neg]
    ys = np.r_[0.0, tp / n_pos]
    return tuple(zip(xs.tolist(), ys.tolist()))


def trapezoid_area(points) -> float:
    pts = np.asarray(points, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    return float(np.sum(np.diff(x) * (y[1:] + y[:-1]) / 2.0))


def roc_auc(scores, labels) -> RocCurve:
    return RocCurve(roc_points(scores, labels), mann_whitney_auc(scores, labels))


def accuracy_at_half(scores, labels) -> float:
    """Share of records where ``score >= 0.5`` agrees with the label."""
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels).astype(int)
    if len(s) == 0:
        return float("nan")
    return float(np.mean((s >= 0.5).astype(int) == y))


@dataclass(frozen=True)
class CalibrationBin:
    mean_score: float
    observed_rate: float
    count: int


def calibration_table(scores, labels, bins: int = 10) -> list[CalibrationBin]:
    """Equal-frequency bins by score rank; tied scores always share a bin."""
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels).astype(float)
    n = len(s)
    if n < bins:
        raise TooFewRecords(f"{n} records for {bins} bins")
    order = np.argsort(s, kind="mergesort")
    s_sorted, y_sorted = s[order], y[order]
    # Each run of equal scores goes to the bin of its first rank.
    first_rank = np.searchsorted(s_sorted, s_sorted, side="left")
    bin_of = (first_rank * bins) // n
    out = []
    for b in np.unique(bin_of):
        mask = bin_of == b
        out.append(CalibrationBin(float(s_sorted[mask].mean()), float(y_sorted[mask].mean()), int(mask.sum())))
    return out
