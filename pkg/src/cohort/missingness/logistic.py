"""Ridge-stabilised logistic regression fitted by damped Newton iterations."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConstantPredictor, SingleClass, SpecMismatch
from .stats import level_sort_key

log = logging.getLogger(__name__)

ONE_HOT = "one_hot"
NUMERIC = "numeric"
OTHER = "OTHER"


@dataclass(frozen=True)
class FitOptions:
    ridge: float = 1e-6
    tol: float = 1e-8
    max_iter: int = 100
    pool_below: int = 5


@dataclass
class Encoder:
    """Maps one covariate to design columns (fitted on the training flags)."""

    name: str
    encoding: str
    levels: tuple = ()
    reference: object = None
    numeric_map: dict = field(default_factory=dict)

    @property
    def width(self) -> int:
        return 1 if self.encoding == NUMERIC else len(self.levels)

    def column_names(self) -> list[str]:
        if self.encoding == NUMERIC:
            return [self.name]
        return [f"{self.name}={lv}" for lv in self.levels]

    def _level(self, value):
        if self.encoding == ONE_HOT:
            return value if value in self.levels or value == self.reference else OTHER
        return value

    def encode(self, value) -> list[float]:
        if self.encoding == NUMERIC:
            if value is None:
                raise SpecMismatch(f"record lacks a value for {self.name}")
            if isinstance(value, (int, float, np.integer)) and not isinstance(value, bool):
                return [float(value)]
            if value in self.numeric_map:
                return [float(self.numeric_map[value])]
            raise SpecMismatch(f"{self.name}: unseen level {value!r} for numeric encoding")
        lv = self._level(value)
        return [1.0 if lv == level else 0.0 for level in self.levels]


def fit_encoder(name: str, encoding: str, values: list, pool_below: int) -> Encoder:
    if encoding == NUMERIC:
        if any(v is None for v in values):
            raise SpecMismatch(f"{name} has records without a value")
        strings = sorted({v for v in values if not isinstance(v, (int, np.integer))}, key=level_sort_key)
        enc = Encoder(name, NUMERIC, numeric_map={v: i for i, v in enumerate(strings)})
        if len({tuple(enc.encode(v)) for v in values}) < 2:
            raise ConstantPredictor(f"predictor {name!r} is constant")
        return enc
    counts = Counter(values)
    pooled: Counter = Counter()
    for v, c in counts.items():
        pooled[v if c >= pool_below else OTHER] += c
    levels = sorted((lv for lv in pooled if lv != OTHER), key=level_sort_key)
    if OTHER in pooled:
        levels.append(OTHER)
    if len(levels) < 2:
        raise ConstantPredictor(f"predictor {name!r} has a single level after pooling")
    # The most frequent level is the baseline absorbed by the intercept.
    reference = max(levels, key=lambda lv: (pooled[lv], -levels.index(lv)))
    return Encoder(name, ONE_HOT, tuple(lv for lv in levels if lv != reference), reference)


@dataclass
class LogisticModel:
    predictor_spec: list[tuple[str, str]]
    coefficients: np.ndarray
    converged: bool
    iterations: int
    log_likelihood: float
    encoders: list[Encoder] = field(default_factory=list)
    gradient_norm: float = float("nan")

    @property
    def column_names(self) -> list[str]:
        names = ["intercept"]
        for e in self.encoders:
            names += e.column_names()
        return names

    def odds_ratios(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.coefficients)


def design_matrix(flags, encoders: list[Encoder]) -> np.ndarray:
    rows = []
    for f in flags:
        row = [1.0]
        for e in encoders:
            row += e.encode(f.covariate(e.name))
        rows.append(row)
    width = 1 + sum(e.width for e in encoders)
    return np.array(rows, dtype=float).reshape(len(rows), width)


def _sigmoid(eta: np.ndarray) -> np.ndarray:
    out = np.empty_like(eta)
    pos = eta >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-eta[pos]))
    e = np.exp(eta[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def penalised_log_likelihood(beta, X, y, ridge: float = 0.0) -> float:
    """Bernoulli log-likelihood minus ``ridge / 2`` times the squared non-intercept norm."""
    eta = X @ beta
    ll = float(np.sum(y * eta - np.logaddexp(0.0, eta)))
    return ll - 0.5 * ridge * float(beta[1:] @ beta[1:])


def gradient(beta, X, y, ridge: float = 0.0) -> np.ndarray:
    g = X.T @ (y - _sigmoid(X @ beta))
    g[1:] -= ridge * beta[1:]
    return g


def _newton(X, y, opts: FitOptions):
    beta = np.zeros(X.shape[1])
    # Start from the prevalence log-odds; it is the exact answer for intercept-only fits.
    p = y.mean()
    beta[0] = np.log(p / (1.0 - p))
    obj = penalised_log_likelihood(beta, X, y, opts.ridge)
    penalty = np.full(X.shape[1], opts.ridge)
    penalty[0] = 0.0
    best = (obj, beta.copy())
    g = gradient(beta, X, y, opts.ridge)
    for it in range(1, opts.max_iter + 1):
        if np.max(np.abs(g)) < opts.tol:
            return beta, obj, True, it - 1, g
        mu = _sigmoid(X @ beta)
        w = mu * (1.0 - mu)
        H = (X * w[:, None]).T @ X + np.diag(penalty)
        try:
            step = np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(H, g, rcond=None)[0]
        t = 1.0
        for _ in range(60):
            cand = beta + t * step
            cand_obj = penalised_log_likelihood(cand, X, y, opts.ridge)
            if cand_obj >= obj:
                break
            t *= 0.5
        else:
            log.warning("step halving exhausted at iteration %d", it)
            return best[1], best[0], False, it, g
        beta, obj = cand, cand_obj
        if obj >= best[0]:
            best = (obj, beta.copy())
        g = gradient(beta, X, y, opts.ridge)
    converged = bool(np.max(np.abs(g)) < opts.tol)
    return beta, obj, converged, opts.max_iter, g


def fit_logistic(flags, predictor_spec: list[tuple[str, str]], options: FitOptions | None = None,
                 outcome: str = "missing_school_type") -> LogisticModel:
    """Fit ``outcome ~ predictors`` by Newton's method with step halving.

    Design columns are standardised before fitting, the ridge penalty applies
    on that scale, and the coefficients are mapped back to the original
    encoding. One-hot levels with fewer than ``pool_below`` records are
    pooled into ``OTHER``.
    """
    opts = options or FitOptions()
    y = np.array([getattr(f, outcome) for f in flags], dtype=float)
    if len(set(y.tolist())) < 2:
        raise SingleClass("outcome needs both classes")
    encoders = [fit_encoder(name, enc, [f.covariate(name) for f in flags], opts.pool_below)
                for name, enc in predictor_spec]
    X = design_matrix(flags, encoders)

    mean = X[:, 1:].mean(axis=0) if X.shape[1] > 1 else np.zeros(0)
    sd = X[:, 1:].std(axis=0) if X.shape[1] > 1 else np.ones(0)
    if (sd == 0).any():
        bad = [n for n, s in zip(_names(encoders), sd) if s == 0]
        raise ConstantPredictor(f"constant design columns: {', '.join(bad)}")
    Z = X.copy()
    Z[:, 1:] = (X[:, 1:] - mean) / sd

    beta_z, _, converged, iters, g = _newton(Z, y, opts)
    beta = np.empty_like(beta_z)
    beta[1:] = beta_z[1:] / sd
    beta[0] = beta_z[0] - float(np.sum(beta_z[1:] * mean / sd))
    if not converged:
        log.warning("logistic fit did not converge in %d iterations", iters)
    return LogisticModel(
        predictor_spec=list(predictor_spec),
        coefficients=beta,
        converged=converged,
        iterations=iters,
        log_likelihood=penalised_log_likelihood(beta, X, y, 0.0),
        encoders=encoders,
        gradient_norm=float(np.max(np.abs(g))),
    )


def _names(encoders) -> list[str]:
    out = []
    for e in encoders:
        out += e.column_names()
    return out


def predict_proba(model: LogisticModel, flags) -> np.ndarray:
    """Logistic link over the linear predictor; strictly inside (0, 1)."""
    X = design_matrix(flags, model.encoders)
    p = _sigmoid(X @ model.coefficients)
    eps = np.finfo(float).tiny
    return np.clip(p, eps, np.nextafter(1.0, 0.0))
