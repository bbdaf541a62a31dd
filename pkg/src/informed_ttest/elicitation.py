"""Fitting shifted/scaled Student-t distributions to elicited evidence.

Three fitting surfaces share one family and one optimizer:

* chip histograms from a roulette-style elicitation grid,
* a (33%, 50%, 66%) percentile triple,
* a tabulated posterior density (so that today's posterior can serve as
  tomorrow's prior in a replication analysis).

The degrees of freedom direction is nearly flat for most targets, so all
free-df fits run a fixed schedule of restarts from perturbed
moment-matched starting points and keep the lowest loss; ties break
lexicographically on the parameters. Everything is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import optimize
from scipy.special import betainc, gammaln

from .bayes import bf10, posterior_summary, transitive_bf
from .errors import DomainError, InsufficientInformationError
from .model import (
    DEFAULT_CAUCHY_PRIOR,
    EffectSizePrior,
    PosteriorGrid,
    StudentTPrior,
    TTestSummary,
    Truncation,
    prior_quantile,
)
from .special import student_t_quantile

__all__ = [
    "DF_MIN",
    "DF_MAX",
    "PercentileFeedback",
    "ElicitationSheet",
    "FitResult",
    "ReplicationChainResult",
    "fit_t_to_histogram",
    "fit_t_to_quantiles",
    "fit_t_to_density_grid",
    "replication_chain",
]

DF_MIN = 1.0
DF_MAX = 500.0

_NM_OPTIONS = {"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000, "maxfev": 8000}


@dataclass(frozen=True)
class PercentileFeedback:
    p33: float
    p50: float
    p66: float


@dataclass(frozen=True)
class ElicitationSheet:
    """Chips allocated to bins on a fixed grid of effect size values."""

    bin_edges: Tuple[float, ...]
    chip_counts: Tuple[int, ...]
    direction_hint: Optional[Truncation] = None

    def __post_init__(self):
        edges = tuple(float(e) for e in self.bin_edges)
        counts = tuple(int(c) for c in self.chip_counts)
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "chip_counts", counts)
        if self.direction_hint is not None:
            object.__setattr__(self, "direction_hint", Truncation(self.direction_hint))
        if len(edges) != len(counts) + 1:
            raise DomainError(
                f"need len(bin_edges) == len(chip_counts) + 1, got "
                f"{len(edges)} edges for {len(counts)} bins"
            )
        if len(counts) < 1:
            raise DomainError("at least one bin is required")
        if any(b <= a for a, b in zip(edges, edges[1:])):
            raise DomainError("bin edges must be strictly increasing")
        if any(c < 0 for c in counts):
            raise DomainError("chip counts must be non-negative")
        if sum(counts) < 1:
            raise DomainError("at least one chip must be placed")


@dataclass(frozen=True)
class FitResult:
    prior: StudentTPrior
    loss: float
    percentile_feedback: PercentileFeedback
    converged: bool
    df_at_bound: bool = False


def _feedback(prior: StudentTPrior) -> PercentileFeedback:
    return PercentileFeedback(
        prior_quantile(prior, 0.33),
        prior_quantile(prior, 0.50),
        prior_quantile(prior, 0.66),
    )


def _t_cdf_vec(x: np.ndarray, loc: float, scale: float, df: float) -> np.ndarray:
    z = (np.asarray(x, dtype=float) - loc) / scale
    tail = 0.5 * betainc(0.5 * df, 0.5, df / (df + z * z))
    return np.where(z < 0.0, tail, 1.0 - tail)


def _t_pdf_vec(x: np.ndarray, loc: float, scale: float, df: float) -> np.ndarray:
    z = (np.asarray(x, dtype=float) - loc) / scale
    log_norm = (
        gammaln(0.5 * (df + 1.0))
        - gammaln(0.5 * df)
        - 0.5 * (math.log(math.pi) + math.log(df))
        - math.log(scale)
    )
    return np.exp(log_norm - 0.5 * (df + 1.0) * np.log1p(z * z / df))


def _clamp_df(u: float) -> float:
    return min(max(math.exp(u), DF_MIN), DF_MAX)


def _scale_for_sd(sd: float, df: float) -> float:
    # match the spread of a t with the given df (finite variance only past 2)
    if df > 2.5:
        return sd * math.sqrt((df - 2.0) / df)
    return sd


def _multistart_fit(loss_full, loc0: float, sd0: float, df_fixed: Optional[float]):
    """Nelder-Mead from a fixed schedule of starts; lowest loss wins, ties
    break lexicographically on (location, scale, df)."""
    starts_spec = [
        (loc0, sd0, 5.0),
        (loc0, 1.5 * sd0, 3.0),
        (loc0, sd0 / 1.5, 30.0),
        (loc0 + 0.25 * sd0, sd0, 10.0),
        (loc0 - 0.25 * sd0, sd0, 2.0),
    ]
    candidates = []
    for loc_s, sd_s, df_s in starts_spec:
        if df_fixed is None:
            x0 = np.array([loc_s, math.log(_scale_for_sd(sd_s, df_s)), math.log(df_s)])
            fun = lambda p: loss_full(p[0], math.exp(p[1]), _clamp_df(p[2]))
        else:
            x0 = np.array([loc_s, math.log(_scale_for_sd(sd_s, df_fixed))])
            fun = lambda p: loss_full(p[0], math.exp(p[1]), df_fixed)
        res = optimize.minimize(fun, x0, method="Nelder-Mead", options=_NM_OPTIONS)
        loc = float(res.x[0])
        scale = float(math.exp(res.x[1]))
        df = df_fixed if df_fixed is not None else _clamp_df(float(res.x[2]))
        candidates.append((float(res.fun), loc, scale, df, bool(res.success)))
    candidates.sort(key=lambda c: (c[0], c[1], c[2], c[3]))
    loss, loc, scale, df, ok = candidates[0]
    at_bound = df_fixed is None and (
        df <= DF_MIN * (1.0 + 1e-9) or df >= DF_MAX * (1.0 - 1e-9)
    )
    return loss, loc, scale, df, ok, at_bound


def fit_t_to_histogram(
    sheet: ElicitationSheet, df: Optional[float] = None
) -> FitResult:
    """Least-squares fit of bin probabilities to normalised chip counts.

    The loss compares the model's bin probabilities (plus an implicit
    zero-target bin for mass outside the grid) against the chip
    proportions, so it is invariant to bin width.
    """
    counts = np.array(sheet.chip_counts, dtype=float)
    if int((counts > 0).sum()) < 3:
        raise InsufficientInformationError(
            "histogram fitting needs at least 3 nonempty bins"
        )
    if df is not None and not (math.isfinite(df) and df > 0.0):
        raise DomainError(f"fixed df must be > 0, got {df}")
    edges = np.array(sheet.bin_edges, dtype=float)
    props = counts / counts.sum()
    mids = 0.5 * (edges[:-1] + edges[1:])
    mean = float(props @ mids)
    var = float(props @ (mids - mean) ** 2) + float(np.mean(np.diff(edges)) ** 2) / 12.0
    sd = max(math.sqrt(var), 1e-3 * (edges[-1] - edges[0]))

    def loss_full(loc: float, scale: float, dfv: float) -> float:
        bin_p = np.diff(_t_cdf_vec(edges, loc, scale, dfv))
        return float(np.sum((props - bin_p) ** 2))

    loss, loc, scale, df_hat, ok, at_bound = _multistart_fit(loss_full, mean, sd, df)
    trunc = sheet.direction_hint or Truncation.NONE
    prior = StudentTPrior(loc, scale, df_hat, trunc)
    return FitResult(prior, loss, _feedback(prior), ok, at_bound)


def fit_t_to_quantiles(p33: float, p50: float, p66: float, df: float) -> FitResult:
    """Fit location and scale to a percentile triple at fixed df.

    The family is symmetric, so the location is the stated median exactly.
    Each side quantile implies a scale through the single standardised
    quantile constant q = Q(0.66); the fitted scale is their least-squares
    compromise (their mean), which reproduces symmetric triples exactly.
    """
    if not (p33 < p50 < p66):
        raise DomainError(
            f"quantiles must be strictly increasing, got ({p33}, {p50}, {p66})"
        )
    if not (math.isfinite(df) and df > 0.0):
        raise DomainError(f"df must be > 0, got {df}")
    loc = float(p50)
    q = student_t_quantile(0.66, 0.0, 1.0, df)
    scale = (p66 - p33) / (2.0 * q)
    loss = (loc - scale * q - p33) ** 2 + (loc + scale * q - p66) ** 2
    prior = StudentTPrior(loc, scale, df)
    return FitResult(prior, float(loss), _feedback(prior), True)


def fit_t_to_density_grid(
    grid: PosteriorGrid, df: Optional[float] = None
) -> FitResult:
    """Fit the t family to a tabulated density by integrated squared error."""
    if abs(grid.normalization_check - 1.0) > 1e-4:
        raise DomainError(
            f"grid is not normalised (trapezoid mass "
            f"{grid.normalization_check})"
        )
    if df is not None and not (math.isfinite(df) and df > 0.0):
        raise DomainError(f"fixed df must be > 0, got {df}")
    xs = grid.delta
    target = grid.density
    total = float(np.trapezoid(target, xs))
    mean = float(np.trapezoid(xs * target, xs) / total)
    var = float(np.trapezoid((xs - mean) ** 2 * target, xs) / total)
    sd = max(math.sqrt(var), 1e-12)

    def loss_full(loc: float, scale: float, dfv: float) -> float:
        diff = target - _t_pdf_vec(xs, loc, scale, dfv)
        return float(np.trapezoid(diff * diff, xs))

    loss, loc, scale, df_hat, ok, at_bound = _multistart_fit(loss_full, mean, sd, df)
    prior = StudentTPrior(loc, scale, df_hat)
    return FitResult(prior, loss, _feedback(prior), ok, at_bound)


@dataclass(frozen=True)
class ReplicationChainResult:
    fitted_prior: FitResult
    log_bf_f0: float
    log_bf_10_default: float
    log_bf_f1: float


def replication_chain(
    original: TTestSummary,
    initial_prior: EffectSizePrior,
    replication: TTestSummary,
) -> ReplicationChainResult:
    """Analyse a replication with the original study's posterior as prior.

    The original analysis's posterior is tabulated, a t distribution is
    fitted to it, and the replication is tested against that fitted prior;
    the default-prior analysis of the replication and the informed-versus-
    default factor come along for comparison.
    """
    grid = posterior_summary(original, initial_prior)
    fitted = fit_t_to_density_grid(grid)
    log_bf_f0 = bf10(replication, fitted.prior).log_bf10
    log_bf_10_default = bf10(replication, DEFAULT_CAUCHY_PRIOR).log_bf10
    return ReplicationChainResult(
        fitted_prior=fitted,
        log_bf_f0=log_bf_f0,
        log_bf_10_default=log_bf_10_default,
        log_bf_f1=transitive_bf(log_bf_f0, log_bf_10_default),
    )
