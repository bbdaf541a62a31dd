"""Bayes factors and marginal posterior densities for informed t-tests.

All quantities are driven by the closed-form marginal likelihood terms

    A = Gamma((nu+1)/2) 1F1((nu+1)/2; 1/2; w)
    B = (mu_d t / sqrt((1/n + g)((1 + n g) nu + t^2) / 2))
        * Gamma((nu+2)/2) 1F1((nu+2)/2; 3/2; w)
    w = mu_d^2 t^2 / (2 (1/n + g) ((1 + n g) nu + t^2))

    C = Gamma((nu+1)/2) 1F1((nu+1)/2; 1/2; v)
    D = t delta sqrt(2 n / (nu + t^2))
        * Gamma((nu+2)/2) 1F1((nu+2)/2; 3/2; v)
    v = n t^2 delta^2 / (2 (nu + t^2))

with n standing for the effective sample size and nu for the degrees of
freedom, so the one-sample and independent-samples designs share a single
code path. A Student-t prior on the effect size adds one integral over
the normal-mixture variance g, weighted by an inverse-gamma density; a
normal prior needs no integral at all.

A + B and C + D are positive but their summands cancel catastrophically
when the prior location and the t-value disagree in sign. In that regime
both sums are evaluated through the equivalent single positive integral

    A + B = 2 * int_0^inf u^nu exp(-u^2 + q u) du,   q = +-2 sqrt(w),

which is cancellation-free at any argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import DegenerateDirectionError, DomainError
from .model import (
    BayesFactorResult,
    DEFAULT_CAUCHY_PRIOR,
    Diagnostics,
    EffectSizePrior,
    NormalPrior,
    Orientation,
    PosteriorGrid,
    StudentTPrior,
    TTestSummary,
    Truncation,
    prior_log_mass,
    prior_location,
    prior_logpdf,
    prior_scale,
)
from .quadrature import (
    QuadratureConfig,
    QuadResult,
    integrate_halfline_log,
    integrate_interval_log,
)
from .signed_log import SignedLogValue, log_add_exp
from .special import inv_gamma_logpdf, log_1f1

__all__ = [
    "log_term_ab",
    "log_term_cd",
    "bf10",
    "bf10_t_prior",
    "bf10_normal_prior",
    "posterior_log_density",
    "posterior_summary",
    "one_sided_bf",
    "transitive_bf",
    "posterior_odds",
    "savage_dickey_log_bf10",
    "max_bf01_curve",
    "CurvePoint",
    "CurveResult",
    "observed_effect_size",
]

_NEG_INF = float("-inf")
_LN2 = math.log(2.0)

# Tighter than the generic default: several published checks compare two
# independently quadratured quantities at 1e-6..1e-8 relative.
_BF_CONFIG = QuadratureConfig(rel_tol=1e-10, max_subdivisions=4000)

_GL64_NODES, _GL64_WEIGHTS = np.polynomial.legendre.leggauss(64)
_GL64_LOGW = np.log(_GL64_WEIGHTS)

# Below this the closed form loses well under one bit to cancellation and
# is cheaper than the integral route.
_CANCELLATION_GUARD = 0.25


def _log_moment_integral(c: float, q: float) -> float:
    """log of int_0^inf u^(c-1) exp(-u^2 + q u) du for c > 1.

    The integrand is log-concave with a single interior mode; fixed
    Gauss-Legendre panels over a window wide enough for a 60 e-fold drop
    give full double precision.
    """
    nu = c - 1.0
    u_star = 0.25 * (q + math.sqrt(q * q + 8.0 * nu))
    h_star = nu * math.log(u_star) - u_star * u_star + q * u_star
    sd = 1.0 / math.sqrt(nu / (u_star * u_star) + 2.0)

    def h(u):
        return nu * np.log(u) - u * u + q * u

    lo = max(u_star - 14.0 * sd, 0.0)
    hi = u_star + 14.0 * sd
    for _ in range(200):
        if lo == 0.0 or float(h(lo)) < h_star - 60.0:
            break
        lo = max(lo - 7.0 * sd, 0.0)
    for _ in range(200):
        if float(h(hi)) < h_star - 60.0:
            break
        hi += 7.0 * sd

    n_panels = max(4, min(24, int(math.ceil((hi - lo) / (4.0 * sd)))))
    edges = np.linspace(lo, hi, n_panels + 1)
    piece_logs = []
    for pa, pb in zip(edges, edges[1:]):
        half = 0.5 * (pb - pa)
        u = 0.5 * (pa + pb) + half * _GL64_NODES
        vals = h(u) + _GL64_LOGW
        m = float(vals.max())
        piece_logs.append(
            m + math.log(float(np.sum(np.exp(vals - m)))) + math.log(half)
        )
    total = _NEG_INF
    for v in piece_logs:
        total = log_add_exp(total, v)
    return total


def _log_gamma_1f1_pair(a_half: float, q: float, w: float, nu: float) -> float:
    """log(A + B) (equally log(C + D)) via the hypergeometric closed form;
    valid without precision loss when q >= 0 or the odd term is small."""
    log_even = math.lgamma(a_half) + log_1f1(a_half, 0.5, w)
    if q == 0.0:
        return log_even
    log_odd = (
        math.log(abs(q)) + math.lgamma(a_half + 0.5) + log_1f1(a_half + 0.5, 1.5, w)
    )
    pair = SignedLogValue.from_log(log_even) + SignedLogValue.from_log(
        log_odd, 1 if q > 0.0 else -1
    )
    return pair.positive_log()


def _log_sum_pair(nu: float, q: float) -> float:
    """log(A + B) from the shared (nu, q) parameterisation, q = +-2 sqrt(w)."""
    w = 0.25 * q * q
    if q >= 0.0 or abs(q) * math.sqrt(0.5 * nu + 1.0) < _CANCELLATION_GUARD:
        return _log_gamma_1f1_pair(0.5 * (nu + 1.0), q, w, nu)
    return _LN2 + _log_moment_integral(nu + 1.0, q)


def _ab_q(t: float, nu: float, n_eff: float, mu_delta: float, g: float) -> float:
    denom = (1.0 / n_eff + g) * ((1.0 + n_eff * g) * nu + t * t)
    return mu_delta * t / math.sqrt(0.5 * denom)


def _cd_q(t: float, nu: float, n_eff: float, delta: float) -> float:
    return t * delta * math.sqrt(2.0 * n_eff / (nu + t * t))


def _log_ab(t: float, nu: float, n_eff: float, mu_delta: float, g: float) -> float:
    return _log_sum_pair(nu, _ab_q(t, nu, n_eff, mu_delta, g))


def _log_cd(t: float, nu: float, n_eff: float, delta: float) -> float:
    return _log_sum_pair(nu, _cd_q(t, nu, n_eff, delta))


def log_term_ab(summary: TTestSummary, mu_delta: float, g: float) -> SignedLogValue:
    """Signed log of A + B; positive for every valid input."""
    if not (math.isfinite(g) and g > 0.0):
        raise DomainError(f"g must be > 0, got {g}")
    if not math.isfinite(mu_delta):
        raise DomainError(f"mu_delta must be finite, got {mu_delta}")
    value = _log_ab(summary.t, summary.nu, summary.n_eff, mu_delta, g)
    return SignedLogValue.from_log(value)


def log_term_cd(summary: TTestSummary, delta: float) -> SignedLogValue:
    """Signed log of C + D; positive for every valid input."""
    if not math.isfinite(delta):
        raise DomainError(f"delta must be finite, got {delta}")
    value = _log_cd(summary.t, summary.nu, summary.n_eff, delta)
    return SignedLogValue.from_log(value)


def _log_h0_term(t: float, nu: float) -> float:
    return math.lgamma(0.5 * (nu + 1.0)) - 0.5 * (nu + 1.0) * math.log1p(t * t / nu)


def _log_numerator_normal(
    t: float, nu: float, n_eff: float, mean: float, g: float
) -> float:
    """Log of the (A + B)-bearing marginal-likelihood numerator for a
    normal effect size prior with variance g."""
    return (
        -0.5 * math.log1p(n_eff * g)
        - mean * mean / (2.0 * (1.0 / n_eff + g))
        - 0.5 * (nu + 1.0) * math.log1p(t * t / (nu * (1.0 + n_eff * g)))
        + _log_ab(t, nu, n_eff, mean, g)
    )


def _log_bf10_normal(t: float, nu: float, n_eff: float, mean: float, g: float) -> float:
    return _log_numerator_normal(t, nu, n_eff, mean, g) - _log_h0_term(t, nu)


@lru_cache(maxsize=4096)
def _marginal_t(summary: TTestSummary, prior: StudentTPrior) -> QuadResult:
    """g-integral of the numerator against the inverse-gamma mixing density;
    independent of delta, evaluated once per (summary, prior)."""
    t, nu, n_eff = summary.t, summary.nu, summary.n_eff
    shape = 0.5 * prior.df
    scale = 0.5 * prior.scale * prior.scale * prior.df
    mean = prior.location

    def integrand(g: float) -> float:
        return _log_numerator_normal(t, nu, n_eff, mean, g) + inv_gamma_logpdf(
            g, shape, scale
        )

    return integrate_halfline_log(integrand, _BF_CONFIG)


def _log_marginal(summary: TTestSummary, prior: EffectSizePrior) -> QuadResult:
    prior = prior.untruncated()
    if isinstance(prior, StudentTPrior):
        return _marginal_t(summary, prior)
    return QuadResult(
        _log_numerator_normal(
            summary.t, summary.nu, summary.n_eff, prior.mean, prior.variance
        ),
        0.0,
    )


def _log_posterior_numerator(
    summary: TTestSummary, prior: EffectSizePrior, delta: float
) -> float:
    """Log unnormalised posterior: likelihood part times untruncated prior.
    Integrates (over delta) to the same marginal as the g-integral."""
    t, nu, n_eff = summary.t, summary.nu, summary.n_eff
    return (
        -0.5 * n_eff * delta * delta
        - 0.5 * (nu + 1.0) * math.log1p(t * t / nu)
        + _log_cd(t, nu, n_eff, delta)
        + prior.untruncated_logpdf(delta)
    )


@lru_cache(maxsize=4096)
def _posterior_support(summary: TTestSummary, prior: EffectSizePrior) -> Tuple[float, float]:
    """Interval outside which the unnormalised posterior sits > 45 e-folds
    below its peak (> 99.99% of the mass lies inside)."""
    prior = prior.untruncated()
    loc = prior_location(prior)
    half = max(10.0 * prior_scale(prior), 10.0 / math.sqrt(summary.n_eff))
    lo, hi = loc - half, loc + half

    def lognum(x: float) -> float:
        return _log_posterior_numerator(summary, prior, x)

    for _ in range(48):
        xs = np.linspace(lo, hi, 513)
        vals = np.array([lognum(float(x)) for x in xs])
        peak = float(vals.max())
        grow_left = vals[0] > peak - 80.0
        grow_right = vals[-1] > peak - 80.0
        if grow_left or grow_right:
            span = hi - lo
            if grow_left:
                lo -= span
            if grow_right:
                hi += span
            continue
        above = np.nonzero(vals >= peak - 45.0)[0]
        new_lo = float(xs[max(int(above[0]) - 2, 0)])
        new_hi = float(xs[min(int(above[-1]) + 2, len(xs) - 1)])
        if (new_hi - new_lo) > 0.2 * (hi - lo):
            return new_lo, new_hi
        lo, hi = new_lo, new_hi  # much narrower than the scan: rescan finer
    return lo, hi


def _side_bounds(
    summary: TTestSummary, prior: EffectSizePrior, side: Truncation
) -> Tuple[float, float]:
    lo, hi = _posterior_support(summary, prior.untruncated())
    fallback = 10.0 / math.sqrt(summary.n_eff)
    if side is Truncation.POSITIVE_ONLY:
        return 0.0, max(hi, fallback)
    if side is Truncation.NEGATIVE_ONLY:
        return min(lo, -fallback), 0.0
    return lo, hi


@lru_cache(maxsize=4096)
def _log_side_numerator(
    summary: TTestSummary, prior: EffectSizePrior, side: Truncation
) -> QuadResult:
    """Log of the unnormalised posterior mass over one side of zero (or the
    full support), from the delta integral of the C + D numerator."""
    prior = prior.untruncated()
    a, b = _side_bounds(summary, prior, side)

    def integrand(x: float) -> float:
        return _log_posterior_numerator(summary, prior, x)

    return integrate_interval_log(integrand, a, b, _BF_CONFIG)


def _side_of(truncation: Truncation) -> Truncation:
    if truncation is Truncation.NONE:
        raise DomainError("expected a truncated prior")
    return truncation


def bf10_t_prior(summary: TTestSummary, prior: StudentTPrior) -> BayesFactorResult:
    """Bayes factor of the informed alternative (Student-t prior on the
    effect size) against the point null, from t and the sample sizes."""
    if not isinstance(prior, StudentTPrior):
        raise DomainError("bf10_t_prior requires a Student-t prior")
    log_h0 = _log_h0_term(summary.t, summary.nu)
    if prior.truncation is Truncation.NONE:
        marg = _marginal_t(summary, prior)
        return BayesFactorResult(
            marg.log_value - log_h0,
            Orientation.TWO_SIDED,
            Diagnostics(marg.error_estimate, marg.log_value),
        )
    side = _side_of(prior.truncation)
    base = prior.untruncated()
    num = _log_side_numerator(summary, base, side)
    log_bf = num.log_value - prior_log_mass(base, side) - log_h0
    orientation = (
        Orientation.POSITIVE_VS_NULL
        if side is Truncation.POSITIVE_ONLY
        else Orientation.NEGATIVE_VS_NULL
    )
    return BayesFactorResult(log_bf, orientation, Diagnostics(num.error_estimate))


def bf10_normal_prior(summary: TTestSummary, prior: NormalPrior) -> BayesFactorResult:
    """Bayes factor for a normal effect size prior; fully closed-form when
    the prior is untruncated."""
    if not isinstance(prior, NormalPrior):
        raise DomainError("bf10_normal_prior requires a normal prior")
    log_h0 = _log_h0_term(summary.t, summary.nu)
    if prior.truncation is Truncation.NONE:
        log_bf = (
            _log_numerator_normal(
                summary.t, summary.nu, summary.n_eff, prior.mean, prior.variance
            )
            - log_h0
        )
        return BayesFactorResult(log_bf, Orientation.TWO_SIDED, Diagnostics())
    side = _side_of(prior.truncation)
    base = prior.untruncated()
    num = _log_side_numerator(summary, base, side)
    log_bf = num.log_value - prior_log_mass(base, side) - log_h0
    orientation = (
        Orientation.POSITIVE_VS_NULL
        if side is Truncation.POSITIVE_ONLY
        else Orientation.NEGATIVE_VS_NULL
    )
    return BayesFactorResult(log_bf, orientation, Diagnostics(num.error_estimate))


def bf10(summary: TTestSummary, prior: EffectSizePrior) -> BayesFactorResult:
    if isinstance(prior, StudentTPrior):
        return bf10_t_prior(summary, prior)
    return bf10_normal_prior(summary, prior)


def posterior_log_density(
    summary: TTestSummary, prior: EffectSizePrior, delta: float
) -> float:
    """Log of the normalised marginal posterior density of the effect size.

    For truncated priors the density is zero (log -inf) outside the
    allowed side, renormalised inside it; that is not an error.
    """
    delta = float(delta)
    if not math.isfinite(delta):
        raise DomainError(f"delta must be finite, got {delta}")
    trunc = prior.truncation
    if trunc is Truncation.POSITIVE_ONLY and delta < 0.0:
        return _NEG_INF
    if trunc is Truncation.NEGATIVE_ONLY and delta > 0.0:
        return _NEG_INF
    base = prior.untruncated()
    lognum = _log_posterior_numerator(summary, base, delta)
    if trunc is Truncation.NONE:
        return lognum - _log_marginal(summary, base).log_value
    return lognum - _log_side_numerator(summary, base, trunc).log_value


def savage_dickey_log_bf10(summary: TTestSummary, prior: EffectSizePrior) -> float:
    """log BF10 via the ratio of prior to posterior density at zero."""
    if prior.truncation is not Truncation.NONE:
        raise DomainError("the density-ratio identity needs an untruncated prior")
    return prior_logpdf(prior, 0.0) - posterior_log_density(summary, prior, 0.0)


def _grid_bounds(
    summary: TTestSummary, prior: EffectSizePrior
) -> Tuple[float, float]:
    trunc = prior.truncation
    lo, hi = _posterior_support(summary, prior.untruncated())
    if trunc is Truncation.NONE:
        return lo, hi
    a, b = _side_bounds(summary, prior, trunc)
    # keep only the in-side portion of the support, but never collapse
    lo, hi = max(lo, a), min(hi, b)
    if not lo < hi:
        lo, hi = a, b
    return lo, hi


def posterior_summary(
    summary: TTestSummary,
    prior: EffectSizePrior,
    grid_points: int = 2001,
) -> PosteriorGrid:
    """Tabulate the normalised posterior and extract median and central
    95% interval by inverting the integrated density."""
    if grid_points < 64:
        raise DomainError(f"grid_points must be >= 64, got {grid_points}")
    base = prior.untruncated()
    trunc = prior.truncation
    lo, hi = _grid_bounds(summary, prior)
    xs = np.linspace(lo, hi, grid_points)
    lognum = np.array(
        [_log_posterior_numerator(summary, base, float(x)) for x in xs]
    )
    if trunc is Truncation.NONE:
        log_z = _log_marginal(summary, base).log_value
    else:
        log_z = _log_side_numerator(summary, base, trunc).log_value
    log_density = lognum - log_z
    density = np.exp(log_density)
    mass = float(np.trapezoid(density, xs))

    cum = np.concatenate(
        ([0.0], np.cumsum(0.5 * (density[1:] + density[:-1]) * np.diff(xs)))
    )
    total = cum[-1]

    def invert(q: float) -> float:
        target = q * total
        i = int(np.searchsorted(cum, target, side="right") - 1)
        i = min(max(i, 0), len(xs) - 2)
        f0, f1 = density[i], density[i + 1]
        h = xs[i + 1] - xs[i]
        slope = (f1 - f0) / h
        rem = target - cum[i]
        if abs(slope) * h < 1e-12 * max(f0, 1e-300):
            dx = rem / f0 if f0 > 0.0 else 0.0
        else:
            disc = f0 * f0 + 2.0 * slope * rem
            dx = (math.sqrt(max(disc, 0.0)) - f0) / slope
        return float(xs[i] + min(max(dx, 0.0), h))

    return PosteriorGrid(
        delta=xs,
        log_density=log_density,
        median=invert(0.5),
        ci_lower_95=invert(0.025),
        ci_upper_95=invert(0.975),
        normalization_check=mass,
    )


def one_sided_bf(
    summary: TTestSummary,
    prior: EffectSizePrior,
    direction: Orientation,
) -> BayesFactorResult:
    """Directional Bayes factor BF+0 (or BF-0) from the two-sided one: the
    posterior-to-prior mass ratio on the requested side times BF10.
    Identical to running the correspondingly truncated prior directly."""
    direction = Orientation(direction)
    if direction is Orientation.TWO_SIDED:
        raise DomainError("direction must be positive-vs-null or negative-vs-null")
    if prior.truncation is not Truncation.NONE:
        raise DomainError("one_sided_bf expects the untruncated prior")
    side = (
        Truncation.POSITIVE_ONLY
        if direction is Orientation.POSITIVE_VS_NULL
        else Truncation.NEGATIVE_ONLY
    )
    log_prior_mass = prior_log_mass(prior, side)
    marg = _log_marginal(summary, prior)
    num = _log_side_numerator(summary, prior, side)
    log_post_mass = num.log_value - marg.log_value
    floor = math.log(1e-300)
    if log_prior_mass < floor or log_post_mass < floor:
        raise DegenerateDirectionError(
            f"prior or posterior mass on side {side.value!r} is numerically zero"
        )
    two_sided = bf10(summary, prior)
    return BayesFactorResult(
        log_post_mass - log_prior_mass + two_sided.log_bf10,
        direction,
        Diagnostics(
            max(num.error_estimate, two_sided.diagnostics.quadrature_error_estimate),
            two_sided.diagnostics.g_integral_log,
        ),
    )


def transitive_bf(log_bf_a0: float, log_bf_b0: float) -> float:
    """log BF_AB from log BF_A0 and log BF_B0 (shared null cancels)."""
    if not (math.isfinite(log_bf_a0) and math.isfinite(log_bf_b0)):
        raise DomainError("transitive_bf requires finite log Bayes factors")
    return log_bf_a0 - log_bf_b0


def posterior_odds(prior_odds: float, bf10_value: float) -> float:
    """Posterior odds = prior odds times the Bayes factor."""
    if not (prior_odds > 0.0 and math.isfinite(prior_odds)):
        raise DomainError(f"prior odds must be positive, got {prior_odds}")
    if not (bf10_value > 0.0 and math.isfinite(bf10_value)):
        raise DomainError(f"Bayes factor must be positive, got {bf10_value}")
    return prior_odds * bf10_value


def observed_effect_size(summary: TTestSummary) -> float:
    """Observed standardised effect, t / sqrt(n_eff)."""
    return summary.t / math.sqrt(summary.n_eff)


@dataclass(frozen=True)
class CurvePoint:
    n_per_group: int
    log_bf01_a: float
    log_bf01_b: float


@dataclass(frozen=True)
class CurveResult:
    points: Tuple[CurvePoint, ...]
    crossover_n: Optional[int]


def max_bf01_curve(
    prior_a: EffectSizePrior,
    prior_b: EffectSizePrior,
    n_max: int,
    n_min: int = 2,
) -> CurveResult:
    """Strongest attainable null evidence (t fixed at zero) for equal-group
    two-sample designs, for each prior, over a range of group sizes.

    The crossover is the smallest n at which prior_a yields more evidence
    for the null than prior_b.
    """
    if not (2 <= n_min <= n_max <= 10**6):
        raise DomainError(
            f"group size range must satisfy 2 <= n_min <= n_max <= 1e6, "
            f"got [{n_min}, {n_max}]"
        )
    points = []
    crossover = None
    for n in range(n_min, n_max + 1):
        summary = TTestSummary.two_sample(0.0, n, n)
        log_a = -bf10(summary, prior_a).log_bf10
        log_b = -bf10(summary, prior_b).log_bf10
        points.append(CurvePoint(n, log_a, log_b))
        if crossover is None and log_a > log_b:
            crossover = n
    return CurveResult(tuple(points), crossover)
