"""Domain types: test summaries, effect size priors, and result records."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Union

import numpy as np

from .errors import DomainError
from .special import (
    normal_cdf,
    normal_logpdf,
    student_t_cdf,
    student_t_logpdf,
    student_t_quantile,
)

__all__ = [
    "Design",
    "Truncation",
    "Orientation",
    "TTestSummary",
    "StudentTPrior",
    "NormalPrior",
    "EffectSizePrior",
    "Diagnostics",
    "BayesFactorResult",
    "PosteriorGrid",
    "DEFAULT_CAUCHY_PRIOR",
    "parse_prior",
]

_MAX_ABS_T = 1e6


class Design(str, Enum):
    ONE_SAMPLE = "one"  # includes paired designs via difference scores
    TWO_SAMPLE = "two"  # independent samples


class Truncation(str, Enum):
    NONE = "none"
    POSITIVE_ONLY = "pos"
    NEGATIVE_ONLY = "neg"


class Orientation(str, Enum):
    TWO_SIDED = "two"
    POSITIVE_VS_NULL = "pos"
    NEGATIVE_VS_NULL = "neg"


@dataclass(frozen=True)
class TTestSummary:
    """A t-test reduced to the statistics the engine needs.

    The marginal posterior and Bayes factor depend on the data only
    through the t-value and the sample size(s); the closed forms require
    more than one observation (per group, for independent samples).
    """

    design: Design
    t: float
    n1: int
    n2: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "design", Design(self.design))
        object.__setattr__(self, "t", float(self.t))
        if not math.isfinite(self.t):
            raise DomainError(f"t must be finite, got {self.t}")
        if abs(self.t) > _MAX_ABS_T:
            raise DomainError(
                f"|t| > {_MAX_ABS_T:g} is outside any plausible input regime"
            )
        if int(self.n1) != self.n1:
            raise DomainError(f"n1 must be an integer, got {self.n1}")
        object.__setattr__(self, "n1", int(self.n1))
        if self.n1 < 2:
            raise DomainError(
                "n1 must be at least 2: the closed-form marginal requires "
                "more than one observation"
            )
        if self.design is Design.TWO_SAMPLE:
            if self.n2 is None:
                raise DomainError("two-sample designs require n2")
            if int(self.n2) != self.n2:
                raise DomainError(f"n2 must be an integer, got {self.n2}")
            object.__setattr__(self, "n2", int(self.n2))
            if self.n2 < 2:
                raise DomainError(
                    "n2 must be at least 2: the closed-form marginal requires "
                    "more than one observation in each group"
                )
        elif self.n2 is not None:
            raise DomainError("n2 is only meaningful for two-sample designs")

    @classmethod
    def one_sample(cls, t: float, n: int) -> "TTestSummary":
        return cls(Design.ONE_SAMPLE, t, n)

    @classmethod
    def two_sample(cls, t: float, n1: int, n2: int) -> "TTestSummary":
        return cls(Design.TWO_SAMPLE, t, n1, n2)

    @property
    def nu(self) -> float:
        """Degrees of freedom of the t statistic."""
        if self.design is Design.ONE_SAMPLE:
            return float(self.n1 - 1)
        return float(self.n1 + self.n2 - 2)

    @property
    def n_eff(self) -> float:
        """Effective sample size; maps the two-sample formulas onto the
        one-sample skeleton."""
        if self.design is Design.ONE_SAMPLE:
            return float(self.n1)
        return self.n1 * self.n2 / (self.n1 + self.n2)


def _validate_truncation(t) -> Truncation:
    return Truncation(t)


@dataclass(frozen=True)
class StudentTPrior:
    """Shifted and scaled Student-t prior on the effect size."""

    location: float
    scale: float
    df: float
    truncation: Truncation = Truncation.NONE

    def __post_init__(self):
        object.__setattr__(self, "location", float(self.location))
        object.__setattr__(self, "scale", float(self.scale))
        object.__setattr__(self, "df", float(self.df))
        object.__setattr__(self, "truncation", _validate_truncation(self.truncation))
        if not (math.isfinite(self.location)):
            raise DomainError(f"prior location must be finite, got {self.location}")
        if not (math.isfinite(self.scale) and self.scale > 0.0):
            raise DomainError(f"prior scale must be > 0, got {self.scale}")
        if not (math.isfinite(self.df) and self.df > 0.0):
            raise DomainError(f"prior df must be > 0, got {self.df}")

    def untruncated(self) -> "StudentTPrior":
        if self.truncation is Truncation.NONE:
            return self
        return replace(self, truncation=Truncation.NONE)

    def untruncated_logpdf(self, x: float) -> float:
        return student_t_logpdf(x, self.location, self.scale, self.df)

    def untruncated_cdf(self, x: float) -> float:
        return student_t_cdf(x, self.location, self.scale, self.df)

    def untruncated_quantile(self, p: float) -> float:
        return student_t_quantile(p, self.location, self.scale, self.df)


@dataclass(frozen=True)
class NormalPrior:
    """Normal prior on the effect size, parameterised by mean and variance."""

    mean: float
    variance: float
    truncation: Truncation = Truncation.NONE

    def __post_init__(self):
        object.__setattr__(self, "mean", float(self.mean))
        object.__setattr__(self, "variance", float(self.variance))
        object.__setattr__(self, "truncation", _validate_truncation(self.truncation))
        if not math.isfinite(self.mean):
            raise DomainError(f"prior mean must be finite, got {self.mean}")
        if not (math.isfinite(self.variance) and self.variance > 0.0):
            raise DomainError(f"prior variance must be > 0, got {self.variance}")

    def untruncated(self) -> "NormalPrior":
        if self.truncation is Truncation.NONE:
            return self
        return replace(self, truncation=Truncation.NONE)

    def untruncated_logpdf(self, x: float) -> float:
        return normal_logpdf(x, self.mean, self.variance)

    def untruncated_cdf(self, x: float) -> float:
        return normal_cdf(x, self.mean, self.variance)

    def untruncated_quantile(self, p: float) -> float:
        if not (0.0 < p < 1.0):
            raise DomainError(f"quantile requires p in (0, 1), got {p}")
        from scipy.special import ndtri

        return self.mean + math.sqrt(self.variance) * float(ndtri(p))


EffectSizePrior = Union[StudentTPrior, NormalPrior]


def prior_location(prior: EffectSizePrior) -> float:
    return prior.location if isinstance(prior, StudentTPrior) else prior.mean


def prior_scale(prior: EffectSizePrior) -> float:
    return prior.scale if isinstance(prior, StudentTPrior) else math.sqrt(prior.variance)


def prior_log_mass(prior: EffectSizePrior, side: Truncation) -> float:
    """Log prior mass on the requested side of zero (untruncated prior)."""
    below = prior.untruncated_cdf(0.0)
    if side is Truncation.POSITIVE_ONLY:
        mass = 1.0 - below
    elif side is Truncation.NEGATIVE_ONLY:
        mass = below
    else:
        return 0.0
    if mass <= 0.0:
        return -math.inf
    return math.log(mass)


def prior_logpdf(prior: EffectSizePrior, x: float) -> float:
    """Log prior density, renormalised to unit mass when truncated."""
    trunc = prior.truncation
    if trunc is Truncation.POSITIVE_ONLY and x < 0.0:
        return -math.inf
    if trunc is Truncation.NEGATIVE_ONLY and x > 0.0:
        return -math.inf
    base = prior.untruncated_logpdf(x)
    if trunc is Truncation.NONE:
        return base
    return base - prior_log_mass(prior, trunc)


def prior_quantile(prior: EffectSizePrior, p: float) -> float:
    """Quantile of the (possibly truncated) prior."""
    if not (0.0 < p < 1.0):
        raise DomainError(f"quantile requires p in (0, 1), got {p}")
    trunc = prior.truncation
    if trunc is Truncation.NONE:
        return prior.untruncated_quantile(p)
    below = prior.untruncated_cdf(0.0)
    if trunc is Truncation.POSITIVE_ONLY:
        return prior.untruncated_quantile(below + p * (1.0 - below))
    return prior.untruncated_quantile(p * below)


def prior_cdf(prior: EffectSizePrior, x: float) -> float:
    """CDF of the (possibly truncated) prior."""
    trunc = prior.truncation
    base = prior.untruncated_cdf(x)
    if trunc is Truncation.NONE:
        return base
    below = prior.untruncated_cdf(0.0)
    if trunc is Truncation.POSITIVE_ONLY:
        if x <= 0.0:
            return 0.0
        return (base - below) / (1.0 - below)
    if x >= 0.0:
        return 1.0
    return base / below


DEFAULT_CAUCHY_PRIOR = StudentTPrior(0.0, math.sqrt(0.5), 1.0)


def parse_prior(spec: str) -> EffectSizePrior:
    """Parse the CLI prior grammar.

    ``t:<loc>,<scale>,<df>`` or ``normal:<mean>,<variance>``, optionally
    followed by ``+trunc=pos`` or ``+trunc=neg``.
    """
    text = spec.strip()
    truncation = Truncation.NONE
    if "+trunc=" in text:
        text, _, trunc_part = text.partition("+trunc=")
        trunc_part = trunc_part.strip()
        if trunc_part not in ("pos", "neg"):
            raise DomainError(f"unknown truncation {trunc_part!r} (use pos or neg)")
        truncation = Truncation(trunc_part)
    family, _, params = text.partition(":")
    family = family.strip().lower()
    try:
        values = [float(v) for v in params.split(",")]
    except ValueError as exc:
        raise DomainError(f"could not parse prior parameters in {spec!r}") from exc
    if family == "t":
        if len(values) != 3:
            raise DomainError("t prior takes exactly loc,scale,df")
        return StudentTPrior(values[0], values[1], values[2], truncation)
    if family == "normal":
        if len(values) != 2:
            raise DomainError("normal prior takes exactly mean,variance")
        return NormalPrior(values[0], values[1], truncation)
    raise DomainError(f"unknown prior family {family!r} (use t or normal)")


def prior_to_dict(prior: EffectSizePrior) -> dict:
    if isinstance(prior, StudentTPrior):
        return {
            "family": "t",
            "location": prior.location,
            "scale": prior.scale,
            "df": prior.df,
            "truncation": prior.truncation.value,
        }
    return {
        "family": "normal",
        "mean": prior.mean,
        "variance": prior.variance,
        "truncation": prior.truncation.value,
    }


@dataclass(frozen=True)
class Diagnostics:
    quadrature_error_estimate: float = 0.0
    g_integral_log: Optional[float] = None


@dataclass(frozen=True)
class BayesFactorResult:
    log_bf10: float
    orientation: Orientation = Orientation.TWO_SIDED
    diagnostics: Diagnostics = field(default_factory=Diagnostics)

    def __post_init__(self):
        object.__setattr__(self, "log_bf10", float(self.log_bf10))
        if not math.isfinite(self.log_bf10):
            raise DomainError(f"log Bayes factor is not finite: {self.log_bf10}")

    @property
    def bf10(self) -> float:
        try:
            return math.exp(self.log_bf10)
        except OverflowError:
            return math.inf


@dataclass(frozen=True)
class PosteriorGrid:
    """Tabulated marginal posterior density with its summaries."""

    delta: np.ndarray
    log_density: np.ndarray
    median: float
    ci_lower_95: float
    ci_upper_95: float
    normalization_check: float

    def __post_init__(self):
        delta = np.asarray(self.delta, dtype=float)
        log_density = np.asarray(self.log_density, dtype=float)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "log_density", log_density)
        if delta.ndim != 1 or delta.shape != log_density.shape:
            raise DomainError("delta and log_density must be 1-D and equal length")
        if not np.all(np.diff(delta) > 0.0):
            raise DomainError("delta grid must be strictly increasing")
        if not (self.ci_lower_95 < self.median < self.ci_upper_95):
            raise DomainError("credible interval must bracket the median")

    @property
    def density(self) -> np.ndarray:
        return np.exp(self.log_density)
