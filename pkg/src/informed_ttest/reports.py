"""Analysis requests and the report document shared by CLI and HTTP."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bayes import bf10, one_sided_bf, posterior_summary, transitive_bf
from .errors import DomainError
from .model import (
    DEFAULT_CAUCHY_PRIOR,
    BayesFactorResult,
    EffectSizePrior,
    Orientation,
    TTestSummary,
    Truncation,
    prior_logpdf,
    prior_quantile,
    prior_to_dict,
)

__all__ = ["SCHEMA_VERSION", "AnalysisRequest", "build_report", "fit_result_to_dict"]

SCHEMA_VERSION = 1

# Linear Bayes factors past this are serialised as log only.
_LINEAR_BF_LOG_LIMIT = 700.0


@dataclass(frozen=True)
class AnalysisRequest:
    summary: TTestSummary
    prior: EffectSizePrior
    direction: Optional[Orientation] = None
    compare_default: bool = False
    grid: bool = False

    def __post_init__(self):
        if self.direction is not None:
            direction = Orientation(self.direction)
            object.__setattr__(self, "direction", direction)
            if direction is Orientation.TWO_SIDED:
                object.__setattr__(self, "direction", None)
            elif self.prior.truncation is not Truncation.NONE:
                raise DomainError(
                    "pass either a truncated prior or a direction, not both"
                )


def _bf_fields(log_bf: float) -> dict:
    log_only = log_bf > _LINEAR_BF_LOG_LIMIT
    return {
        "log_bf": log_bf,
        "bf": None if log_only else math.exp(log_bf),
        "bf_log_only": log_only,
    }


def _result_fields(result: BayesFactorResult) -> dict:
    fields = _bf_fields(result.log_bf10)
    fields["orientation"] = result.orientation.value
    return fields


def build_report(request: AnalysisRequest) -> dict:
    """One report document for one analysis; every number comes from the
    same library calls a direct caller would make."""
    summary = request.summary
    prior = request.prior
    two_sided = bf10(summary, prior)
    report = {
        "schema_version": SCHEMA_VERSION,
        "input": {
            "design": summary.design.value,
            "t": summary.t,
            "n1": summary.n1,
            "n2": summary.n2,
            "prior": prior_to_dict(prior),
            "direction": request.direction.value if request.direction else None,
        },
        "bf10": _result_fields(two_sided),
        "diagnostics": {
            "quadrature_error_estimate": two_sided.diagnostics.quadrature_error_estimate,
            "g_integral_log": two_sided.diagnostics.g_integral_log,
        },
    }

    if request.direction is not None:
        directional = one_sided_bf(summary, prior, request.direction)
        report["one_sided"] = _result_fields(directional)

    grid = posterior_summary(summary, prior)
    report["posterior"] = {
        "median": grid.median,
        "ci_lower_95": grid.ci_lower_95,
        "ci_upper_95": grid.ci_upper_95,
        "normalization_check": grid.normalization_check,
    }
    if request.grid:
        deltas = grid.delta
        report["grid"] = {
            "delta": deltas.tolist(),
            "prior_density": [
                math.exp(prior_logpdf(prior, float(d))) for d in deltas
            ],
            "posterior_density": np.exp(grid.log_density).tolist(),
        }

    if request.compare_default:  # zero-centred Cauchy(1/sqrt 2) baseline
        default_two_sided = bf10(summary, DEFAULT_CAUCHY_PRIOR)
        comparison = {
            "prior": prior_to_dict(DEFAULT_CAUCHY_PRIOR),
            "bf10": _result_fields(default_two_sided),
            "informed_vs_default": _bf_fields(
                transitive_bf(two_sided.log_bf10, default_two_sided.log_bf10)
            ),
        }
        if request.direction is not None:
            comparison["one_sided"] = _result_fields(
                one_sided_bf(summary, DEFAULT_CAUCHY_PRIOR, request.direction)
            )
        report["default_comparison"] = comparison

    return report


def fit_result_to_dict(fit, overlay_range=None, overlay_points=0) -> dict:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "prior": prior_to_dict(fit.prior),
        "loss": fit.loss,
        "percentile_feedback": {
            "p33": fit.percentile_feedback.p33,
            "p50": fit.percentile_feedback.p50,
            "p66": fit.percentile_feedback.p66,
        },
        "converged": fit.converged,
        "df_at_bound": fit.df_at_bound,
    }
    if overlay_points:
        # display curve so clients never evaluate densities themselves
        lo = prior_quantile(fit.prior, 0.005)
        hi = prior_quantile(fit.prior, 0.995)
        if overlay_range is not None:
            lo = min(lo, overlay_range[0])
            hi = max(hi, overlay_range[1])
        deltas = np.linspace(lo, hi, overlay_points)
        payload["overlay"] = {
            "delta": deltas.tolist(),
            "density": [math.exp(prior_logpdf(fit.prior, float(d))) for d in deltas],
        }
    return payload
