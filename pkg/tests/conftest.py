"""Shared fixtures: the randomised summary/prior suite and the
noncentral-t predictive oracle used to cross-check Bayes factors."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import pytest
from scipy import integrate, stats

from informed_ttest import NormalPrior, StudentTPrior, TTestSummary

SEED = 20250808

DF_MENU = (1.0, 2.0, 3.0, 5.0, 10.0, 41.478, 100.0)


@dataclass(frozen=True)
class Case:
    summary: TTestSummary
    prior: object


def make_cases(count: int, seed: int = SEED, zero_centered: bool = False):
    """Both designs, both prior families, t in [-8, 8], n in [2, 500]."""
    rng = np.random.default_rng(seed)
    cases = []
    for i in range(count):
        t = float(rng.uniform(-8.0, 8.0))
        n1 = int(rng.integers(2, 501))
        if i % 2:
            summary = TTestSummary.two_sample(t, n1, int(rng.integers(2, 501)))
        else:
            summary = TTestSummary.one_sample(t, n1)
        loc = 0.0 if zero_centered else float(rng.uniform(-1.0, 1.0))
        scale = float(rng.uniform(0.05, 1.5))
        if i % 4 < 2:
            df = float(DF_MENU[int(rng.integers(len(DF_MENU)))])
            prior = StudentTPrior(loc, scale, df)
        else:
            prior = NormalPrior(loc, scale * scale)
        cases.append(Case(summary, prior))
    return cases


@pytest.fixture(scope="session")
def random_cases():
    return make_cases(200)


@pytest.fixture(scope="session")
def symmetric_cases():
    return make_cases(40, seed=SEED + 1, zero_centered=True)


_ORACLE_GL_NODES, _ORACLE_GL_WEIGHTS = np.polynomial.legendre.leggauss(192)


def oracle_nct_logpdf(x: float, df: float, nc: float) -> float:
    """Noncentral-t log density from its integral representation.

    scipy's implementation overflows past df ~ 340, so the oracle carries
    its own: the y-integral of y^df exp(-(y - a)^2 / 2) is evaluated on a
    peak-centred window with a fixed 192-node Gauss-Legendre rule after
    rescaling by the peak value. Cross-checked against scipy.stats.nct
    where that one works.
    """
    a = nc * x / math.sqrt(x * x + df)
    y_star = 0.5 * (a + math.sqrt(a * a + 4.0 * df))
    h_star = df * math.log(y_star) - 0.5 * (y_star - a) ** 2
    sd = 1.0 / math.sqrt(df / y_star**2 + 1.0)
    lo, hi = max(y_star - 14.0 * sd, 0.0), y_star + 14.0 * sd
    half = 0.5 * (hi - lo)
    y = 0.5 * (hi + lo) + half * _ORACLE_GL_NODES
    with np.errstate(divide="ignore"):
        hy = np.where(y > 0.0, df * np.log(y) - 0.5 * (y - a) ** 2, -np.inf)
    log_i = h_star + math.log(half * float(_ORACLE_GL_WEIGHTS @ np.exp(hy - h_star)))
    return (
        0.5 * df * math.log(df)
        - df * nc * nc / (2.0 * (x * x + df))
        - 0.5 * math.log(math.pi)
        - math.lgamma(0.5 * df)
        - 0.5 * (df - 1.0) * math.log(2.0)
        - 0.5 * (df + 1.0) * math.log(x * x + df)
        + log_i
    )


def oracle_log_bf(summary, prior) -> float:
    """log BF10 via the predictive density of the t statistic: a noncentral
    t with noncentrality sqrt(n_eff) * delta mixed over the prior, against
    the central t under the null."""
    t, nu, root_ne = summary.t, summary.nu, math.sqrt(summary.n_eff)
    dhat = t / root_ne

    def predictive(d):
        v = oracle_nct_logpdf(t, nu, root_ne * d)
        return math.exp(v) if v > -700.0 else 0.0

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        if isinstance(prior, NormalPrior):
            sd = math.sqrt(prior.variance)
            loc = prior.mean
            f = lambda d: predictive(d) * stats.norm.pdf(d, loc, sd)
            lo, hi = loc - 12.0 * sd, loc + 12.0 * sd
            pts = sorted({min(max(dhat, lo + 1e-12), hi - 1e-12), loc})
            num, _ = integrate.quad(
                f, lo, hi, points=pts, epsabs=1e-280, epsrel=1e-11, limit=400
            )
        else:
            loc, sc, df = prior.location, prior.scale, prior.df
            f = lambda d: predictive(d) * stats.t.pdf((d - loc) / sc, df) / sc
            lo = min(loc - 30.0 * sc, dhat - 5.0)
            hi = max(loc + 30.0 * sc, dhat + 5.0)
            pts = sorted({min(max(dhat, lo + 1e-9), hi - 1e-9), loc})
            mid, _ = integrate.quad(
                f, lo, hi, points=pts, epsabs=1e-280, epsrel=1e-11, limit=400
            )
            left, _ = integrate.quad(f, -np.inf, lo, epsabs=1e-280, epsrel=1e-10)
            right, _ = integrate.quad(f, hi, np.inf, epsabs=1e-280, epsrel=1e-10)
            num = mid + left + right
    return math.log(num) - float(stats.t.logpdf(t, nu))


def rel_linear(log_a: float, log_b: float) -> float:
    """Relative difference of two positive quantities given as logs."""
    return abs(math.expm1(log_a - log_b))


def rel_log(log_a: float, log_b: float) -> float:
    """Relative difference of the log values themselves, floored at 1."""
    return abs(log_a - log_b) / max(1.0, abs(log_a), abs(log_b))
