"""Log-space special functions.

Everything the marginal-likelihood formulas need: log-gamma, the log of
Kummer's function 1F1 for the nonnegative arguments this package
produces, the shifted/scaled Student-t density/CDF/quantile, and the
inverse-gamma log density.
"""

from __future__ import annotations

import math

from scipy.special import betainc

from .errors import DomainError

__all__ = [
    "log_gamma",
    "log_1f1",
    "student_t_logpdf",
    "student_t_cdf",
    "student_t_quantile",
    "inv_gamma_logpdf",
    "normal_logpdf",
    "normal_cdf",
]

_LN_PI = math.log(math.pi)
_LN_2PI = math.log(2.0 * math.pi)

# Kummer series: stop once the next term sits this many e-folds below the
# running sum (contributes < 3e-20 relatively).
_SERIES_STOP_DROP = 45.0
# Large-argument expansion only past this point, and only when the argument
# dominates the parameters; see log_1f1.
_ASYMPTOTIC_MIN_X = 1.0e4
_ASYMPTOTIC_PARAM_FACTOR = 40.0


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"log_gamma requires finite x > 0, got {x}")
    return math.lgamma(x)


def log_1f1(a: float, b: float, x: float) -> float:
    """ln 1F1(a; b; x) for a > 0, b > 0, x >= 0.

    Every argument produced by this package satisfies those constraints,
    so the Kummer series has positive terms only and can be summed in log
    space with no cancellation. Past the crossover the large-x expansion
    ln Gamma(b) - ln Gamma(a) + x + (a - b) ln x, times its correction
    series, takes over; the crossover requires x to dominate max(a, b)^2
    so that the correction series converges rapidly.
    """
    a = float(a)
    b = float(b)
    x = float(x)
    if not (math.isfinite(a) and math.isfinite(b) and math.isfinite(x)):
        raise DomainError(f"log_1f1 requires finite arguments, got {(a, b, x)}")
    if a <= 0.0 or b <= 0.0:
        raise DomainError(f"log_1f1 requires a > 0 and b > 0, got a={a}, b={b}")
    if x < 0.0:
        raise DomainError(f"log_1f1 requires x >= 0, got x={x}")
    if x == 0.0:
        return 0.0
    if x >= _ASYMPTOTIC_MIN_X and x >= _ASYMPTOTIC_PARAM_FACTOR * max(a, b) ** 2:
        return _log_1f1_asymptotic(a, b, x)
    return _log_1f1_series(a, b, x)


def _log_1f1_series(a: float, b: float, x: float) -> float:
    # Streaming log-sum-exp: m tracks the largest log term seen, s the sum
    # of terms rescaled by exp(-m). Terms rise to a single peak then decay,
    # so the stop rule cannot fire before the peak (the sum never exceeds
    # the peak term by more than log(k) << 45 e-folds during the climb).
    log_x = math.log(x)
    log_term = 0.0
    m = 0.0
    s = 1.0
    k = 0
    while True:
        log_term += math.log(a + k) + log_x - math.log(b + k) - math.log1p(k)
        k += 1
        log_sum = m + math.log(s)
        if log_term < log_sum - _SERIES_STOP_DROP:
            return log_sum
        if log_term > m:
            s = s * math.exp(m - log_term) + 1.0
            m = log_term
        else:
            s += math.exp(log_term - m)
        if k > 2_000_000:  # unreachable for the supported argument ranges
            raise DomainError(
                f"1F1 series did not converge for a={a}, b={b}, x={x}"
            )


def _log_1f1_asymptotic(a: float, b: float, x: float) -> float:
    # DLMF 13.7.1 with the e^{-x}-scale component dropped (relative size
    # below e^{-1e4} here). The crossover guarantees |first correction| <=
    # about 1/10, so the correction sum stays near 1 and is safe in linear
    # scale.
    s = 1.0
    term = 1.0
    for n in range(1, 80):
        term *= (b - a + n - 1.0) * (n - a) / (n * x)
        s += term
        if abs(term) <= 1e-18 * abs(s):
            break
    return math.lgamma(b) - math.lgamma(a) + x + (a - b) * math.log(x) + math.log(s)


def _check_scale_df(scale: float, df: float, who: str) -> None:
    if not (math.isfinite(scale) and scale > 0.0):
        raise DomainError(f"{who} requires scale > 0, got {scale}")
    if not (math.isfinite(df) and df > 0.0):
        raise DomainError(f"{who} requires df > 0, got {df}")


def student_t_logpdf(x: float, location: float, scale: float, df: float) -> float:
    """Log density of the shifted and scaled Student-t distribution."""
    _check_scale_df(scale, df, "student_t_logpdf")
    z = (x - location) / scale
    return (
        math.lgamma(0.5 * (df + 1.0))
        - math.lgamma(0.5 * df)
        - 0.5 * (_LN_PI + math.log(df))
        - math.log(scale)
        - 0.5 * (df + 1.0) * math.log1p(z * z / df)
    )


def student_t_cdf(x: float, location: float, scale: float, df: float) -> float:
    """CDF of the shifted and scaled Student-t, via the regularized
    incomplete beta function."""
    _check_scale_df(scale, df, "student_t_cdf")
    z = (x - location) / scale
    if z == 0.0:
        return 0.5
    tail = 0.5 * float(betainc(0.5 * df, 0.5, df / (df + z * z)))
    return tail if z < 0.0 else 1.0 - tail


def student_t_quantile(p: float, location: float, scale: float, df: float) -> float:
    """Inverse CDF; quantile(0.5) returns the location exactly."""
    _check_scale_df(scale, df, "student_t_quantile")
    if not (0.0 < p < 1.0):
        raise DomainError(f"student_t_quantile requires p in (0, 1), got {p}")
    if p == 0.5:
        return location
    # Solve for the lower-tail standard quantile, flip afterwards.
    q = min(p, 1.0 - p)
    lo = -1.0
    while student_t_cdf(lo, 0.0, 1.0, df) > q:
        lo *= 2.0
        if lo < -1e300:
            break
    hi = 0.0
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        if student_t_cdf(mid, 0.0, 1.0, df) > q:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-9 * max(1.0, abs(lo)):
            break
    z = 0.5 * (lo + hi)
    for _ in range(4):  # Newton polish, derivative from the pdf
        err = student_t_cdf(z, 0.0, 1.0, df) - q
        step = err / math.exp(student_t_logpdf(z, 0.0, 1.0, df))
        if not math.isfinite(step):
            break
        z -= step
    if p > 0.5:
        z = -z
    return location + scale * z


def inv_gamma_logpdf(g: float, shape: float, scale: float) -> float:
    """Log density of the inverse-gamma distribution with the given shape
    and scale: scale^shape / Gamma(shape) * g^(-shape-1) * exp(-scale/g)."""
    if not (math.isfinite(g) and g > 0.0):
        raise DomainError(f"inv_gamma_logpdf requires g > 0, got {g}")
    if not (math.isfinite(shape) and shape > 0.0):
        raise DomainError(f"inv_gamma_logpdf requires shape > 0, got {shape}")
    if not (math.isfinite(scale) and scale > 0.0):
        raise DomainError(f"inv_gamma_logpdf requires scale > 0, got {scale}")
    return (
        shape * math.log(scale)
        - math.lgamma(shape)
        - (shape + 1.0) * math.log(g)
        - scale / g
    )


def normal_logpdf(x: float, mean: float, variance: float) -> float:
    if not (math.isfinite(variance) and variance > 0.0):
        raise DomainError(f"normal_logpdf requires variance > 0, got {variance}")
    d = x - mean
    return -0.5 * (_LN_2PI + math.log(variance) + d * d / variance)


def normal_cdf(x: float, mean: float, variance: float) -> float:
    if not (math.isfinite(variance) and variance > 0.0):
        raise DomainError(f"normal_cdf requires variance > 0, got {variance}")
    return 0.5 * math.erfc(-(x - mean) / math.sqrt(2.0 * variance))
