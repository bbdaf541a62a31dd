"""Exact-sign, log-magnitude scalars.

Products of gamma-function and confluent-hypergeometric factors overflow
double precision long before the sample sizes accepted by this package
become unusual (Gamma((nu+1)/2) alone overflows past nu ~ 340), so every
intermediate marginal quantity is carried as a sign plus the natural log
of its magnitude and only converted back to linear scale at API
boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["SignedLogValue", "log_add_exp", "log_sub_exp"]

_NEG_INF = float("-inf")


def log_add_exp(a: float, b: float) -> float:
    """log(e^a + e^b) without leaving log space."""
    if a == _NEG_INF:
        return b
    if b == _NEG_INF:
        return a
    hi, lo = (a, b) if a >= b else (b, a)
    return hi + math.log1p(math.exp(lo - hi))


def log_sub_exp(a: float, b: float) -> float:
    """log(e^a - e^b) for a >= b; -inf when the difference underflows."""
    if b == _NEG_INF:
        return a
    if a < b:
        raise ValueError("log_sub_exp requires a >= b")
    d = a - b
    if d == 0.0:
        return _NEG_INF
    return a + math.log(-math.expm1(-d))


@dataclass(frozen=True)
class SignedLogValue:
    """A real number stored as ``sign * exp(log_magnitude)``.

    ``sign`` is -1, 0 or +1; ``log_magnitude`` is ignored (and normalised
    to -inf) when the sign is 0.
    """

    sign: int
    log_magnitude: float

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign!r}")
        if self.sign == 0 and self.log_magnitude != _NEG_INF:
            object.__setattr__(self, "log_magnitude", _NEG_INF)

    @classmethod
    def zero(cls) -> "SignedLogValue":
        return cls(0, _NEG_INF)

    @classmethod
    def from_float(cls, x: float) -> "SignedLogValue":
        if x == 0.0:
            return cls.zero()
        if not math.isfinite(x):
            raise ValueError(f"cannot represent non-finite value {x!r}")
        return cls(1 if x > 0.0 else -1, math.log(abs(x)))

    @classmethod
    def from_log(cls, log_magnitude: float, sign: int = 1) -> "SignedLogValue":
        if log_magnitude == _NEG_INF:
            return cls.zero()
        return cls(sign, log_magnitude)

    def to_float(self) -> float:
        """Linear-scale value; overflows to +-inf when not representable."""
        if self.sign == 0:
            return 0.0
        try:
            mag = math.exp(self.log_magnitude)
        except OverflowError:
            mag = math.inf
        return self.sign * mag

    def positive_log(self) -> float:
        """The log of a value asserted to be positive."""
        if self.sign != 1:
            raise ArithmeticError(
                f"expected a positive value, got sign {self.sign}"
            )
        return self.log_magnitude

    def __mul__(self, other: "SignedLogValue") -> "SignedLogValue":
        sign = self.sign * other.sign
        if sign == 0:
            return SignedLogValue.zero()
        return SignedLogValue(sign, self.log_magnitude + other.log_magnitude)

    def __add__(self, other: "SignedLogValue") -> "SignedLogValue":
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        if self.sign == other.sign:
            return SignedLogValue(
                self.sign, log_add_exp(self.log_magnitude, other.log_magnitude)
            )
        # opposite signs: magnitude is a log-space difference
        if self.log_magnitude == other.log_magnitude:
            return SignedLogValue.zero()
        big, small = (
            (self, other)
            if self.log_magnitude > other.log_magnitude
            else (other, self)
        )
        return SignedLogValue(
            big.sign, log_sub_exp(big.log_magnitude, small.log_magnitude)
        )

    def __neg__(self) -> "SignedLogValue":
        if self.sign == 0:
            return self
        return SignedLogValue(-self.sign, self.log_magnitude)

    def __sub__(self, other: "SignedLogValue") -> "SignedLogValue":
        return self + (-other)
