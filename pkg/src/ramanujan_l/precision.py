"""Precision bookkeeping for arbitrary-precision evaluation.

All floating-point work runs on mpmath binary floats under an explicit
context: a target precision, extra guard bits, and a threshold used when
truncating infinite series.  Values are plain ``mpmath.mpf`` computed at
``target_bits + guard_bits`` working precision; by convention every
operation takes the context that governs it, so values produced under
different contexts are never combined implicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mpf

# Values are ordinary mpmath floats; the context travels alongside them.
BigReal = mpmath.mpf


@dataclass(frozen=True)
class PrecCtx:
    """Precision context: requested bits, guard bits, series-tail threshold.

    ``series_tail_eps`` of None means "derive from the working precision"
    (2^-(working_bits - 8)).  An explicit value must be positive and is kept
    exact as a Fraction so contexts hash and compare cleanly.
    """

    target_bits: int = 128
    guard_bits: int = 64
    series_tail_eps: Fraction | None = None

    def __post_init__(self):
        if self.target_bits < 32:
            raise ValueError("target_bits must be at least 32")
        if self.guard_bits < 32:
            raise ValueError("guard_bits must be at least 32")
        if self.series_tail_eps is not None:
            eps = Fraction(self.series_tail_eps)
            if eps <= 0:
                raise ValueError("series_tail_eps must be positive")
            object.__setattr__(self, "series_tail_eps", eps)

    @property
    def working_bits(self) -> int:
        return self.target_bits + self.guard_bits

    def workprec(self, extra: int = 0):
        """Context manager setting mpmath precision to working_bits + extra."""
        return mpmath.workprec(self.working_bits + extra)

    def tail_eps(self) -> mpf:
        """Series-truncation threshold as an mpf at the current precision."""
        if self.series_tail_eps is not None:
            return from_fraction(self.series_tail_eps)
        return mpf(2) ** (-(self.working_bits - 8))

    def quad_eps(self) -> mpf:
        """Default quadrature convergence threshold, 2^-(target_bits - 8)."""
        return mpf(2) ** (-(self.target_bits - 8))

    def boosted(self, extra_bits: int) -> "PrecCtx":
        """A copy of this context with a higher target precision."""
        return PrecCtx(self.target_bits + extra_bits, self.guard_bits,
                       self.series_tail_eps)


DEFAULT_CTX = PrecCtx()


def from_fraction(x) -> mpf:
    """Exact rational -> mpf at the current working precision."""
    fr = Fraction(x)
    return mpf(fr.numerator) / fr.denominator


def to_fraction(x) -> Fraction:
    """mpf -> exact Fraction (binary floats are exact rationals)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    sign, man, exp, _ = x._mpf_
    if man == 0 and exp != 0:
        raise ValueError("cannot convert non-finite value to Fraction")
    fr = Fraction(man) * Fraction(2) ** exp
    return -fr if sign else fr


def decimal_digits(bits: int) -> int:
    """Decimal digits that round-trip a binary precision of `bits`."""
    return int(math.ceil(bits * math.log10(2))) + 2


def decimal_str(x, bits: int = 0) -> str:
    """Deterministic decimal rendering of a numeric report field.

    mpf values are printed with enough digits to round-trip `bits` of
    precision; exact rationals are printed as 'p/q'; ints verbatim.
    """
    if isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"
    digits = decimal_digits(max(bits, 64))
    return mpmath.nstr(x, digits)
