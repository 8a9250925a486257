"""Exact q-series arithmetic: tau coefficients, Eisenstein expansions,
and coefficient-level identity checks.

Everything in this module is integer/rational and exact.  The discriminant
form is expanded as q * prod(1-q^n)^24, with the Euler product generated by
the pentagonal number theorem and the 24th power taken by repeated squaring
of truncated series.  Dense integer polynomial products go through Kronecker
substitution (pack coefficients into one big integer, multiply once, unpack),
which keeps the N=1000 checks essentially instant.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import ResourceLimitError
from .reports import VerificationReport, exact_report

# Hard ceiling on expansion orders; above this the coefficient storage and
# the packed products stop being desk-scale.
DEFAULT_MAX_ORDER = 500_000


# ----------------------------------------------------------------------
# integer polynomial kernels (lists of ints, index = exponent)

def _poly_mul_school(a, b, order):
    out = [0] * order
    # iterate over the sparser operand
    if sum(1 for v in a if v) > sum(1 for v in b if v):
        a, b = b, a
    nb = len(b)
    for i, av in enumerate(a):
        if av == 0 or i >= order:
            continue
        top = min(nb, order - i)
        for j in range(top):
            bv = b[j]
            if bv:
                out[i + j] += av * bv
    return out


def _pack(vals, nbytes):
    buf = bytearray(nbytes * len(vals))
    for i, v in enumerate(vals):
        if v:
            buf[i * nbytes:(i + 1) * nbytes] = v.to_bytes(nbytes, "little")
    return int.from_bytes(buf, "little")


def _unpack(z, nbytes, count):
    raw = z.to_bytes((z.bit_length() + 7) // 8 + nbytes, "little")
    return [int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little")
            for i in range(count)]


def _poly_mul_kron(a, b, order):
    """Truncated product via Kronecker substitution.

    Signs are handled by splitting into non-negative parts, so each packed
    digit stays below the chosen limb width and unpacking needs no borrow
    logic.
    """
    maxa = max(abs(v) for v in a)
    maxb = max(abs(v) for v in b)
    if maxa == 0 or maxb == 0:
        return [0] * order
    bound = 2 * min(len(a), len(b)) * maxa * maxb
    nbytes = (bound.bit_length() + 8) // 8 + 1
    ap = [v if v > 0 else 0 for v in a]
    an = [-v if v < 0 else 0 for v in a]
    bp = [v if v > 0 else 0 for v in b]
    bn = [-v if v < 0 else 0 for v in b]
    pos = _pack(ap, nbytes) * _pack(bp, nbytes) + _pack(an, nbytes) * _pack(bn, nbytes)
    neg = _pack(ap, nbytes) * _pack(bn, nbytes) + _pack(an, nbytes) * _pack(bp, nbytes)
    dp = _unpack(pos, nbytes, order)
    dn = _unpack(neg, nbytes, order)
    return [p - n for p, n in zip(dp, dn)]


def _poly_mul(a, b, order):
    nza = sum(1 for v in a if v)
    nzb = sum(1 for v in b if v)
    if nza == 0 or nzb == 0:
        return [0] * order
    if order <= 64 or min(nza, nzb) <= 40:
        return _poly_mul_school(a, b, order)
    return _poly_mul_kron(a, b, order)


def _euler_product(order):
    """(q;q)_inf truncated: pentagonal number theorem, O(sqrt(order)) terms."""
    c = [0] * order
    c[0] = 1
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        g2 = k * (3 * k + 1) // 2
        if g1 >= order and g2 >= order:
            break
        s = -1 if k % 2 else 1
        if g1 < order:
            c[g1] += s
        if g2 < order:
            c[g2] += s
        k += 1
    return c


# ----------------------------------------------------------------------
# QSeries

class QSeries:
    """Truncated power series in q with exact rational coefficients.

    ``order`` is the truncation order: coefficients for exponents >= order
    are unknown, not zero, so a product only trusts min(order_a, order_b)
    coefficients.  Internally the series is held over a common denominator
    (integer numerators plus one positive denominator) so the convolutions
    stay in fast integer arithmetic; the content gcd is divided out to keep
    equality structural.
    """

    __slots__ = ("_num", "_den", "order")

    def __init__(self, coeffs, order=None):
        coeffs = list(coeffs)
        if order is None:
            order = len(coeffs)
        if order < 1:
            raise ValueError("order must be >= 1")
        if len(coeffs) > order:
            coeffs = coeffs[:order]
        fracs = [Fraction(c) for c in coeffs] + [Fraction(0)] * (order - len(coeffs))
        den = math.lcm(*(f.denominator for f in fracs)) if fracs else 1
        nums = [int(f * den) for f in fracs]
        self._init_raw(nums, den, order)

    def _init_raw(self, nums, den, order):
        g = den
        for v in nums:
            if v:
                g = math.gcd(g, v)
                if g == 1:
                    break
        if g > 1:
            nums = [v // g for v in nums]
            den //= g
        self._num = nums
        self._den = den
        self.order = order

    @classmethod
    def _raw(cls, nums, den, order):
        s = cls.__new__(cls)
        s._init_raw(list(nums), den, order)
        return s

    @classmethod
    def from_ints(cls, coeffs, order=None):
        coeffs = list(coeffs)
        if order is None:
            order = len(coeffs)
        coeffs = coeffs[:order] + [0] * (order - len(coeffs))
        return cls._raw(coeffs, 1, order)

    # -- access

    def coeff(self, i) -> Fraction:
        if not 0 <= i < self.order:
            raise IndexError(f"coefficient {i} is beyond truncation order {self.order}")
        return Fraction(self._num[i], self._den)

    @property
    def coeffs(self):
        return tuple(Fraction(v, self._den) for v in self._num)

    def int_coeffs(self):
        """Numerators when the series is integral (denominator 1)."""
        if self._den != 1:
            raise ValueError("series has non-integer coefficients")
        return list(self._num)

    def truncate(self, order):
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return QSeries._raw(self._num[:order], self._den, order)

    # -- arithmetic

    def __add__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        order = min(self.order, other.order)
        da, db = self._den, other._den
        nums = [na * db + nb * da
                for na, nb in zip(self._num[:order], other._num[:order])]
        return QSeries._raw(nums, da * db, order)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return QSeries._raw([-v for v in self._num], self._den, self.order)

    def __mul__(self, other):
        if isinstance(other, QSeries):
            order = min(self.order, other.order)
            nums = _poly_mul(self._num[:order], other._num[:order], order)
            return QSeries._raw(nums, self._den * other._den, order)
        if isinstance(other, (int, Fraction)):
            fr = Fraction(other)
            nums = [v * fr.numerator for v in self._num]
            return QSeries._raw(nums, self._den * fr.denominator, self.order)
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        result = QSeries.from_ints([1], self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return (self.order == other.order and self._den == other._den
                and self._num == other._num)

    def __hash__(self):
        return hash((tuple(self._num), self._den, self.order))

    def first_mismatch(self, other):
        """Index and values of the first differing coefficient, else None.

        Compares over the common trustworthy range min(order, other.order).
        """
        order = min(self.order, other.order)
        for i in range(order):
            a = Fraction(self._num[i], self._den)
            b = Fraction(other._num[i], other._den)
            if a != b:
                return (i, a, b)
        return None

    def __repr__(self):
        head = ", ".join(str(Fraction(v, self._den)) for v in self._num[:6])
        return f"QSeries([{head}{', ...' if self.order > 6 else ''}], order={self.order})"


def dilate(s: QSeries, m: int) -> QSeries:
    """Substitute q -> q^m: coefficient of q^(mj) gets coefficient of q^j.

    The truncation order is kept, so the result never claims more
    coefficients than the input supplied.
    """
    if m < 1:
        raise ValueError("dilation factor must be a positive integer")
    if m == 1:
        return s
    nums = [0] * s.order
    for j in range(0, (s.order - 1) // m + 1):
        nums[j * m] = s._num[j]
    return QSeries._raw(nums, s._den, s.order)


# ----------------------------------------------------------------------
# Bernoulli numbers and rational zeta values

@lru_cache(maxsize=None)
def bernoulli_number(n: int) -> Fraction:
    """B_n by the Akiyama-Tanigawa recurrence (B_1 = +1/2 convention)."""
    if n < 0:
        raise ValueError("Bernoulli index must be non-negative")
    row = [Fraction(0)] * (n + 1)
    for m in range(n + 1):
        row[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            row[j - 1] = j * (row[j - 1] - row[j])
    return row[0]


def zeta_negative(s: int) -> Fraction:
    """Exact rational zeta(s) for integer s <= 0: zeta(-n) = -B_(n+1)/(n+1)."""
    if not isinstance(s, int) or s > 0:
        raise ValueError(f"zeta({s}) is not a rational value computed here")
    n = -s
    return -bernoulli_number(n + 1) / (n + 1)


# ----------------------------------------------------------------------
# Delta, tau, Eisenstein

_tau_list: list[int] = [0, 1]   # index n -> tau(n); grown on demand


def eta24_expand(N: int, max_order: int = DEFAULT_MAX_ORDER) -> QSeries:
    """q-expansion of q * prod(1-q^n)^24 to order N (exact integers).

    The coefficient of q^1 is tau(1) = 1; the shared tau table is refreshed
    up to N-1 as a side effect.
    """
    if N < 2:
        raise ValueError("expansion order must be at least 2")
    if N > max_order:
        raise ResourceLimitError(
            f"expansion order {N} exceeds the configured budget {max_order}")
    e = _euler_product(N)
    p2 = _poly_mul(e, e, N)
    p4 = _poly_mul(p2, p2, N)
    p8 = _poly_mul(p4, p4, N)
    p16 = _poly_mul(p8, p8, N)
    p24 = _poly_mul(p16, p8, N)
    delta = [0] + p24[:N - 1]
    global _tau_list
    if N > len(_tau_list):
        _tau_list = [0] + delta[1:]
    return QSeries.from_ints(delta, N)


@dataclass(frozen=True)
class TauTable:
    """tau(n) for 1 <= n <= limit, exact integers."""

    values: dict
    limit: int

    def __getitem__(self, n: int) -> int:
        return self.values[n]


def tau_table(limit: int, max_order: int = DEFAULT_MAX_ORDER) -> TauTable:
    """Table of tau(1..limit), served from a shared cached expansion."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    if limit + 1 > len(_tau_list):
        eta24_expand(max(limit + 1, 2 * len(_tau_list)), max_order=max_order)
    return TauTable({n: _tau_list[n] for n in range(1, limit + 1)}, limit)


def _sigma_list(power: int, N: int):
    s = [0] * N
    for d in range(1, N):
        dp = d ** power
        for m in range(d, N, d):
            s[m] += dp
    return s


def eisenstein_qseries(k: int, N: int) -> QSeries:
    """E_k = 1 + (2/zeta(1-k)) * sum sigma_(k-1)(n) q^n, truncated at N."""
    if k % 2 or k < 4:
        raise ValueError("Eisenstein weight must be an even integer >= 4")
    if N < 1:
        raise ValueError("order must be >= 1")
    scale = Fraction(2) / zeta_negative(1 - k)
    sig = _sigma_list(k - 1, N)
    nums = [scale.numerator * v for v in sig]
    nums[0] = scale.denominator
    return QSeries._raw(nums, scale.denominator, N)


# ----------------------------------------------------------------------
# exact verification operations

def verify_decomposition(N: int) -> VerificationReport:
    """Check the level-4 factorization of Delta(z)+24 Delta(2z)+2^11 Delta(4z)
    into (8/504^2) [E6(2z)-64 E6(4z)] [E6(z)-33 E6(2z)+32 E6(4z)], to order N.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    t0 = time.perf_counter()
    delta = eta24_expand(max(N, 2)).truncate(N)
    lhs = delta + 24 * dilate(delta, 2) + 2 ** 11 * dilate(delta, 4)
    e6 = eisenstein_qseries(6, N)
    first = dilate(e6, 2) - 64 * dilate(e6, 4)
    second = e6 - 33 * dilate(e6, 2) + 32 * dilate(e6, 4)
    rhs = Fraction(8, 504 ** 2) * (first * second)
    mismatch = lhs.first_mismatch(rhs)
    elapsed = (time.perf_counter() - t0) * 1000
    return exact_report("lemma21", N, mismatch, elapsed,
                        detail=f"{N} coefficients compared exactly")


def verify_ramanujan_1728(N: int) -> VerificationReport:
    """Check 1728 Delta = E4^3 - E6^2 exactly to order N."""
    if N < 1:
        raise ValueError("N must be >= 1")
    t0 = time.perf_counter()
    delta = eta24_expand(max(N, 2)).truncate(N)
    lhs = 1728 * delta
    e4 = eisenstein_qseries(4, N)
    e6 = eisenstein_qseries(6, N)
    rhs = e4 * e4 * e4 - e6 * e6
    mismatch = lhs.first_mismatch(rhs)
    elapsed = (time.perf_counter() - t0) * 1000
    return exact_report("ramanujan1728", N, mismatch, elapsed,
                        detail=f"{N} coefficients compared exactly")


def _primes_up_to(n):
    if n < 2:
        return []
    sieve = bytearray(b"\x01") * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, int(n ** 0.5) + 1):
        if sieve[p]:
            sieve[p * p::p] = b"\x00" * len(sieve[p * p::p])
    return [i for i, v in enumerate(sieve) if v]


def tau_structure_check(limit: int) -> VerificationReport:
    """Multiplicativity on coprime pairs and the Hecke recursion at prime
    powers, exactly, for all applicable n <= limit.
    """
    if limit < 1:
        raise ValueError("limit must be >= 1")
    t0 = time.perf_counter()
    table = tau_table(max(limit, 1))
    tau = table.values
    checked = 0
    mismatch = None
    for m in range(2, limit + 1):
        if m * (m + 1) > limit:
            break
        for n in range(m + 1, limit // m + 1):
            if math.gcd(m, n) != 1:
                continue
            checked += 1
            if tau[m * n] != tau[m] * tau[n]:
                mismatch = (m * n, Fraction(tau[m * n]), Fraction(tau[m] * tau[n]))
                break
        if mismatch:
            break
    if mismatch is None:
        for p in _primes_up_to(int(limit ** 0.5) + 1):
            r = 1
            while p ** (r + 1) <= limit:
                checked += 1
                lhs = tau[p ** (r + 1)]
                rhs = tau[p] * tau[p ** r] - p ** 11 * tau[p ** (r - 1)] if r > 1 \
                    else tau[p] * tau[p] - p ** 11
                if lhs != rhs:
                    mismatch = (p ** (r + 1), Fraction(lhs), Fraction(rhs))
                    break
                r += 1
            if mismatch:
                break
    elapsed = (time.perf_counter() - t0) * 1000
    return exact_report("tau_structure", checked, mismatch, elapsed,
                        detail=f"{checked} relations checked up to n={limit}")
