"""Directed rational enclosures of the irrational constants the library needs.

Every comparison against ln t, e, gamma, or a logarithm goes through a closed
rational interval [lo, hi] that provably contains the true value.  Certifying
code always compares against the safe end of the interval, so no floating
point ever enters a proof.  Default target width is 2**-64.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import EnclosureTooWide

DEFAULT_PRECISION_BITS = 64


@dataclass(frozen=True, slots=True)
class Interval:
    """Closed interval with rational endpoints, lo <= hi."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, value) -> bool:
        return self.lo <= value <= self.hi

    def __add__(self, other: "Interval | Fraction | int") -> "Interval":
        if isinstance(other, Interval):
            return Interval(self.lo + other.lo, self.hi + other.hi)
        return Interval(self.lo + other, self.hi + other)

    __radd__ = __add__

    def __sub__(self, other: "Interval | Fraction | int") -> "Interval":
        if isinstance(other, Interval):
            return Interval(self.lo - other.hi, self.hi - other.lo)
        return Interval(self.lo - other, self.hi - other)

    def __mul__(self, other: "Interval | Fraction | int") -> "Interval":
        if isinstance(other, Interval):
            prods = [a * b for a in (self.lo, self.hi) for b in (other.lo, other.hi)]
            return Interval(min(prods), max(prods))
        if other >= 0:
            return Interval(self.lo * other, self.hi * other)
        return Interval(self.hi * other, self.lo * other)

    __rmul__ = __mul__

    def reciprocal(self) -> "Interval":
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("interval straddles zero")
        return Interval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other: "Interval | Fraction | int") -> "Interval":
        if isinstance(other, Interval):
            return self * other.reciprocal()
        return self * (Fraction(1) / Fraction(other))

    def certainly_le(self, value: Fraction) -> bool:
        return self.hi <= value

    def certainly_ge(self, value: Fraction) -> bool:
        return self.lo >= value


def _tol(precision_bits: int) -> Fraction:
    return Fraction(1, 2**precision_bits)


def ln_interval(x, precision_bits: int = DEFAULT_PRECISION_BITS) -> Interval:
    """Enclosure of ln(x) for rational x > 0.

    Uses ln x = 2*atanh(z) with z = (x-1)/(x+1); the series has positive
    terms for x > 1 and the tail is bounded by a geometric series.  Large
    arguments are reduced through ln x = m*ln 2 + ln r with r in [1, 2).
    """
    x = Fraction(x)
    if x <= 0:
        raise ValueError("ln requires a positive argument")
    if x == 1:
        return Interval(Fraction(0), Fraction(0))
    if x < 1:
        inner = ln_interval(1 / x, precision_bits)
        return Interval(-inner.hi, -inner.lo)
    m = 0
    while x >= 2:
        x /= 2
        m += 1
    tol = _tol(precision_bits + 1)
    total = Interval(Fraction(0), Fraction(0))
    if m:
        ln2 = _atanh_twice(Fraction(2), tol / (2 * m))
        total = total + ln2 * m
    if x > 1:
        total = total + _atanh_twice(x, tol)
    return total


def _atanh_twice(x: Fraction, tol: Fraction) -> Interval:
    """Enclosure of ln x = 2*sum z^(2k+1)/(2k+1) for 1 < x <= 2."""
    z = (x - 1) / (x + 1)
    z2 = z * z
    term = z
    partial = Fraction(0)
    k = 0
    while True:
        partial += term / (2 * k + 1)
        term *= z2
        # remaining tail <= term/(2k+3) * 1/(1-z2), a geometric bound
        tail = term / ((2 * k + 3) * (1 - z2))
        if 2 * tail < tol:
            return Interval(2 * partial, 2 * partial + 2 * tail)
        k += 1


def e_interval(precision_bits: int = DEFAULT_PRECISION_BITS) -> Interval:
    """Enclosure of Euler's number from the factorial series with tail bound."""
    tol = _tol(precision_bits)
    total = Fraction(0)
    term = Fraction(1)
    k = 0
    while True:
        total += term
        k += 1
        term /= k
        # tail = sum_{j>=k} 1/j! <= 2/k!
        tail = 2 * term
        if tail < tol:
            return Interval(total, total + tail)


# Euler-Mascheroni constant, 50 certified decimal digits (OEIS A001620).
_GAMMA_DIGITS = 57721566490153286060651209008240243104215933593992
_GAMMA_SCALE = 10**50
_GAMMA = Interval(
    Fraction(_GAMMA_DIGITS, _GAMMA_SCALE),
    Fraction(_GAMMA_DIGITS + 1, _GAMMA_SCALE),
)


def euler_gamma_interval(precision_bits: int = DEFAULT_PRECISION_BITS) -> Interval:
    """Enclosure of the Euler-Mascheroni constant.

    Backed by a stored 50-digit enclosure; requests beyond that width are
    refused rather than silently degraded.
    """
    if _tol(precision_bits) < _GAMMA.width:
        raise EnclosureTooWide(
            f"gamma enclosure limited to width {float(_GAMMA.width):.1e}"
        )
    return _GAMMA


def log_base_interval(x, base, precision_bits: int = DEFAULT_PRECISION_BITS) -> Interval:
    """Enclosure of log_base(x) for rationals x > 0, base > 1."""
    num = ln_interval(x, precision_bits)
    den = ln_interval(base, precision_bits)
    return num * den.reciprocal()


def log2_interval(x, precision_bits: int = DEFAULT_PRECISION_BITS) -> Interval:
    return log_base_interval(x, 2, precision_bits)
