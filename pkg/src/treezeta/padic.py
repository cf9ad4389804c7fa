"""p-adic valuations of rationals and the local-field context."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

INFINITY = float("inf")


def is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def valuation(x, p):
    """p-adic valuation of a rational; +inf for 0."""
    x = Fraction(x)
    if x == 0:
        return INFINITY
    v = 0
    n = x.numerator
    while n % p == 0:
        n //= p
        v += 1
    d = x.denominator
    while d % p == 0:
        d //= p
        v -= 1
    return v


def unit_part(x, p):
    """x / p^v(x) as a Fraction (p-adic unit)."""
    v = valuation(x, p)
    return Fraction(x) / Fraction(p) ** v


@dataclass(frozen=True)
class PadicContext:
    """Prime, residue degree and the precision budget for exact tree work."""

    p: int
    f: int = 1
    precision: int = 64

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.f < 1 or self.precision < 1:
            raise ValueError("f and precision must be >= 1")

    @property
    def q(self):
        return self.p ** self.f

    def val(self, x):
        return valuation(x, self.p)
