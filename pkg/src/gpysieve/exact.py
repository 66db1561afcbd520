"""Exact rational arithmetic and the Beta-moment identity.

Every closed-form sieve integral in this package reduces to sums of
``beta_integral(a, b)`` with rational coefficients.  ``fractions.Fraction``
is the rational type: it keeps numerator and denominator reduced with a
positive denominator after every operation and is immutable.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Union

Rational = Fraction
RationalLike = Union[int, Fraction, str]

__all__ = [
    "Rational",
    "as_rational",
    "beta_integral",
    "factorial",
    "format_rational",
    "parse_rational",
    "to_float",
]


def as_rational(value: RationalLike) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to a Fraction.

    Floats are rejected on purpose: binary floats carry representation error
    that would silently leak into exact results.
    """
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def parse_rational(text: str) -> Fraction:
    return Fraction(text.strip())


def format_rational(q: Fraction) -> str:
    """Serialize as "p/q" (integers keep the "/1" so the form is uniform)."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def to_float(q: Fraction) -> float:
    return float(q)


def factorial(n: int) -> int:
    if n < 0:
        raise ValueError("factorial of a negative integer")
    return math.factorial(n)


@lru_cache(maxsize=4096)
def beta_integral(a: int, b: int) -> Fraction:
    """Exact value of the integral of x**a * (1 - x)**b over [0, 1].

    Equals a! b! / (a + b + 1)!.
    """
    if a < 0 or b < 0:
        raise ValueError("beta_integral needs non-negative exponents")
    return Fraction(math.factorial(a) * math.factorial(b), math.factorial(a + b + 1))
