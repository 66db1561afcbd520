"""One-dimensional sieve moments, computed exactly.

The moments are

* ``I0 = integral_0^1 P(1-t)^2 t^(k-1) dt``
* ``J1 = integral_0^1 Ptilde(1-t)^2 t^(k-2) dt`` with ``Ptilde`` the
  antiderivative of P
* ``F(y)``, the integrand of the almost-prime correction term, and its
  closed-form upper bound for monomial weights ``P(x) = x**l``.

All of them reduce to Beta moments after expanding the squared polynomial
in powers of ``(1 - t)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from scipy import integrate as sp_integrate

from .exact import RationalLike, as_rational, beta_integral
from .poly import SievePolynomial

__all__ = [
    "GpyContext",
    "f_of_y",
    "f_of_y_bound",
    "i0",
    "i_delta_bound",
    "i_delta_numeric",
    "j1",
    "q1_coefficient",
    "q1_coefficient_exact",
    "reflected_moment",
]


@dataclass(frozen=True)
class GpyContext:
    """Weight polynomial P and tuple size k.

    ``l`` records the exponent when ``P(x) = x**l``; it is None for a
    general polynomial.
    """

    P: SievePolynomial
    k: int
    l: int | None = None

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be positive")

    @classmethod
    def monomial(cls, k: int, l: int) -> "GpyContext":
        return cls(SievePolynomial.monomial(l), k, l)

    @property
    def Ptilde(self) -> SievePolynomial:
        return self.P.antiderivative()


def reflected_moment(poly: SievePolynomial, power: int) -> Fraction:
    """``integral_0^1 poly(1-t) t**power dt``, term by term through Beta moments."""
    # poly(1-t) = sum c_i (1-t)^i
    return sum((c * beta_integral(power, i) for i, c in enumerate(poly.coeffs)), Fraction(0))


@lru_cache(maxsize=256)
def _i0(P: SievePolynomial, k: int) -> Fraction:
    return reflected_moment(P * P, k - 1)


@lru_cache(maxsize=256)
def _j1(P: SievePolynomial, k: int) -> Fraction:
    Pt = P.antiderivative()
    return reflected_moment(Pt * Pt, k - 2)


def i0(ctx: GpyContext) -> Fraction:
    return _i0(ctx.P, ctx.k)


def j1(ctx: GpyContext) -> Fraction:
    if ctx.k < 2:
        raise ValueError("J1 needs k >= 2")
    return _j1(ctx.P, ctx.k)


def _shifted_moment(a: SievePolynomial, b: SievePolynomial, y: Fraction, power: int) -> Fraction:
    """``integral_0^{1-y} a(1-t) b(1-t-y) t**power dt`` exactly.

    With ``t = (1-y) s`` both factors become polynomials in ``(1-s)``.
    """
    h = 1 - y
    if h == 0:
        return Fraction(0)
    # a(1-t) = a(y + h(1-s)), b(1-t-y) = b(h(1-s)); expand in powers of (1-s).
    lin_a = SievePolynomial((y, h))
    lin_b = SievePolynomial((Fraction(0), h))
    comp_a = SievePolynomial()
    for c in reversed(a.coeffs):
        comp_a = comp_a * lin_a + SievePolynomial((c,))
    comp_b = SievePolynomial()
    for c in reversed(b.coeffs):
        comp_b = comp_b * lin_b + SievePolynomial((c,))
    return h ** (power + 1) * reflected_moment(comp_a * comp_b, power)


def f_of_y(ctx: GpyContext, y: RationalLike) -> Fraction:
    """Exact F(y) for ``0 <= y <= 1``.

    ``F(y) = int_{1-y}^1 P(1-t)^2 t^(k-1) dt
             + int_0^{1-y} (P(1-t) - P(1-t-y))^2 t^(k-1) dt``,
    expanded as ``I0 + A(y) - 2 C(y)`` with
    ``A = int_0^{1-y} P(1-t-y)^2 t^(k-1)`` and
    ``C = int_0^{1-y} P(1-t) P(1-t-y) t^(k-1)``.
    """
    y = as_rational(y)
    if not 0 <= y <= 1:
        raise ValueError("y must lie in [0, 1]")
    P = ctx.P
    p = ctx.k - 1
    total = i0(ctx)
    total += _shifted_moment(SievePolynomial((Fraction(1),)), P * P, y, p)
    total -= 2 * _shifted_moment(P, P, y, p)
    return total


def f_of_y_bound(k: int, l: int, y: RationalLike) -> Fraction:
    """``(k-1)! (2l)! / (k+2l)! * (1 - (1-y)^(k+2l))``, the upper bound on F for ``P = x**l``."""
    y = as_rational(y)
    lead = Fraction(math.factorial(k - 1) * math.factorial(2 * l), math.factorial(k + 2 * l))
    return lead * (1 - (1 - y) ** (k + 2 * l))


def i_delta_bound(k: int, l: int, delta: RationalLike) -> Fraction:
    """Closed-form bound ``(k-1)! (2l)! delta (k+2l) / (k+2l)!`` on ``int_0^delta F(y)/y dy``."""
    delta = as_rational(delta)
    if k < 1 or l < 0:
        raise ValueError("need k >= 1 and l >= 0")
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    return Fraction(math.factorial(k - 1) * math.factorial(2 * l), math.factorial(k + 2 * l)) * delta * (k + 2 * l)


def _f_float(ctx: GpyContext, y: float) -> float:
    # Direct 1-D quadrature of both summands of F; independent of the Beta expansion.
    P = ctx.P
    p = ctx.k - 1
    first = sp_integrate.quad(lambda t: P(1.0 - t) ** 2 * t ** p, 1.0 - y, 1.0, epsabs=1e-15, epsrel=1e-13)[0]
    second = sp_integrate.quad(lambda t: (P(1.0 - t) - P(1.0 - t - y)) ** 2 * t ** p, 0.0, 1.0 - y,
                               epsabs=1e-15, epsrel=1e-13)[0]
    return first + second


def i_delta_numeric(ctx: GpyContext, delta: float) -> float:
    """``int_0^delta F(y)/y dy`` by nested adaptive quadrature."""
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    return sp_integrate.quad(lambda y: _f_float(ctx, y) / y, 0.0, delta, epsabs=1e-14, epsrel=1e-11, limit=200)[0]


def q1_coefficient(theta: float, k1: int, k: int, l: int) -> float:
    """Normalized main term of the prime sum: ``theta (2l+1) k1 / ((l+1)(k+2l+1))``."""
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")
    if not 1 <= k1 <= k:
        raise ValueError("need 1 <= k1 <= k")
    return theta * (2 * l + 1) * k1 / ((l + 1) * (k + 2 * l + 1))


def q1_coefficient_exact(theta: RationalLike, k1: int, k: int, l: int) -> Fraction:
    """The same coefficient rebuilt from the exact moments of ``P = x**l``.

    Each prime sum carries ``(log R)^(k+1) / ((k-2)! log N) * J1`` and the
    normalising sum ``(log R)^k / (k-1)! * I0``.  With
    ``log R / log N = theta / 2`` the ratio of ``k1`` prime sums to the
    normalising sum is ``k1 theta (k-1) J1 / (2 I0)``.
    """
    theta = as_rational(theta)
    ctx = GpyContext.monomial(k, l)
    return theta * (k - 1) * j1(ctx) / (2 * i0(ctx)) * k1


def numeric_moment(fn, power: int) -> float:
    """Reference ``int_0^1 fn(1-t) t**power dt`` by adaptive quadrature."""
    return sp_integrate.quad(lambda t: fn(1.0 - t) * t ** power, 0.0, 1.0, epsabs=1e-15, epsrel=1e-13, limit=200)[0]

