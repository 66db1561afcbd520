import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from gpysieve.exact import as_rational, beta_integral, factorial, format_rational, parse_rational


def test_beta_examples():
    assert beta_integral(0, 0) == 1
    assert beta_integral(2, 3) == Fraction(1, 60)
    num = integrate.quad(lambda x: x ** 5 * (1 - x) ** 7, 0, 1, epsabs=1e-16, epsrel=1e-14)[0]
    assert abs(float(beta_integral(5, 7)) - num) < 1e-12


def test_beta_rejects_negative():
    with pytest.raises(ValueError):
        beta_integral(-1, 2)


def test_factorial_examples():
    assert factorial(0) == 1
    assert factorial(5) == 120
    acc = 1
    for i in range(2, 23):
        acc *= i
    assert factorial(22) == acc == 1124000727777607680000
    with pytest.raises(ValueError):
        factorial(-1)


@given(st.integers(0, 50), st.integers(0, 50))
def test_beta_symmetric(a, b):
    assert beta_integral(a, b) == beta_integral(b, a)


@given(st.integers(0, 12), st.integers(0, 12))
def test_beta_matches_quadrature(a, b):
    num = integrate.quad(lambda x: x ** a * (1 - x) ** b, 0, 1, epsabs=1e-15, epsrel=1e-13)[0]
    assert abs(float(beta_integral(a, b)) - num) <= 1e-10


@given(st.fractions(), st.fractions())
def test_rational_arithmetic_exact(p, r):
    assert (p + r) - r == p
    q = p + r
    assert q.denominator > 0 and math.gcd(abs(q.numerator), q.denominator) == 1


def test_rational_io():
    assert format_rational(Fraction(121351, 59202)) == "121351/59202"
    assert format_rational(Fraction(3)) == "3/1"
    assert parse_rational(" 6/4 ") == Fraction(3, 2)
    assert as_rational("2/4") == Fraction(1, 2)
    with pytest.raises(TypeError):
        as_rational(0.5)
    with pytest.raises(TypeError):
        as_rational(True)
