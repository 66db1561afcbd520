from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from gpysieve.poly import (
    AffineBound,
    MultiPoly,
    SievePolynomial,
    antiderivative,
    compose_shift,
    integrate_t,
    signed_sum_square,
)

small_fracs = st.fractions(min_value=-20, max_value=20, max_denominator=12)
polys = st.lists(small_fracs, min_size=0, max_size=9).map(lambda c: SievePolynomial(tuple(c)))
unit = st.fractions(min_value=0, max_value=1, max_denominator=30)


def test_polynomial_parse_and_print(ref_poly):
    assert str(ref_poly) == "1 + 60t - 300t^2 + 3500t^3"
    assert ref_poly.degree == 3
    assert SievePolynomial.parse("0,0").is_zero()
    assert SievePolynomial.parse("0").degree == -1
    assert SievePolynomial.from_json(ref_poly.to_json()) == ref_poly
    assert ref_poly.to_json() == ["1/1", "60/1", "-300/1", "3500/1"]


def test_antiderivative_examples(ref_poly):
    assert antiderivative(SievePolynomial.parse("1")) == SievePolynomial.parse("0,1")
    assert antiderivative(ref_poly) == SievePolynomial.parse("0,1,30,-100,875")
    for l in range(6):
        assert antiderivative(SievePolynomial.monomial(l)) == SievePolynomial.monomial(l + 1, Fraction(1, l + 1))


@given(polys)
def test_antiderivative_inverts_derivative(P):
    A = P.antiderivative()
    assert A.derivative() == P
    assert A(0) == 0


def test_reflect(ref_poly):
    for x in (Fraction(0), Fraction(1, 3), Fraction(2)):
        assert ref_poly.reflect()(x) == ref_poly(1 - x)


def test_compose_shift_examples(ref_poly):
    t_poly = SievePolynomial.parse("0,1")
    assert compose_shift(t_poly, AffineBound.of(1)) == MultiPoly({(0, 0, 0, 0): 1, (1, 0, 0, 0): -1})
    sq = compose_shift(SievePolynomial.monomial(2), AffineBound.of(1, x=-1))
    expected = MultiPoly({(0, 0, 0, 0): 1, (1, 0, 0, 0): -2, (0, 1, 0, 0): -2,
                          (2, 0, 0, 0): 1, (1, 1, 0, 0): 2, (0, 2, 0, 0): 1})
    assert sq == expected
    e = Fraction(1, 8)
    g = compose_shift(ref_poly, AffineBound.of(1, -1, -1, -1))
    assert g.evaluate(t=Fraction(1, 2), x=e, y=e, z=e) == ref_poly(e)


def test_signed_sum_square_examples(ref_poly):
    x_poly = SievePolynomial.parse("0,1")
    one = [(1, AffineBound.of(0))]
    assert signed_sum_square(x_poly, one) == compose_shift(x_poly, AffineBound.of(1)) ** 2
    diff = [(1, AffineBound.of(0)), (-1, AffineBound.of(0, x=1))]
    assert signed_sum_square(x_poly, diff) == MultiPoly({(0, 2, 0, 0): 1})
    Pt = ref_poly.antiderivative()
    val = signed_sum_square(Pt, diff).evaluate(t=Fraction(1, 3), x=Fraction(1, 4))
    assert val == (Pt(Fraction(2, 3)) - Pt(Fraction(5, 12))) ** 2
    with pytest.raises(ValueError):
        signed_sum_square(Pt, [(2, AffineBound.of(0))])


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_signed_sum_square_nonnegative(seed):
    rng = np.random.default_rng(seed)
    Pt = SievePolynomial(tuple(Fraction(int(c)) for c in rng.integers(-50, 50, 4))).antiderivative()
    shifts = [(1, AffineBound.of(0)), (-1, AffineBound.of(0, x=1)), (-1, AffineBound.of(0, y=1)),
              (1, AffineBound.of(0, x=1, y=1))]
    sq = signed_sum_square(Pt, shifts)
    for _ in range(10):
        t, x, y = (Fraction(int(v), 97) for v in rng.integers(-97, 97, 3))
        assert sq.evaluate(t=t, x=x, y=y) >= 0


def test_integrate_t_examples():
    t = MultiPoly.variable("t")
    assert integrate_t(t, AffineBound.of(0), AffineBound.of(1)) == MultiPoly.constant(Fraction(1, 2))
    g = integrate_t(t, AffineBound.of(0), AffineBound.of(1, x=-1))
    one_minus_x = MultiPoly.constant(1) - MultiPoly.variable("x")
    assert g == (one_minus_x ** 2).scale(Fraction(1, 2))
    f = compose_shift(SievePolynomial.monomial(2), AffineBound.of(1, x=-1)) * t
    val = integrate_t(f, AffineBound.of(0), AffineBound.of(1, x=-1)).evaluate(x=Fraction(1, 2))
    num = integrate.quad(lambda s: (1 - s - 0.5) ** 2 * s, 0, 0.5, epsabs=1e-15)[0]
    assert abs(float(val) - num) < 1e-10


@settings(max_examples=25, deadline=None)
@given(unit, unit, unit, st.fractions(0, 1, max_denominator=10), st.fractions(0, 1, max_denominator=10))
def test_integrate_t_additive(c0, c1, c2, x, y):
    a, b, c = sorted([c0, c1, c2])
    f = compose_shift(SievePolynomial.parse("1,2,-3"), AffineBound.of(1, x=-1)) * MultiPoly.variable("t") ** 3
    A = AffineBound.of(a, x=Fraction(1, 5))
    Bb = AffineBound.of(b, x=Fraction(1, 5), y=Fraction(1, 7))
    C = AffineBound.of(c, x=Fraction(1, 5), y=Fraction(1, 7), z=0)
    lhs = integrate_t(f, A, C).evaluate(x=x, y=y)
    rhs = integrate_t(f, A, Bb).evaluate(x=x, y=y) + integrate_t(f, Bb, C).evaluate(x=x, y=y)
    assert lhs == rhs


def test_multipoly_simplex_roundtrip():
    xs = MultiPoly.variable("x") + MultiPoly.variable("y")
    g = (MultiPoly.constant(1) - xs) ** 3 * MultiPoly.variable("x")
    rewritten = g.substitute("x", MultiPoly.variable("x"))  # identity substitution
    assert rewritten == g
    bound = AffineBound.of(1, x=-1, y=-1).to_simplex("xy")
    assert bound.as_multipoly() == MultiPoly.variable("w")
    assert bound.as_multipoly().from_simplex("xy") == MultiPoly.constant(1) - xs


def test_multipoly_json_and_compile():
    g = MultiPoly({(1, 2, 0, 0): Fraction(3, 2), (0, 0, 1, 1): -2})
    assert MultiPoly.from_json(g.to_json()) == g
    cp = g.compile()
    val = cp(t=0.5, x=np.array([0.25, 1.0]), y=2.0, z=3.0)
    assert np.allclose(val, [1.5 * 0.5 * 0.0625 - 12.0, 1.5 * 0.5 - 12.0])
    assert g.monomial_content() == (0, 0, 0, 0, 0)
    h = MultiPoly({(0, 2, 1, 0): 1, (0, 3, 2, 0): 1})
    assert h.monomial_content() == (0, 2, 1, 0, 0)
