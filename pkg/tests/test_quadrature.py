import numpy as np
import pytest

from gpysieve.exact import beta_integral
from gpysieve.poly import AffineBound
from gpysieve.quadrature import (
    DegenerateRegionError,
    IntegralEstimate,
    Region,
    _kronrod_rule,
    gauss_legendre,
    integrate,
)


@pytest.mark.parametrize("name, kdeg, gdeg", [("gk15", 22, 13), ("gk7", 10, 5)])
def test_kronrod_tables_exact_on_polynomials(name, kdeg, gdeg):
    nodes, wk, wg = _kronrod_rule(name)
    for p in range(kdeg + 1):
        assert abs(np.dot(wk, nodes ** p) - 1 / (p + 1)) < 1e-15
    for p in range(gdeg + 1):
        assert abs(np.dot(wg, nodes ** p) - 1 / (p + 1)) < 1e-15


def test_constant_on_unit_interval():
    est = integrate(lambda x: np.ones_like(x), Region.box((0, 1)), tol=1e-10)
    assert abs(est.value - 1) <= 1e-10 and est.converged


def test_triangle_xy():
    region = Region(((AffineBound.of(0), AffineBound.of(1)), (AffineBound.of(0, x=1), AffineBound.of(1))))
    est = integrate(lambda x, y: x * y, region, tol=1e-10)
    # integral_0^1 x (1 - x^2) / 2 dx
    assert abs(est.value - 1 / 8) <= 1e-10


def test_beta_oracle():
    est = integrate(lambda x: x ** 5 * (1 - x) ** 7, Region.box((0, 1)), tol=1e-13)
    assert abs(est.value - float(beta_integral(5, 7))) <= 1e-12


def test_split_regions_add_up():
    f = lambda x, y: np.exp(x - y) / (1 + x * y)  # noqa: E731
    whole = integrate(f, Region.box((0, 1), (0, 1)), tol=1e-9)
    left = integrate(f, Region.box((0, 0.3), (0, 1)), tol=1e-9)
    right = integrate(f, Region.box((0.3, 1), (0, 1)), tol=1e-9)
    both = left + right
    assert abs(both.value - whole.value) <= both.error_bound + whole.error_bound


def test_halving_tol_never_increases_error():
    region = Region(((AffineBound.of(0), AffineBound.of(1)), (AffineBound.of(0), AffineBound.of(1, x=-1)),
                     (AffineBound.of(0), AffineBound.of(1, x=-1, y=-1))))
    f = lambda x, y, z: 1.0 / (1.05 - x - y - z)  # noqa: E731
    tol = 1e-3
    prev = integrate(f, region, tol=tol).error_bound
    for _ in range(5):
        tol /= 2
        cur = integrate(f, region, tol=tol).error_bound
        assert cur <= prev
        prev = cur


def test_deterministic():
    f = lambda x, y: np.sin(7 * x * y)  # noqa: E731
    a = integrate(f, Region.box((0, 1), (0, 2)), tol=1e-9)
    b = integrate(f, Region.box((0, 1), (0, 2)), tol=1e-9)
    assert a == b


def test_budget_exhausted_is_flagged():
    est = integrate(lambda x: np.abs(x - 1 / 3) ** 0.5, Region.box((0, 1)), tol=1e-15, max_evals=2000)
    assert not est.converged
    assert est.error_bound > 0 and est.evaluations <= 2000


def test_degenerate_region():
    region = Region(((AffineBound.of(0), AffineBound.of(1)), (AffineBound.of(1), AffineBound.of(0, x=1))))
    with pytest.raises(DegenerateRegionError):
        integrate(lambda x, y: x + y, region)


def test_region_validation():
    with pytest.raises(ValueError):
        Region(((AffineBound.of(0, y=1), AffineBound.of(1)),))
    with pytest.raises(ValueError):
        integrate(lambda x: x, Region.box((0, 1)), tol=0)


@pytest.mark.parametrize("order", [3, 6, 10])
def test_gauss_legendre_exact_on_polynomials(order):
    deg = 2 * order - 1
    rng = np.random.default_rng(order)
    coeffs = rng.normal(size=(deg + 1, deg + 1))
    f = lambda x, y: np.polynomial.polynomial.polyval2d(x, y, coeffs)  # noqa: E731
    exact = sum(coeffs[i, j] / ((i + 1) * (j + 1)) for i in range(deg + 1) for j in range(deg + 1))
    est = gauss_legendre(f, Region.box((0, 1), (0, 1)), order=order)
    assert abs(est.value - exact) <= 1e-13 * max(1.0, abs(exact)) * 10
    assert est.method == "fixed-order"


def test_estimate_arithmetic():
    a = IntegralEstimate(1.0, 0.1, 10)
    b = IntegralEstimate(2.0, 0.2, 5, converged=False)
    c = a + b
    assert c.value == 3.0 and abs(c.error_bound - 0.3) < 1e-15 and c.evaluations == 15 and not c.converged
    assert IntegralEstimate.total([a, b]).value == 3.0
    assert a.lower == 0.9 and a.upper == 1.1
    with pytest.raises(ValueError):
        IntegralEstimate(1.0, -1.0, 0)
    assert set(a.to_json()) >= {"value", "error_bound", "evaluations"}
