"""Headline acceptance checks, one test (and one summary line) per criterion."""
import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate as sp_integrate

from gpysieve.bounds import (
    Theorem1Params,
    check_r_condition,
    evaluate_margin,
    r_exact_threshold,
    s_margin_thm1,
    s_margin_thm2,
    theorem1_r,
)
from gpysieve.exact import beta_integral
from gpysieve.gpy import GpyContext, f_of_y, f_of_y_bound, i0, j1
from gpysieve.jintegrals import catalogue, inner_numeric, inner_polynomial, j_total
from gpysieve.poly import SievePolynomial
from gpysieve.quadrature import Region, integrate
from gpysieve.sieve_sim import SieveConfig, big_lambda_sq, big_lambda_sq_bruteforce
from gpysieve.tuples import KTuple, brute_force_min_diameter, is_admissible, min_diameter_tuple

REFERENCE_TUPLE = "0,6,8,14,18,20,24,30,36,38,44,48,50,56,60,66,74,78,80,84,86,90"


def _record(log, number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    log.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def j_values(ref_ctx):
    out = {}
    for r in (2, 3, 4):
        start = time.perf_counter()
        est = j_total(r, ref_ctx, eps=1e-4, tol=1e-5)
        out[r] = (est, time.perf_counter() - start)
    return out


def test_criterion_1_exact_moments(ref_ctx, acceptance_log):
    start = time.perf_counter()
    a = i0(GpyContext(ref_ctx.P, 22))
    b = j1(GpyContext(ref_ctx.P, 22))
    elapsed = time.perf_counter() - start
    ok = a == Fraction(121351, 59202) and b == Fraction(228380, 18027009) and elapsed < 1.0
    _record(acceptance_log, 1, ok, f"I0={a} J1={b} ({elapsed:.3f}s)")


def test_criterion_2_numeric_bounds(j_values, acceptance_log):
    limits = {2: (0.041, 10.0), 3: (0.048, 120.0), 4: (0.028, 1800.0)}
    parts = []
    ok = True
    for r, (est, secs) in j_values.items():
        bound, budget = limits[r]
        good = est.lower >= bound and est.error_bound <= 1e-4 and est.converged and secs < budget
        ok &= good
        parts.append(f"J{r}={est.value:.6f}+/-{est.error_bound:.1e} ({secs:.1f}s)")
    _record(acceptance_log, 2, ok, "; ".join(parts))


def test_criterion_3_assembly(ref_ctx, j_values, acceptance_log):
    I0, J1 = i0(ref_ctx), j1(ref_ctx)
    lows = [j_values[r][0].lower for r in (2, 3, 4)]
    margin = s_margin_thm2(22, I0, J1, *lows)
    _record(acceptance_log, 3, margin > 0.013, f"margin with J lower bounds = {margin:.6f}")


def test_criterion_4_theorem1_grid(acceptance_log):
    start = time.perf_counter()
    worst = math.inf
    ok = True
    for i in range(51, 99):
        theta = Fraction(i, 100)
        for k2 in range(1, 11):
            ok &= r_exact_threshold(theta, k2) < 240 * k2 ** 2 / float(2 * theta - 1) ** 3
            params = Theorem1Params.choose(theta, k2)
            assert params.r == theorem1_r(theta, k2)
            m = s_margin_thm1(params)
            worst = min(worst, m)
            ok &= m > 0
            ok &= check_r_condition(theta, params.r)
    elapsed = time.perf_counter() - start
    _record(acceptance_log, 4, ok and elapsed < 1.0, f"480 grid points, min margin {worst:.3e} ({elapsed:.2f}s)")


def test_criterion_5_tuples(acceptance_log):
    t = KTuple.parse(REFERENCE_TUPLE)
    cert = is_admissible(t)
    ok = cert.admissible and cert.verify(t)
    expected = {2: 2, 3: 6, 4: 8, 5: 12, 6: 16}
    for k, diam in expected.items():
        res = min_diameter_tuple(k, 20)
        oracle = brute_force_min_diameter(k, 20)
        ok &= res.exhaustive and res.diameter == diam == oracle[0] and res.tuple == oracle[1]
    start = time.perf_counter()
    big = min_diameter_tuple(22, 90)
    elapsed = time.perf_counter() - start
    ok &= big.diameter <= 90 and is_admissible(big.tuple).admissible and elapsed < 60
    _record(acceptance_log, 5, ok, f"reference 22-tuple admissible; k<=6 match oracle; k=22 diameter {big.diameter} ({elapsed:.2f}s)")


def test_criterion_6_oracle_equivalence(ref_ctx, acceptance_log):
    rng = random.Random(6)
    worst_beta = 0.0
    for _ in range(20):
        a, b = rng.randint(0, 12), rng.randint(0, 12)
        num = sp_integrate.quad(lambda x: x ** a * (1 - x) ** b, 0, 1, epsabs=1e-15, epsrel=1e-13)[0]
        worst_beta = max(worst_beta, abs(float(beta_integral(a, b)) - num))

    gen = np.random.default_rng(6)
    worst_inner = 0.0
    for r in (2, 3, 4):
        for spec in catalogue(r):
            u = gen.uniform(0.01, 0.99, size=(20, spec.region.dimension))
            pts, _ = spec.region.map_unit(u)
            cols = [pts[:, i] for i in range(pts.shape[1])]
            kw = dict(zip("xyz", cols))
            sym = inner_polynomial(spec, ref_ctx).compile()(w=spec.w_value(**kw), **kw)
            num = inner_numeric(spec, ref_ctx, *cols)
            worst_inner = max(worst_inner, float(np.max(np.abs(sym - num))))

    config = SieveConfig(10 ** 4, 0.75, (0, 6), (2,), SievePolynomial.monomial(2), 1920)
    mismatches = sum(big_lambda_sq(n, config) != big_lambda_sq_bruteforce(n, config) for n in range(1, 10 ** 4 + 1))
    ok = worst_beta <= 1e-10 and worst_inner <= 1e-9 and mismatches == 0
    _record(acceptance_log, 6, ok,
            f"beta max err {worst_beta:.1e}; inner max err {worst_inner:.1e}; Lambda^2 mismatches {mismatches}")


def test_criterion_7_property_suites(ref_ctx, acceptance_log):
    notes = []
    # F(y) inequality, exact, 50 grid points
    k, l = 22, 2
    ctx = GpyContext.monomial(k, l)
    ok_f = all(f_of_y(ctx, Fraction(i, 49)) <= f_of_y_bound(k, l, Fraction(i, 49)) for i in range(50))
    notes.append(f"F-grid {'ok' if ok_f else 'BAD'}")

    # J monotone non-increasing in eps within error bounds (J2 and J3 at three cutoffs)
    ok_eps = True
    for r in (2, 3):
        ests = [j_total(r, ref_ctx, eps=e, tol=1e-6) for e in (1e-2, 1e-3, 1e-4)]
        for big_eps, small_eps in zip(ests, ests[1:]):
            ok_eps &= big_eps.value <= small_eps.value + big_eps.error_bound + small_eps.error_bound
    notes.append(f"eps-monotone {'ok' if ok_eps else 'BAD'}")

    # homogeneity margin(cP) = c^2 margin(P), tolerance scaled with c^2
    base = evaluate_margin(ref_ctx.P, 22, eps=1e-3, tol=1e-4)
    ok_h = True
    for c in (2, 3):
        ev = evaluate_margin(ref_ctx.P.scale(c), 22, eps=1e-3, tol=1e-4 * c * c)
        ok_h &= ev.i0 == c * c * base.i0 and ev.j1 == c * c * base.j1
        ok_h &= math.isclose(ev.margin, c * c * base.margin, rel_tol=1e-12)
    notes.append(f"homogeneity {'ok' if ok_h else 'BAD'}")

    # admissibility translation invariance
    rng = random.Random(7)
    ok_t = True
    for _ in range(200):
        offs = rng.sample(range(0, 60), rng.randint(1, 8))
        t = KTuple.of(offs)
        shift = rng.randint(-1000, 1000)
        ok_t &= is_admissible(t).admissible == is_admissible(t.shift(shift)).admissible
    notes.append(f"translation {'ok' if ok_t else 'BAD'}")

    # tolerance monotonicity of the adaptive integrator
    region = Region.box((0.0, 1.0), (0.0, 1.0))
    f = lambda x, y: np.exp(-x * y) / (1.1 - x)  # noqa: E731
    errs = [integrate(f, region, tol=tol).error_bound for tol in (1e-4, 5e-5, 2.5e-5, 1.25e-5)]
    ok_q = all(b <= a for a, b in zip(errs, errs[1:]))
    notes.append(f"tol-monotone {'ok' if ok_q else 'BAD'}")

    _record(acceptance_log, 7, ok_f and ok_eps and ok_h and ok_t and ok_q, "; ".join(notes))


def test_criterion_8_declared_limits(acceptance_log):
    # Nothing to compute: the infinitude statements and the analytic error
    # terms are out of reach numerically, and the sieve simulator's
    # asymptotic comparison is diagnostic only (its exact internal checks
    # are part of criterion 6).
    _record(acceptance_log, 8, True, "declared not reproducible: infinitude claims, o(1)/O(eps) terms; sim ratios diagnostic")
