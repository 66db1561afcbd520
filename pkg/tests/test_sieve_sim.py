import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gpysieve.poly import SievePolynomial
from gpysieve.sieve_sim import (
    ExactSum,
    SieveConfig,
    big_lambda_sq,
    big_lambda_sq_bruteforce,
    compare_with_asymptotics,
    empirical_sums,
    factor_range,
    lambda_d,
    mobius_table,
    naive_sums,
    pi_prime_factors,
    primes_upto,
    trial_factor,
)

P2 = SievePolynomial.monomial(2)
CUBIC = SievePolynomial.parse("1,60,-300,3500")


@pytest.fixture(scope="module")
def small_config():
    return SieveConfig(10 ** 4, 0.75, (0, 6), (2,), P2, 1920)


def test_lambda_d_examples():
    R = 100.0
    assert lambda_d(1, R, P2) == 1.0
    assert lambda_d(101, R, P2) == 0.0
    assert lambda_d(100, R, P2) == 0.0  # mu(100) = 0
    assert lambda_d(97, R, CUBIC) == -float(CUBIC(math.log(R / 97) / math.log(R)))
    assert lambda_d(6, R, SievePolynomial.parse("1")) == 1.0
    cfg = SieveConfig(10 ** 4, 1.0, (0,), P=SievePolynomial.parse("1,1"))
    assert cfg.R_int == 100
    assert lambda_d(cfg.R_int, cfg.R, cfg.P, mu=-1) == -1.0  # P(0) with mu = -1
    with pytest.raises(ValueError):
        lambda_d(0, R, P2)


def test_primes_and_mobius():
    assert list(primes_upto(30)) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert list(mobius_table(12)[1:]) == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]


def test_factor_range_matches_trial_division():
    facts = factor_range(1, 10 ** 4 + 1)
    assert all(f == trial_factor(m) for m, f in enumerate(facts, start=1))
    lo = 10 ** 6 - 37
    assert factor_range(lo, lo + 200) == [trial_factor(m) for m in range(lo, lo + 200)]


def test_big_lambda_sq_simple_cases(small_config):
    cfg = small_config
    lam = cfg.lambdas
    # n + h all free of primes <= R: only d = 1 contributes
    for n in range(cfg.N, 2 * cfg.N):
        if not pi_prime_factors(n, cfg.offsets, cfg.R_int):
            assert big_lambda_sq(n, cfg) == lam[1] ** 2
            break
    else:
        pytest.fail("no rough n found")
    for n in range(cfg.N, 2 * cfg.N):
        ps = pi_prime_factors(n, cfg.offsets, cfg.R_int)
        if len(ps) == 1:
            assert big_lambda_sq(n, cfg) == (lam[1] + lam[ps[0]]) ** 2
            break


def test_big_lambda_sq_random_agreement():
    rng = random.Random(11)
    cfg = SieveConfig(10 ** 5, 0.8, (0, 2), (6,), CUBIC, 50)
    for _ in range(100):
        n = rng.randint(1, 10 ** 6)
        a, b = big_lambda_sq(n, cfg), big_lambda_sq_bruteforce(n, cfg)
        assert a == b >= 0.0


def test_empirical_equals_naive(small_config):
    fast = empirical_sums(small_config, segment=1000)
    slow = naive_sums(small_config)
    assert fast == slow
    assert empirical_sums(small_config) == fast  # segment size is irrelevant
    assert fast.Q2 > 0 and fast.count == small_config.N + 1


def test_empirical_equals_naive_general_poly():
    cfg = SieveConfig(3000, 0.9, (0, 2, 6), (8,), CUBIC, 3)
    assert empirical_sums(cfg, segment=257) == naive_sums(cfg)


def test_single_offset_ratio_in_unit_interval():
    cfg = SieveConfig(20000, 0.75, (0,))
    sums = empirical_sums(cfg)
    assert 0 <= sums.Q1[0] <= sums.Q2
    assert sums.s_lower == sums.Q1[0] - sums.Q2


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False), min_size=1, max_size=60),
       st.randoms())
def test_exact_sum_order_independent(values, rnd):
    a, b = ExactSum(), ExactSum()
    a.add(values)
    shuffled = list(values)
    rnd.shuffle(shuffled)
    half = len(shuffled) // 2
    b.add(shuffled[:half])
    c = ExactSum()
    c.add(shuffled[half:])
    b.merge(c)
    assert a.exact == b.exact == sum(Fraction(v) for v in values)
    assert a.value == math.fsum(values)


def test_exact_sum_rejects_nonfinite():
    with pytest.raises(FloatingPointError):
        ExactSum().add([1.0, np.inf])


def test_config_validation():
    with pytest.raises(ValueError, match="admissible"):
        SieveConfig(10 ** 4, 0.75, (0, 4), (2,))
    with pytest.raises(ValueError, match="distinct"):
        SieveConfig(10 ** 4, 0.75, (0, 2), (2,))
    with pytest.raises(ValueError):
        SieveConfig(10 ** 4, 0.75, ())
    with pytest.raises(ValueError):
        SieveConfig(4, 0.1, (0,))  # R below 2
    cfg = SieveConfig(10 ** 4, 0.75, [0, 6], [2])
    assert cfg.offsets == (0, 6, 2) and cfg.k == 3


def test_compare_with_asymptotics(small_config):
    out = compare_with_asymptotics(small_config)
    assert math.isfinite(out["ratio_q1"]) and out["ratio_q1"] > 0
    assert out["predicted_q1"] > 0 and out["predicted_q3"] > 0
    general = compare_with_asymptotics(SieveConfig(3000, 0.9, (0, 2, 6), (8,), CUBIC, 3))
    assert math.isfinite(general["predicted_q1"]) and general["predicted_q3"] > 0
