"""Desk-scale sieve sums over ``N <= n <= 2N``.

The weights are ``lambda_d = mu(d) P(log(R/d) / log R)`` for squarefree
``d <= R`` with ``R = N**(theta/2)``.  This is a stand-in for the weights
behind the quoted asymptotics, so the empirical ratios are illustrative
only: the lower-order terms are large at this scale.

Sums are accumulated exactly (see :class:`ExactSum`) and rounded once, so
two implementations that produce the same per-n floats agree bit for bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .gpy import GpyContext, i0 as gpy_i0, i_delta_numeric, j1 as gpy_j1
from .poly import SievePolynomial
from .tuples import KTuple, is_admissible

__all__ = [
    "ExactSum",
    "SieveConfig",
    "SieveSums",
    "big_lambda_sq",
    "big_lambda_sq_bruteforce",
    "compare_with_asymptotics",
    "empirical_sums",
    "factor_range",
    "lambda_d",
    "mobius_table",
    "naive_sums",
    "pi_prime_factors",
    "primes_upto",
    "trial_factor",
]


def primes_upto(n: int) -> np.ndarray:
    """Primes ``<= n`` by the sieve of Eratosthenes."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            flags[p * p::p] = False
    return np.flatnonzero(flags).astype(np.int64)


def mobius_table(n: int) -> np.ndarray:
    """``mu(d)`` for ``0 <= d <= n`` (entry 0 unused)."""
    mu = np.ones(n + 1, dtype=np.int64)
    mu[0] = 0
    for p in primes_upto(n):
        p = int(p)
        mu[p::p] *= -1
        mu[p * p::p * p] = 0
    return mu


def trial_factor(m: int) -> Dict[int, int]:
    """Prime factorization of ``m >= 1`` by trial division."""
    if m < 1:
        raise ValueError("m must be positive")
    out: Dict[int, int] = {}
    p = 2
    while p * p <= m:
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
        p += 1 if p == 2 else 2
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def factor_range(lo: int, hi: int) -> List[Dict[int, int]]:
    """Factorizations of every ``m`` in ``[lo, hi)`` by a segmented sieve, ``lo >= 1``."""
    if lo < 1 or hi < lo:
        raise ValueError("need 1 <= lo <= hi")
    rest = np.arange(lo, hi, dtype=np.int64)
    facts: List[Dict[int, int]] = [dict() for _ in range(hi - lo)]
    for p in primes_upto(math.isqrt(max(hi - 1, 1))):
        p = int(p)
        first = (-lo) % p
        for i in range(first, hi - lo, p):
            e = 0
            while rest[i] % p == 0:
                rest[i] //= p
                e += 1
            facts[i][p] = e
    for i, r in enumerate(rest):
        if r > 1:
            facts[i][int(r)] = 1
    return facts


class ExactSum:
    """Exact accumulator for float arrays, rounded once on read.

    Each double is split as ``mantissa * 2**exp`` with an integer mantissa;
    mantissas are summed per exponent in two 26-bit halves so int64 never
    overflows, then combined as Python integers.
    """

    _SHIFT = 1200

    def __init__(self) -> None:
        self._total = 0

    def add(self, values) -> None:
        arr = np.asarray(values, dtype=np.float64).ravel()
        if arr.size == 0:
            return
        if not np.all(np.isfinite(arr)):
            raise FloatingPointError("non-finite value in sum")
        m, e = np.frexp(arr)
        mant = np.ldexp(m, 53).astype(np.int64)
        hi = mant >> 26
        lo = mant & ((1 << 26) - 1)
        for exp in np.unique(e):
            sel = e == exp
            part = (int(hi[sel].sum()) << 26) + int(lo[sel].sum())
            self._total += part << (int(exp) - 53 + self._SHIFT)

    def merge(self, other: "ExactSum") -> None:
        self._total += other._total

    @property
    def exact(self) -> Fraction:
        return Fraction(self._total, 1 << self._SHIFT)

    @property
    def value(self) -> float:
        return float(self.exact)


@dataclass(frozen=True)
class SieveConfig:
    """Range start N, level theta, the two offset sets, weight P and threshold r."""

    N: int
    theta: float
    tuple1: Tuple[int, ...]
    tuple2: Tuple[int, ...] = ()
    P: SievePolynomial = SievePolynomial.parse("1")
    r: int = 1

    def __post_init__(self) -> None:
        t1 = tuple(int(h) for h in self.tuple1)
        t2 = tuple(int(h) for h in self.tuple2)
        object.__setattr__(self, "tuple1", t1)
        object.__setattr__(self, "tuple2", t2)
        if self.N < 2:
            raise ValueError("N must be at least 2")
        if not 0 < self.theta < 2:
            raise ValueError("theta must lie in (0, 2)")
        if not t1:
            raise ValueError("tuple1 must be non-empty")
        union = t1 + t2
        if len(set(union)) != len(union):
            raise ValueError("offsets of tuple1 and tuple2 must be distinct")
        if min(union) < 0:
            raise ValueError("offsets must be non-negative")
        cert = is_admissible(KTuple.of(union))
        if not cert.admissible:
            raise ValueError(f"offsets are not admissible (p={cert.prime})")
        if self.r < 1:
            raise ValueError("r must be positive")
        if self.R > self.N:
            raise ValueError("R must not exceed N")
        if self.R_int < 2:
            raise ValueError("R must be at least 2")

    @property
    def R(self) -> float:
        return float(self.N) ** (self.theta / 2)

    @cached_property
    def R_int(self) -> int:
        """``floor(R)``, corrected for rounding in the power."""
        d = int(math.floor(self.R))
        while (d + 1) <= self.R:
            d += 1
        while d > self.R:
            d -= 1
        return d

    @property
    def offsets(self) -> Tuple[int, ...]:
        return self.tuple1 + self.tuple2

    @property
    def k(self) -> int:
        return len(self.offsets)

    @property
    def small_prime_limit(self) -> float:
        """``(2N)**(1/(r+1))``."""
        return float(2 * self.N) ** (1.0 / (self.r + 1))

    @cached_property
    def lambdas(self) -> np.ndarray:
        """``lambda_d`` for ``0 <= d <= floor(R)`` (entry 0 unused)."""
        mu = mobius_table(self.R_int)
        out = np.zeros(self.R_int + 1)
        for d in range(1, self.R_int + 1):
            if mu[d]:
                out[d] = lambda_d(d, self.R, self.P, int(mu[d]))
        return out

    def to_json(self) -> dict:
        return {"N": self.N, "theta": self.theta, "R": self.R, "tuple1": list(self.tuple1),
                "tuple2": list(self.tuple2), "P": [str(c) for c in self.P.coeffs], "r": self.r}


def _mobius(d: int) -> int:
    f = trial_factor(d)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def lambda_d(d: int, R: float, P: SievePolynomial, mu: int | None = None) -> float:
    """``mu(d) P(log(R/d) / log R)`` for ``d <= R``, else 0."""
    if d < 1:
        raise ValueError("d must be positive")
    if R <= 1:
        raise ValueError("R must exceed 1")
    if d > R:
        return 0.0
    if mu is None:
        mu = _mobius(d)
    if mu == 0:
        return 0.0
    return mu * float(P(math.log(R / d) / math.log(R)))


def pi_prime_factors(n: int, offsets: Sequence[int], bound: int | None = None) -> List[int]:
    """Distinct primes dividing ``prod(n + h)``, optionally only those ``<= bound``."""
    primes = set()
    for h in offsets:
        primes.update(trial_factor(n + h))
    return sorted(p for p in primes if bound is None or p <= bound)


def _squarefree_divisors(primes: Sequence[int], bound: int) -> List[int]:
    out = [1]
    for p in primes:
        out += [d * p for d in out if d * p <= bound]
    return sorted(out)


def big_lambda_sq(n: int, config: SieveConfig) -> float:
    """``(sum of lambda_d over squarefree d | Pi(n), d <= R)**2``.

    Divisors come from the prime factors of each ``n + h``; they are summed
    in increasing order.
    """
    primes = pi_prime_factors(n, config.offsets, config.R_int)
    lam = config.lambdas
    acc = 0.0
    for d in _squarefree_divisors(primes, config.R_int):
        acc += lam[d]
    return acc * acc


def big_lambda_sq_bruteforce(n: int, config: SieveConfig) -> float:
    """Same quantity by testing every ``d <= R`` against the full product ``Pi(n)``."""
    prod = 1
    for h in config.offsets:
        prod *= n + h
    lam = config.lambdas
    acc = 0.0
    for d in range(1, config.R_int + 1):
        if lam[d] != 0.0 and prod % d == 0:
            acc += lam[d]
    return acc * acc


@dataclass(frozen=True)
class SieveSums:
    Q1: Dict[int, float]
    Q2: float
    Q3: Dict[int, float]
    count: int

    @property
    def s_lower(self) -> float:
        """``sum Q1 - Q2 - sum Q3``, the lower bound for the weighted count."""
        return math.fsum(self.Q1.values()) - self.Q2 - math.fsum(self.Q3.values())

    def to_json(self) -> dict:
        return {"Q1": {str(h): v for h, v in self.Q1.items()}, "Q2": self.Q2,
                "Q3": {str(h): v for h, v in self.Q3.items()}, "count": self.count,
                "S_lower": self.s_lower}


def _segment_primality(lo: int, hi: int, base: np.ndarray) -> np.ndarray:
    """Boolean primality flags for ``[lo, hi)`` given all primes up to ``sqrt(hi)``."""
    flags = np.ones(hi - lo, dtype=bool)
    for p in base:
        p = int(p)
        if p * p >= hi:
            break
        start = max(p * p, ((lo + p - 1) // p) * p)
        flags[start - lo::p] = False
    if lo <= 1:
        flags[: 2 - lo] = False
    return flags


def empirical_sums(config: SieveConfig, segment: int = 1 << 18) -> SieveSums:
    """Q1 for each offset in tuple1, Q2, and Q3 for each offset in tuple2.

    The range ``[N, 2N]`` is processed in segments.  In each one, a divisor
    ``d`` of ``Pi(n)`` is detected from per-prime residue masks and the
    weights are added in increasing ``d``, matching :func:`big_lambda_sq`.
    """
    if segment < 1:
        raise ValueError("segment must be positive")
    N = config.N
    lam = config.lambdas
    R = config.R_int
    sieve_primes = [int(p) for p in primes_upto(R)]
    divisors = [d for d in range(1, R + 1) if lam[d] != 0.0]
    factors = {d: [p for p in sieve_primes if d % p == 0] for d in divisors}
    hmax = max(config.offsets)
    base = primes_upto(math.isqrt(2 * N + hmax) + 1)
    ylim = config.small_prime_limit
    small = [int(p) for p in primes_upto(int(math.floor(ylim))) if p <= ylim]

    q1 = {h: ExactSum() for h in config.tuple1}
    q3 = {h: ExactSum() for h in config.tuple2}
    q2 = ExactSum()
    for lo in range(N, 2 * N + 1, segment):
        hi = min(lo + segment, 2 * N + 1)
        n = np.arange(lo, hi, dtype=np.int64)
        masks = {}
        for p in sieve_primes:
            res = n % p
            hit = np.zeros(n.shape, dtype=bool)
            for h in {(-h) % p for h in config.offsets}:
                hit |= res == h
            masks[p] = hit
        acc = np.zeros(n.shape)
        for d in divisors:
            if d == 1:
                acc += lam[1]
                continue
            m = masks[factors[d][0]]
            for p in factors[d][1:]:
                m = m & masks[p]
            acc += np.where(m, lam[d], 0.0)
        lam2 = acc * acc
        q2.add(lam2)
        for h in config.tuple1:
            prime = _segment_primality(lo + h, hi + h, base)
            q1[h].add(np.where(prime, lam2, 0.0))
        for h in config.tuple2:
            count = np.zeros(n.shape)
            for p in small:
                count += ((n + h) % p == 0)
            q3[h].add(count * lam2)
    return SieveSums({h: s.value for h, s in q1.items()}, q2.value,
                     {h: s.value for h, s in q3.items()}, N + 1)


def naive_sums(config: SieveConfig) -> SieveSums:
    """Per-n reference: trial division for every ``n + h`` and brute-force divisor sums."""
    ylim = config.small_prime_limit
    q1: Dict[int, List[float]] = {h: [] for h in config.tuple1}
    q3: Dict[int, List[float]] = {h: [] for h in config.tuple2}
    q2: List[float] = []
    for n in range(config.N, 2 * config.N + 1):
        w = big_lambda_sq_bruteforce(n, config)
        q2.append(w)
        for h in config.tuple1:
            f = trial_factor(n + h)
            is_prime = len(f) == 1 and next(iter(f.values())) == 1
            q1[h].append(w if is_prime else 0.0)
        for h in config.tuple2:
            cnt = sum(1 for p in trial_factor(n + h) if p <= ylim)
            q3[h].append(float(cnt) * w)
    return SieveSums({h: math.fsum(v) for h, v in q1.items()}, math.fsum(q2),
                     {h: math.fsum(v) for h, v in q3.items()}, config.N + 1)


def _monomial_exponent(P: SievePolynomial) -> int | None:
    c = P.coeffs
    if c and c[-1] == 1 and all(x == 0 for x in c[:-1]):
        return len(c) - 1
    return None


def compare_with_asymptotics(config: SieveConfig, sums: SieveSums | None = None) -> dict:
    """Empirical ratios next to their predicted limits; diagnostic, no thresholds.

    Predicted ``sum Q1 / Q2`` is ``theta (2l+1) k1 / ((l+1)(k+2l+1))`` for
    ``P = x**l`` and ``k1 theta (k-1) J1 / (2 I0)`` otherwise.  Predicted
    ``Q3 / Q2`` per offset is ``delta (k+2l)`` for monomials, with
    ``delta = 2 / (theta (r+1))``, and the numeric ``I_delta / I0``
    otherwise.
    """
    if sums is None:
        sums = empirical_sums(config)
    k, k1, th = config.k, len(config.tuple1), config.theta
    l = _monomial_exponent(config.P)
    delta = 2.0 / (th * (config.r + 1))
    ctx = GpyContext(config.P, k)
    if l is not None:
        q1_pred = th * (2 * l + 1) * k1 / ((l + 1) * (k + 2 * l + 1))
        q3_pred = delta * (k + 2 * l)
    else:
        i0 = float(gpy_i0(ctx))
        q1_pred = k1 * th * (k - 1) * float(gpy_j1(ctx)) / (2 * i0) if k >= 2 else float("nan")
        q3_pred = i_delta_numeric(ctx, min(delta, 1.0)) / i0
    q2 = sums.Q2
    return {
        "config": config.to_json(),
        "sums": sums.to_json(),
        "ratio_q1": math.fsum(sums.Q1.values()) / q2,
        "predicted_q1": q1_pred,
        "ratio_q3": {str(h): v / q2 for h, v in sums.Q3.items()},
        "predicted_q3": q3_pred,
        "note": "diagnostic only; lower-order terms dominate at this scale",
    }
