"""Positivity margins for the two gap theorems and a small polynomial optimizer.

Theorem 1 works with monomial weights ``P = x**l`` and explicit parameter
choices; its margin is a closed-form expression in ``theta``, ``k2``,
``C1``, ``C2`` and ``delta``.  Theorem 2 assembles the exact and numeric
integrals for a fixed tuple size.

Real-valued ``theta`` arguments given as floats are read through their
shortest decimal representation, so ``0.55`` means 11/20 and ceilings are
taken exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .exact import RationalLike, as_rational
from .gpy import GpyContext, i0 as gpy_i0, i_delta_bound, j1 as gpy_j1, q1_coefficient_exact
from .jintegrals import DEFAULT_B, BConstant, j_total
from .poly import SievePolynomial
from .quadrature import IntegralEstimate

__all__ = [
    "MarginEvaluation",
    "OptimizationResult",
    "Theorem1Params",
    "check_r_condition",
    "evaluate_margin",
    "optimize_polynomial",
    "r_exact_threshold",
    "s_margin_thm1",
    "s_margin_thm1_integer",
    "s_margin_thm1_unsimplified",
    "s_margin_thm2",
    "simplification_holds",
    "theorem1_r",
]

THETA_MAX = Fraction(99, 100)


def _theta(theta: RationalLike | float) -> Fraction:
    if isinstance(theta, float):
        return Fraction(repr(theta))
    return as_rational(theta)


def _check_theta(theta: Fraction, upper: Fraction = THETA_MAX) -> None:
    if not Fraction(1, 2) < theta < upper:
        raise ValueError(f"theta must lie in (1/2, {upper})")


def _ceil(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


def theorem1_r(theta: RationalLike | float, k2: int) -> int:
    """``ceil(240 k2^2 / (2 theta - 1)^3)``."""
    th = _theta(theta)
    _check_theta(th)
    if k2 < 1:
        raise ValueError("k2 must be positive")
    return _ceil(240 * k2 * k2 / (2 * th - 1) ** 3)


def r_exact_threshold(theta: RationalLike | float, k2: int) -> float:
    """``2400 k2^2 / ((2 theta - 1)^3 theta (31 - 21 theta)) - 1``."""
    th = _theta(theta)
    _check_theta(th, Fraction(31, 21))
    return float(2400 * k2 * k2 / ((2 * th - 1) ** 3 * th * (31 - 21 * th)) - 1)


def check_r_condition(theta: RationalLike | float, r: int) -> bool:
    """True iff ``r + 1 > 1 / (1 - theta)``."""
    th = _theta(theta)
    if not 0 < th < 1:
        raise ValueError("theta must lie in (0, 1)")
    return r + 1 > 1 / (1 - th)


def simplification_holds(theta: RationalLike | float) -> bool:
    """``(30 - 17t - 5t^2 + 2t^3)/30 >= (31 - 21t)/30`` at ``t = theta``."""
    t = _theta(theta)
    return 30 - 17 * t - 5 * t ** 2 + 2 * t ** 3 >= 31 - 21 * t


@dataclass(frozen=True)
class Theorem1Params:
    """Parameter set for the first theorem.

    ``k`` and ``l`` come from the two ceilings
    ``l + 1 = ceil(C2 / (2 theta - 1))`` and
    ``k + 2l + 1 = ceil(C1 / (2 theta - 1)^2)``.
    """

    theta: Fraction
    k2: int
    C1: Fraction
    C2: Fraction
    k: int
    l: int
    k1: int
    r: int
    delta: Fraction

    def __post_init__(self) -> None:
        th = self.theta
        _check_theta(th)
        a = 2 * th - 1
        if self.k2 < 1:
            raise ValueError("k2 must be positive")
        if self.l + 1 != _ceil(self.C2 / a):
            raise ValueError("l + 1 must equal ceil(C2 / (2 theta - 1))")
        if self.k + 2 * self.l + 1 != _ceil(self.C1 / a ** 2):
            raise ValueError("k + 2l + 1 must equal ceil(C1 / (2 theta - 1)^2)")
        if self.k1 != self.k - self.k2 or self.k1 < 1:
            raise ValueError(f"k1 = k - k2 = {self.k - self.k2} must be at least 1")
        if self.r < 1 or self.delta != Fraction(2) / (th * (self.r + 1)):
            raise ValueError("delta must equal 2 / (theta (r + 1))")

    @classmethod
    def choose(cls, theta: RationalLike | float, k2: int, C1: RationalLike | None = None,
               C2: RationalLike = 3, r: Optional[int] = None) -> "Theorem1Params":
        """Derive k, l, k1, r and delta from theta, k2 and the constants (default ``C1 = 40 k2``)."""
        th = _theta(theta)
        _check_theta(th)
        C1q = Fraction(40 * k2) if C1 is None else as_rational(C1)
        C2q = as_rational(C2)
        a = 2 * th - 1
        l = _ceil(C2q / a) - 1
        k = _ceil(C1q / a ** 2) - 2 * l - 1
        if l < 0:
            raise ValueError("C2 too small: l would be negative")
        if r is None:
            r = theorem1_r(th, k2)
        return cls(th, k2, C1q, C2q, k, l, k - k2, r, Fraction(2) / (th * (r + 1)))

    def to_json(self) -> dict:
        return {"theta": str(self.theta), "k2": self.k2, "C1": str(self.C1), "C2": str(self.C2),
                "k": self.k, "l": self.l, "k1": self.k1, "r": self.r, "delta": str(self.delta)}


def s_margin_thm1(params: Theorem1Params, delta: RationalLike | None = None) -> float:
    """Simplified lower bound for the normalized sieve sum.

    ``(2t-1)(1 - t/C2 - 4tC2/C1 - 2k2(2t-1)t/C1 + (1+k2)t(2t-1)^2/(C1 C2))
    - k2 delta C1 (2t-1)^-2``; ``delta`` defaults to the one in ``params``.
    """
    th, k2, C1, C2 = params.theta, params.k2, params.C1, params.C2
    d = params.delta if delta is None else as_rational(delta)
    a = 2 * th - 1
    main = a * (1 - th / C2 - 4 * th * C2 / C1 - 2 * k2 * a * th / C1 + (1 + k2) * th * a * a / (C1 * C2))
    return float(main - k2 * d * C1 / a ** 2)


def s_margin_thm1_unsimplified(params: Theorem1Params) -> float:
    """The same bound before expanding the product.

    ``t(2 - (2t-1)/C2)(1 - 2C2(2t-1)/C1 - (k2+1)(2t-1)^2/C1) - 1
    - k2 delta C1 (2t-1)^-2``.
    """
    th, k2, C1, C2, d = params.theta, params.k2, params.C1, params.C2, params.delta
    a = 2 * th - 1
    value = th * (2 - a / C2) * (1 - 2 * C2 * a / C1 - (k2 + 1) * a * a / C1) - 1 - k2 * d * C1 / a ** 2
    return float(value)


def s_margin_thm1_integer(params: Theorem1Params) -> Fraction:
    """Margin at the actual integers k, l, rebuilt from the exact moments.

    Uses the prime-sum coefficient from ``J1 / I0`` and the almost-prime
    correction ``k2 * i_delta_bound / I0`` for ``P = x**l``.  The ceilings
    only help, so this is never below :func:`s_margin_thm1`.
    """
    k, l = params.k, params.l
    ctx = GpyContext.monomial(k, l)
    main = q1_coefficient_exact(params.theta, params.k1, k, l)
    correction = params.k2 * i_delta_bound(k, l, params.delta) / gpy_i0(ctx)
    return main - 1 - correction


def s_margin_thm2(k: int, i0, j1, j2, j3, j4, theta: RationalLike | float = THETA_MAX):
    """``theta (k-1)/2 (k J1 + J2 + J3 + J4) - 2 I0`` with ``theta = 0.99`` by default.

    Exact when every input is rational; a float otherwise.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    th = _theta(theta)
    values = [i0, j1, j2, j3, j4]
    if all(isinstance(v, (int, Fraction)) for v in values):
        return th * (k - 1) / 2 * (k * j1 + j2 + j3 + j4) - 2 * i0
    i0f, j1f, j2f, j3f, j4f = (float(v) for v in values)
    return float(th) * (k - 1) / 2 * (k * j1f + j2f + j3f + j4f) - 2 * i0f


@dataclass(frozen=True)
class MarginEvaluation:
    """Margin for one polynomial together with the inputs that produced it."""

    P: SievePolynomial
    k: int
    i0: Fraction
    j1: Fraction
    j: Dict[int, IntegralEstimate]
    margin: float
    margin_lower: float

    def to_json(self) -> dict:
        from .exact import format_rational
        return {
            "poly": str(self.P), "k": self.k,
            "I0": format_rational(self.i0), "J1": format_rational(self.j1),
            **{f"J{r}": est.to_json() for r, est in self.j.items()},
            "margin": self.margin, "margin_lower": self.margin_lower,
        }


def evaluate_margin(P: SievePolynomial, k: int, B: BConstant = DEFAULT_B, eps: float = 1e-4,
                    tol: float = 1e-5, theta: RationalLike | float = THETA_MAX, domain: str = "literal",
                    **kwargs) -> MarginEvaluation:
    """Compute I0, J1 exactly and J2..J4 numerically, then the margin.

    ``margin_lower`` uses ``J_r - error_bound`` for each numeric integral.
    """
    ctx = GpyContext(P, k)
    I0 = gpy_i0(ctx)
    J1 = gpy_j1(ctx)
    js = {r: j_total(r, ctx, B, eps, tol, domain=domain, **kwargs) for r in (2, 3, 4)}
    margin = s_margin_thm2(k, I0, J1, js[2].value, js[3].value, js[4].value, theta)
    lower = s_margin_thm2(k, I0, J1, js[2].lower, js[3].lower, js[4].lower, theta)
    return MarginEvaluation(P, k, I0, J1, js, margin, lower)


@dataclass
class OptimizationResult:
    P: SievePolynomial
    margin: float
    evaluations: int
    history: List[Tuple[Tuple[int, ...], float]] = field(default_factory=list)
    scale_invariant: bool = False
    exhausted: bool = False

    def to_json(self) -> dict:
        return {"poly": ",".join(str(c) for c in self.P.coeffs) or "0", "margin": self.margin,
                "evaluations": self.evaluations, "scale_invariant": self.scale_invariant,
                "budget_exhausted": self.exhausted,
                "history": [{"coeffs": list(c), "margin": m} for c, m in self.history]}


def optimize_polynomial(
    k: int,
    degree: int,
    coefficient_box: Sequence[Tuple[int, int]],
    budget: int,
    start: Optional[Sequence[int]] = None,
    objective: Optional[Callable[[SievePolynomial], float]] = None,
    **margin_kwargs,
) -> OptimizationResult:
    """Integer coordinate descent on the coefficients of P inside a box.

    Each coordinate is tried at ``+step`` and ``-step``; a strict improvement
    is accepted and doubles that coordinate's step, a failure resets it to 1.
    The search stops when a full sweep with unit steps improves nothing, or
    after ``budget`` objective evaluations.  The default objective is the
    second theorem's margin computed afresh for each candidate.
    """
    if not 0 <= degree <= 6:
        raise ValueError("degree must lie in 0..6")
    box = [(int(lo), int(hi)) for lo, hi in coefficient_box]
    if len(box) != degree + 1 or any(lo > hi for lo, hi in box):
        raise ValueError("coefficient_box needs one finite (lo, hi) pair per coefficient")
    if budget < 1:
        raise ValueError("budget must be positive")
    if objective is None:
        def objective(P: SievePolynomial) -> float:
            return evaluate_margin(P, k, **margin_kwargs).margin

    if degree == 0:
        # margin(c) = c^2 margin(1): only the sign carries information, so fix c = 1.
        P = SievePolynomial.parse("1")
        m = objective(P)
        return OptimizationResult(P, m, 1, [((1,), m)], scale_invariant=True)

    if start is None:
        current = [max(lo, min(hi, 0)) for lo, hi in box]
        if box[0][0] <= 1 <= box[0][1]:
            current[0] = 1
    else:
        current = [int(c) for c in start]
        if len(current) != degree + 1:
            raise ValueError("start must have degree + 1 coefficients")
        if any(not lo <= c <= hi for c, (lo, hi) in zip(current, box)):
            raise ValueError("start lies outside the box")

    cache: Dict[Tuple[int, ...], float] = {}
    history: List[Tuple[Tuple[int, ...], float]] = []

    def value(coeffs: List[int]) -> Optional[float]:
        key = tuple(coeffs)
        if key in cache:
            return cache[key]
        if len(cache) >= budget:
            return None
        P = SievePolynomial(tuple(Fraction(c) for c in coeffs))
        m = -math.inf if P.is_zero() else objective(P)
        cache[key] = m
        history.append((key, m))
        return m

    best = value(current)
    steps = [1] * len(current)
    exhausted = False
    improved = True
    while improved and not exhausted:
        improved = False
        for i, (lo, hi) in enumerate(box):
            while True:
                moved = False
                for direction in (1, -1):
                    cand = list(current)
                    cand[i] += direction * steps[i]
                    if not lo <= cand[i] <= hi:
                        continue
                    m = value(cand)
                    if m is None:
                        exhausted = True
                        break
                    if m > best:
                        current, best, moved, improved = cand, m, True, True
                        steps[i] *= 2
                        break
                if exhausted or not moved:
                    if steps[i] > 1 and not exhausted:
                        steps[i] = 1
                        continue
                    break
            if exhausted:
                break
    P = SievePolynomial(tuple(Fraction(c) for c in current))
    return OptimizationResult(P, best, len(cache), history, exhausted=exhausted)
