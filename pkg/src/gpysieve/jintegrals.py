"""Almost-prime integrals J2, J3 and J4.

For ``r = 2, 3, 4`` the integral ``J_r`` runs over the ordered simplex
``eps < x < y < z``, ``x + y + z < 1`` (in the variables rescaled by B)
with weight ``B / (x y z (B - x - y - z))`` restricted to the active
variables.  The inner integrand is the square of an inclusion-exclusion sum
of truncated antiderivatives ``Ptilde+(1 - t - S)`` times ``t^(k-2)``.  The
range of ``t`` is cut at the breakpoints ``1 - S`` so that on each piece the
truncation is inactive; the catalogue below lists the resulting pieces
J21, J22, J31..J34 and J41..J411 with their outer limits.

Each piece is evaluated by exact inner ``t`` integration (a polynomial in
``x, y, z`` and the slack ``w = 1 - x - y - z``) followed by adaptive
cubature of the outer integral in floating point.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .exact import RationalLike, as_rational
from .gpy import GpyContext
from .poly import AffineBound, MultiPoly, SievePolynomial, integrate_t, signed_sum_square
from .quadrature import IntegralEstimate, Region, integrate

__all__ = [
    "BConstant",
    "DEFAULT_B",
    "JPieceSpec",
    "catalogue",
    "eps_convergence_report",
    "inner_numeric",
    "inner_polynomial",
    "j2",
    "j3",
    "j4",
    "j_piece",
    "j_pieces",
    "j_total",
]

_ACTIVE = {2: "x", 3: "xy", 4: "xyz"}


@dataclass(frozen=True)
class BConstant:
    B: Fraction = Fraction(200, 99)

    def __post_init__(self) -> None:
        object.__setattr__(self, "B", as_rational(self.B))
        if not self.B > 1:
            raise ValueError("B must exceed 1")

    @classmethod
    def from_level(cls, theta: RationalLike) -> "BConstant":
        """``B = 2 / theta`` for level of distribution ``theta``."""
        return cls(2 / as_rational(theta))

    def __float__(self) -> float:
        return float(self.B)


DEFAULT_B = BConstant()


def _lin(const=0, x=0, y=0, z=0) -> AffineBound:
    return AffineBound.of(Fraction(const), Fraction(x), Fraction(y), Fraction(z))


def _one_minus(subset: str) -> AffineBound:
    return _lin(1, *(-1 if v in subset else 0 for v in "xyz"))


def _offset(subset: str) -> AffineBound:
    return _lin(0, *(1 if v in subset else 0 for v in "xyz"))


@dataclass(frozen=True)
class JPieceSpec:
    """One piece of J_r: outer region, t-range and signed shifts.

    ``shifts`` holds ``(sign, offset)`` pairs; the inner integrand is
    ``(sum sign * Ptilde(1 - t - offset))^2 t^(k-2)`` for ``t`` between
    ``t_lower`` and ``t_upper``.
    """

    name: str
    r: int
    index: int
    region: Region
    t_lower: AffineBound
    t_upper: AffineBound
    shifts: Tuple[Tuple[int, AffineBound], ...]

    @property
    def active(self) -> str:
        return _ACTIVE[self.r]

    @property
    def used(self) -> str:
        """Active variables that occur in the t-range or the shifts.

        The inner integral depends only on these, and its ``w`` coordinate
        is ``1`` minus their sum.
        """
        names = set(self.t_lower.variables()) | set(self.t_upper.variables())
        for _, off in self.shifts:
            names |= set(off.variables())
        return "".join(v for v in self.active if v in names)

    def w_value(self, x=0.0, y=0.0, z=0.0):
        """Float value of the ``w`` coordinate at a point."""
        vals = {"x": x, "y": y, "z": z}
        return 1.0 - sum(np.asarray(vals[v], dtype=float) for v in self.used)

    def with_eps(self, eps: RationalLike) -> "JPieceSpec":
        """Raise the lower limit of the smallest variable from 0 to ``eps``."""
        eps = as_rational(eps)
        (lo, hi), *rest = self.region.bounds
        if lo.variables():
            raise ValueError("first variable must have a constant lower limit")
        new_lo = AffineBound.of(max(lo.constant, eps))
        return JPieceSpec(self.name, self.r, self.index, Region(((new_lo, hi), *rest)),
                          self.t_lower, self.t_upper, self.shifts)


def _spec(name: str, r: int, index: int, region: Sequence, t_lower, t_upper, signed_subsets: str) -> JPieceSpec:
    shifts = []
    for token in signed_subsets.split():
        sign = -1 if token[0] == "-" else 1
        shifts.append((sign, _offset(token.lstrip("+-").replace("1", ""))))
    return JPieceSpec(name, r, index, Region(tuple(region)), t_lower, t_upper, tuple(shifts))


def _t(subset: str | None) -> AffineBound:
    return _lin(0) if subset is None else _one_minus(subset)


# Outer regions, rescaled by B.
_R2 = ((_lin(0), _lin(1)),)
_R3 = ((_lin(0), _lin(Fraction(1, 2))), (_lin(0, 1), _lin(1, -1)))
# x < y < z, x + y + z < 1
_R4_FULL = ((_lin(0), _lin(Fraction(1, 3))), (_lin(0, 1), _lin(Fraction(1, 2), Fraction(-1, 2))),
            (_lin(0, 0, 1), _lin(1, -1, -1)))
# z > x + y
_R4_HIGH = ((_lin(0), _lin(Fraction(1, 4))), (_lin(0, 1), _lin(Fraction(1, 2), -1)),
            (_lin(0, 1, 1), _lin(1, -1, -1)))
# z < x + y, with the tabulated upper limits (x < 1/3, y < (1-x)/2, z < x + y)
_R4_LOW_LITERAL = ((_lin(0), _lin(Fraction(1, 3))), (_lin(0, 1), _lin(Fraction(1, 2), Fraction(-1, 2))),
                   (_lin(0, 0, 1), _lin(0, 1, 1)))
# z < x + y intersected with x + y + z < 1, split where 1 - x - y = x + y
_R4_LOW_A = ((_lin(0), _lin(Fraction(1, 4))), (_lin(0, 1), _lin(Fraction(1, 2), -1)),
             (_lin(0, 0, 1), _lin(0, 1, 1)))
_R4_LOW_B = ((_lin(0), _lin(Fraction(1, 4))), (_lin(Fraction(1, 2), -1), _lin(Fraction(1, 2), Fraction(-1, 2))),
             (_lin(0, 0, 1), _lin(1, -1, -1)))
_R4_LOW_C = ((_lin(Fraction(1, 4)), _lin(Fraction(1, 3))), (_lin(0, 1), _lin(Fraction(1, 2), Fraction(-1, 2))),
             (_lin(0, 0, 1), _lin(1, -1, -1)))

# name, index, region key, t_lower, t_upper, signed subsets ("1" is the empty set)
_TABLE = [
    ("J21", 2, 1, "R2", None, "x", "+1 -x"),
    ("J22", 2, 2, "R2", "x", "", "+1"),
    ("J31", 3, 1, "R3", "x", "", "+1"),
    ("J32", 3, 2, "R3", "y", "x", "+1 -x"),
    ("J33", 3, 3, "R3", "xy", "y", "+1 -x -y"),
    ("J34", 3, 4, "R3", None, "xy", "+1 -x -y +xy"),
    ("J41", 4, 1, "FULL", "x", "", "+1"),
    ("J42", 4, 2, "FULL", "y", "x", "+1 -x"),
    ("J43", 4, 3, "HIGH", "xy", "y", "+1 -x -y"),
    ("J44", 4, 4, "LOW", "z", "y", "+1 -x -y"),
    ("J45", 4, 5, "HIGH", "z", "xy", "+1 -x -y +xy"),
    ("J46", 4, 6, "LOW", "xy", "z", "+1 -x -y -z"),
    ("J47", 4, 7, "HIGH", "xz", "z", "+1 -x -y -z +xy"),
    ("J48", 4, 8, "LOW", "xz", "xy", "+1 -x -y -z +xy"),
    ("J49", 4, 9, "FULL", "yz", "xz", "+1 -x -y -z +xy +xz"),
    ("J410", 4, 10, "FULL", "xyz", "yz", "+1 -x -y -z +xy +xz +yz"),
    ("J411", 4, 11, "FULL", None, "xyz", "+1 -x -y -z +xy +xz +yz -xyz"),
]

_REGIONS = {"R2": [_R2], "R3": [_R3], "FULL": [_R4_FULL], "HIGH": [_R4_HIGH]}


@lru_cache(maxsize=None)
def catalogue(r: int, domain: str = "literal") -> Tuple[JPieceSpec, ...]:
    """Pieces of J_r.

    ``domain="literal"`` reproduces the published limits literally; for the
    pieces J44, J46 and J48 these let ``z`` run up to ``x + y`` even where
    that exceeds ``1 - x - y``.  ``domain="simplex"`` clips those three
    pieces to ``x + y + z < 1`` (each then becomes three sub-pieces, named
    e.g. ``J44a``, ``J44b``, ``J44c``).
    """
    if r not in _ACTIVE:
        raise ValueError("r must be 2, 3 or 4")
    if domain not in ("literal", "simplex"):
        raise ValueError("domain must be 'literal' or 'simplex'")
    out: List[JPieceSpec] = []
    for name, rr, index, key, lo, hi, signed in _TABLE:
        if rr != r:
            continue
        if key == "LOW":
            if domain == "literal":
                regions = [("", _R4_LOW_LITERAL)]
            else:
                regions = [("a", _R4_LOW_A), ("b", _R4_LOW_B), ("c", _R4_LOW_C)]
        else:
            regions = [("", reg) for reg in _REGIONS[key]]
        for suffix, reg in regions:
            out.append(_spec(name + suffix, r, index, reg, _t(lo), _t(hi if hi else ""), signed))
    return tuple(out)


@lru_cache(maxsize=256)
def _inner(ptilde: SievePolynomial, k: int, spec_key: Tuple) -> MultiPoly:
    active, t_lower, t_upper, shifts = spec_key
    base = AffineBound.of(1).to_simplex(active)
    sq = signed_sum_square(ptilde, [(s, off) for s, off in shifts], base)
    return integrate_t(sq.shift_t(k - 2), t_lower.to_simplex(active), t_upper.to_simplex(active))


def inner_polynomial(spec: JPieceSpec, ctx: GpyContext) -> MultiPoly:
    """Exact inner t-integral of a piece, as a polynomial in ``x, y, z, w``.

    ``w`` stands for ``1`` minus the sum of ``spec.used``; use
    ``MultiPoly.from_simplex(spec.used)`` to eliminate it.  Keeping ``w``
    avoids the heavy cancellation of an expansion in plain monomials.
    """
    if ctx.k < 2:
        raise ValueError("J pieces need k >= 2")
    key = (spec.used, spec.t_lower, spec.t_upper, spec.shifts)
    return _inner(ctx.Ptilde, ctx.k, key)


def _ptilde_plus(coeffs: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.where(u >= 0, np.polyval(coeffs, np.maximum(u, 0.0)), 0.0)


def inner_numeric(spec: JPieceSpec, ctx: GpyContext, x, y=0.0, z=0.0, order: int | None = None) -> np.ndarray:
    """Inner t-integral of a piece by Gauss-Legendre quadrature in t.

    Evaluates the truncated antiderivative directly, so it is independent
    of the symbolic expansion.  With the default order the rule is exact
    for the polynomial integrand up to rounding.
    """
    pt = ctx.Ptilde
    coeffs = np.array([float(c) for c in pt.coeffs[::-1]]) if pt.coeffs else np.array([0.0])
    if order is None:
        order = max(pt.degree, 0) + (ctx.k - 2) // 2 + 2
    x, y, z = (np.asarray(v, dtype=float) for v in (x, y, z))
    x, y, z = np.broadcast_arrays(x, y, z)
    lo = spec.t_lower.evaluate_float(x=x, y=y, z=z) * np.ones_like(x)
    hi = spec.t_upper.evaluate_float(x=x, y=y, z=z) * np.ones_like(x)
    nodes, weights = np.polynomial.legendre.leggauss(order)
    half = 0.5 * (hi - lo)
    ts = half[..., None] * nodes + (0.5 * (hi + lo))[..., None]
    total = np.zeros_like(ts)
    for sign, off in spec.shifts:
        s = off.evaluate_float(x=x, y=y, z=z) * np.ones_like(x)
        total += sign * _ptilde_plus(coeffs, 1.0 - ts - s[..., None])
    vals = total ** 2 * ts ** (ctx.k - 2)
    return half * (vals @ weights)


class _PieceIntegrand:
    """Vectorized outer integrand ``B * g / (prod(active) * (B - sum(active)))``."""

    def __init__(self, spec: JPieceSpec, ctx: GpyContext, B: BConstant, inner: str):
        self.spec = spec
        self.ctx = ctx
        self.B = float(B.B)
        self.inner = inner
        self.nvar = len(spec.active)
        if inner == "symbolic":
            g = inner_polynomial(spec, ctx)
            content = g.monomial_content()
            # Divide out the monomial content so the 1/x, 1/y, 1/z weights
            # cancel symbolically where they can.
            self.content = content
            self.poly = g.divide_monomial(content).compile()
            self.zero = g.is_zero()
        elif inner == "gauss":
            self.zero = ctx.Ptilde.is_zero()
        else:
            raise ValueError("inner must be 'symbolic' or 'gauss'")

    def __call__(self, *coords):
        names = self.spec.active
        kw = dict(zip(names, coords))
        s = sum(coords)
        if self.zero:
            return np.zeros_like(coords[0])
        denom = self.B - s
        w = self.spec.w_value(**kw)
        if self.inner == "gauss":
            prod = np.ones_like(coords[0])
            for c in coords:
                prod = prod * c
            return self.B * inner_numeric(self.spec, self.ctx, **kw) / (prod * denom)
        val = self.poly(x=kw.get("x", 0.0), y=kw.get("y", 0.0), z=kw.get("z", 0.0), w=w)
        factor = np.ones_like(coords[0])
        for i, name in enumerate("xyz"[: self.nvar]):
            factor = factor * coords[i] ** float(self.content[1 + i] - 1)
        if self.content[4]:
            factor = factor * w ** self.content[4]
        return self.B * val * factor / denom


def j_piece(
    spec: JPieceSpec,
    ctx: GpyContext,
    B: BConstant = DEFAULT_B,
    eps: float | Fraction = 1e-4,
    tol: float = 1e-6,
    max_evals: int = 20_000_000,
    inner: str = "symbolic",
    rule: str = "gk7",
) -> IntegralEstimate:
    """Outer integral of one piece with the smallest variable bounded below by ``eps``."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    eps_q = Fraction(repr(eps)) if isinstance(eps, float) else as_rational(eps)
    spec = spec.with_eps(eps_q)
    f = _PieceIntegrand(spec, ctx, B, inner)
    if f.zero:
        return IntegralEstimate(0.0, 0.0, 0, "adaptive")
    return integrate(f, spec.region, tol=tol, max_evals=max_evals, rule=rule)


def j_pieces(
    r: int,
    ctx: GpyContext,
    B: BConstant = DEFAULT_B,
    eps: float | Fraction = 1e-4,
    tol: float = 1e-5,
    domain: str = "literal",
    **kwargs,
) -> Dict[str, IntegralEstimate]:
    """Estimates for every piece of J_r; ``tol`` is shared equally among the pieces."""
    specs = catalogue(r, domain)
    share = tol / len(specs)
    return {s.name: j_piece(s, ctx, B, eps, share, **kwargs) for s in specs}


def j_total(r: int, ctx: GpyContext, B: BConstant = DEFAULT_B, eps: float | Fraction = 1e-4,
            tol: float = 1e-5, domain: str = "literal", **kwargs) -> IntegralEstimate:
    pieces = j_pieces(r, ctx, B, eps, tol, domain, **kwargs)
    return IntegralEstimate.total([pieces[name] for name in pieces])


def j2(ctx: GpyContext, B: BConstant = DEFAULT_B, eps=1e-4, tol=1e-5, **kwargs) -> IntegralEstimate:
    return j_total(2, ctx, B, eps, tol, **kwargs)


def j3(ctx: GpyContext, B: BConstant = DEFAULT_B, eps=1e-4, tol=1e-5, **kwargs) -> IntegralEstimate:
    return j_total(3, ctx, B, eps, tol, **kwargs)


def j4(ctx: GpyContext, B: BConstant = DEFAULT_B, eps=1e-4, tol=1e-5, **kwargs) -> IntegralEstimate:
    return j_total(4, ctx, B, eps, tol, **kwargs)


@dataclass
class ConvergenceRow:
    eps: float
    values: Dict[int, IntegralEstimate] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"eps": self.eps, **{f"J{r}": est.to_json() for r, est in self.values.items()}}


def eps_convergence_report(
    ctx: GpyContext,
    B: BConstant = DEFAULT_B,
    eps_list: Sequence[float] = (1e-2, 1e-3, 1e-4),
    tol: float = 1e-5,
    rs: Sequence[int] = (2, 3, 4),
    **kwargs,
) -> List[ConvergenceRow]:
    """J_r for each cutoff in a strictly decreasing list of positive ``eps``."""
    eps_list = list(eps_list)
    if any(e <= 0 for e in eps_list):
        raise ValueError("eps values must be positive")
    if any(a <= b for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must be strictly decreasing")
    rows = []
    for eps in eps_list:
        rows.append(ConvergenceRow(eps, {r: j_total(r, ctx, B, eps, tol, **kwargs) for r in rs}))
    return rows
