"""Exact univariate and multivariate polynomial algebra.

``SievePolynomial`` is the weight polynomial P of the sieve (and its
antiderivative).  ``MultiPoly`` is a sparse polynomial in the variables
``t, x, y, z, w`` with rational coefficients; it carries the integrands of
the almost-prime integrals through their exact inner ``t`` integration.

The fifth variable ``w`` is the simplex slack ``1 - x - y - z`` (restricted
to whichever of x, y, z are in play).  Writing every affine bound ``1 - S``
as ``w + (the remaining variables)`` keeps all arguments visibly
nonnegative on the integration region, so expanded coefficients do not
cancel catastrophically when the result is later evaluated in floating
point.  Polynomials that never mention ``w`` behave exactly like polynomials
in ``(t, x, y, z)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Sequence, Tuple

import numba
import numpy as np

from .exact import RationalLike, as_rational, format_rational

VARIABLES = ("t", "x", "y", "z", "w")
NVARS = len(VARIABLES)
_INDEX = {name: i for i, name in enumerate(VARIABLES)}

Exponents = Tuple[int, int, int, int, int]
_ZERO_EXP: Exponents = (0, 0, 0, 0, 0)


def _format_coeff_term(coeff: Fraction, monomial: str, first: bool) -> str:
    sign = "-" if coeff < 0 else "+"
    mag = abs(coeff)
    if monomial and mag == 1:
        body = monomial
    else:
        body = str(mag) + monomial
    if first:
        return body if sign == "+" else "-" + body
    return f" {sign} {body}"


@dataclass(frozen=True)
class SievePolynomial:
    """Univariate polynomial with exact rational coefficients.

    ``coeffs[i]`` is the coefficient of ``t**i``.  Trailing zeros are
    stripped so the leading coefficient is nonzero unless the polynomial is
    identically zero (stored as an empty tuple).
    """

    coeffs: Tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        cs = [as_rational(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def parse(cls, text: str) -> "SievePolynomial":
        """Build from comma-separated coefficients, lowest degree first ("1,60,-300,3500")."""
        parts = [p.strip() for p in text.split(",") if p.strip()]
        if not parts:
            raise ValueError("empty coefficient list")
        return cls(tuple(Fraction(p) for p in parts))

    @classmethod
    def monomial(cls, power: int, coeff: RationalLike = 1) -> "SievePolynomial":
        if power < 0:
            raise ValueError("negative power")
        return cls((Fraction(0),) * power + (as_rational(coeff),))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, value):
        exact = isinstance(value, (int, Fraction))
        acc = Fraction(0) if exact else 0.0
        for c in reversed(self.coeffs):
            acc = acc * value + (c if exact else float(c))
        return acc

    def __add__(self, other: "SievePolynomial") -> "SievePolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return SievePolynomial(tuple(p + q for p, q in zip(a, b)))

    def __sub__(self, other: "SievePolynomial") -> "SievePolynomial":
        return self + other.scale(-1)

    def __mul__(self, other: "SievePolynomial") -> "SievePolynomial":
        if self.is_zero() or other.is_zero():
            return SievePolynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return SievePolynomial(tuple(out))

    def scale(self, c: RationalLike) -> "SievePolynomial":
        c = as_rational(c)
        return SievePolynomial(tuple(c * a for a in self.coeffs))

    def derivative(self) -> "SievePolynomial":
        return SievePolynomial(tuple(i * c for i, c in enumerate(self.coeffs) if i > 0))

    def antiderivative(self) -> "SievePolynomial":
        return antiderivative(self)

    def reflect(self) -> "SievePolynomial":
        """The polynomial ``t -> P(1 - t)``."""
        out = SievePolynomial()
        base = SievePolynomial((Fraction(1), Fraction(-1)))
        for c in reversed(self.coeffs):
            out = out * base + SievePolynomial((c,))
        return out

    def to_json(self) -> list:
        return [format_rational(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> "SievePolynomial":
        return cls(tuple(Fraction(s) for s in data))

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        pieces = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
            pieces.append(_format_coeff_term(c, mono, not pieces))
        return "".join(pieces)


def antiderivative(poly: SievePolynomial) -> SievePolynomial:
    """The antiderivative vanishing at 0: ``x -> integral_0^x P(t) dt``."""
    return SievePolynomial((Fraction(0),) + tuple(c / (i + 1) for i, c in enumerate(poly.coeffs)))


@dataclass(frozen=True)
class AffineBound:
    """``constant + coeff_x*x + coeff_y*y + coeff_z*z + coeff_w*w``.

    Used as an integration limit and as the shifted argument of P.  The
    ``w`` coefficient is zero unless the bound has been rewritten in simplex
    coordinates with :meth:`to_simplex`.
    """

    constant: Fraction = Fraction(0)
    coeff_x: Fraction = Fraction(0)
    coeff_y: Fraction = Fraction(0)
    coeff_z: Fraction = Fraction(0)
    coeff_w: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        for name in ("constant", "coeff_x", "coeff_y", "coeff_z", "coeff_w"):
            object.__setattr__(self, name, as_rational(getattr(self, name)))

    @classmethod
    def of(cls, constant: RationalLike = 0, x: RationalLike = 0, y: RationalLike = 0,
           z: RationalLike = 0, w: RationalLike = 0) -> "AffineBound":
        return cls(as_rational(constant), as_rational(x), as_rational(y), as_rational(z), as_rational(w))

    @property
    def linear(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.coeff_x, self.coeff_y, self.coeff_z, self.coeff_w)

    def __add__(self, other: "AffineBound") -> "AffineBound":
        return AffineBound(self.constant + other.constant, self.coeff_x + other.coeff_x,
                           self.coeff_y + other.coeff_y, self.coeff_z + other.coeff_z,
                           self.coeff_w + other.coeff_w)

    def __neg__(self) -> "AffineBound":
        return AffineBound(-self.constant, -self.coeff_x, -self.coeff_y, -self.coeff_z, -self.coeff_w)

    def __sub__(self, other: "AffineBound") -> "AffineBound":
        return self + (-other)

    def variables(self) -> Tuple[str, ...]:
        return tuple(v for v, c in zip("xyzw", self.linear) if c != 0)

    def evaluate(self, x=0, y=0, z=0, w=0):
        """Evaluate exactly (Fractions in, Fraction out) or on floats / numpy arrays."""
        if all(isinstance(v, (int, Fraction)) for v in (x, y, z, w)):
            return self.constant + self.coeff_x * x + self.coeff_y * y + self.coeff_z * z + self.coeff_w * w
        out = float(self.constant)
        for c, v in zip(self.linear, (x, y, z, w)):
            if c != 0:
                out = out + float(c) * v
        return out

    def evaluate_float(self, x=0.0, y=0.0, z=0.0, w=0.0):
        out = float(self.constant)
        for c, v in zip(self.linear, (x, y, z, w)):
            if c != 0:
                out = out + float(c) * v
        return out

    def to_simplex(self, active: Iterable[str]) -> "AffineBound":
        """Rewrite with the constant expressed through ``1 = w + sum(active)``.

        ``1 - x - y`` with active ``x, y`` becomes ``w``; with active
        ``x, y, z`` it becomes ``w + z``.
        """
        if self.coeff_w != 0:
            raise ValueError("bound is already in simplex coordinates")
        active = tuple(active)
        for v, c in zip("xyz", self.linear[:3]):
            if c != 0 and v not in active:
                raise ValueError(f"bound uses inactive variable {v}")
        c0 = self.constant
        coeffs = dict(zip("xyz", self.linear[:3]))
        for v in active:
            coeffs[v] = coeffs[v] + c0
        return AffineBound(Fraction(0), coeffs["x"], coeffs["y"], coeffs["z"], c0)

    def as_multipoly(self) -> "MultiPoly":
        terms: Dict[Exponents, Fraction] = {}
        if self.constant:
            terms[_ZERO_EXP] = self.constant
        for i, c in enumerate(self.linear, start=1):
            if c:
                e = [0] * NVARS
                e[i] = 1
                terms[tuple(e)] = c
        return MultiPoly(terms)

    def __str__(self) -> str:
        pieces = []
        if self.constant != 0:
            pieces.append(_format_coeff_term(self.constant, "", True))
        for v, c in zip("xyzw", self.linear):
            if c != 0:
                pieces.append(_format_coeff_term(c, v, not pieces))
        return "".join(pieces) if pieces else "0"


def _add_into(acc: Dict[Exponents, Fraction], exps: Exponents, coeff: Fraction) -> None:
    v = acc.get(exps)
    if v is None:
        acc[exps] = coeff
    else:
        v = v + coeff
        if v:
            acc[exps] = v
        else:
            del acc[exps]


@dataclass(frozen=True, eq=False)
class MultiPoly:
    """Sparse polynomial in ``t, x, y, z, w`` with exact rational coefficients.

    ``terms`` maps exponent tuples ``(e_t, e_x, e_y, e_z, e_w)`` to nonzero
    Fractions.  Shorter tuples (e.g. ``(e_t, e_x, e_y, e_z)``) are accepted
    and padded with zeros.
    """

    terms: Mapping[Exponents, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean: Dict[Exponents, Fraction] = {}
        for exps, c in self.terms.items():
            exps = tuple(exps)
            if len(exps) < NVARS:
                exps = exps + (0,) * (NVARS - len(exps))
            if len(exps) != NVARS or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent tuple {exps}")
            c = as_rational(c)
            if c:
                _add_into(clean, exps, c)
        object.__setattr__(self, "terms", clean)

    @classmethod
    def _raw(cls, terms: Dict[Exponents, Fraction]) -> "MultiPoly":
        # Trusted constructor: terms already clean.
        obj = object.__new__(cls)
        object.__setattr__(obj, "terms", terms)
        return obj

    @classmethod
    def constant(cls, c: RationalLike) -> "MultiPoly":
        c = as_rational(c)
        return cls._raw({_ZERO_EXP: c} if c else {})

    @classmethod
    def variable(cls, name: str, power: int = 1) -> "MultiPoly":
        e = [0] * NVARS
        e[_INDEX[name]] = power
        return cls._raw({tuple(e): Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.constant(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.constant(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            _add_into(out, e, c)
        return MultiPoly._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly._raw({e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.constant(other)
        return self + (-other)

    def __rsub__(self, other) -> "MultiPoly":
        return (-self) + other

    def scale(self, c: RationalLike) -> "MultiPoly":
        c = as_rational(c)
        if not c:
            return MultiPoly._raw({})
        return MultiPoly._raw({e: c * v for e, v in self.terms.items()})

    def __mul__(self, other) -> "MultiPoly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        out: Dict[Exponents, Fraction] = {}
        get = out.get
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = (ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3], ea[4] + eb[4])
                out[e] = get(e, 0) + ca * cb
        return MultiPoly._raw({e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MultiPoly":
        if n < 0:
            raise ValueError("negative power")
        result = MultiPoly.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def shift_t(self, power: int) -> "MultiPoly":
        """Multiply by ``t**power``."""
        return MultiPoly._raw({(e[0] + power,) + e[1:]: c for e, c in self.terms.items()})

    def degree(self, var: str) -> int:
        i = _INDEX[var]
        return max((e[i] for e in self.terms), default=-1)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def monomial_content(self) -> Exponents:
        """Largest monomial dividing every term (zero exponents for the zero polynomial)."""
        if not self.terms:
            return _ZERO_EXP
        it = iter(self.terms)
        lo = list(next(it))
        for e in it:
            for i in range(NVARS):
                if e[i] < lo[i]:
                    lo[i] = e[i]
        return tuple(lo)

    def divide_monomial(self, exps: Sequence[int]) -> "MultiPoly":
        exps = tuple(exps) + (0,) * (NVARS - len(exps))
        out = {}
        for e, c in self.terms.items():
            q = tuple(a - b for a, b in zip(e, exps))
            if min(q) < 0:
                raise ValueError("monomial does not divide the polynomial")
            out[q] = c
        return MultiPoly._raw(out)

    def coefficients_in_t(self) -> Dict[int, "MultiPoly"]:
        groups: Dict[int, Dict[Exponents, Fraction]] = {}
        for e, c in self.terms.items():
            groups.setdefault(e[0], {})[(0,) + e[1:]] = c
        return {p: MultiPoly._raw(g) for p, g in groups.items()}

    def substitute(self, var: str, value: "MultiPoly") -> "MultiPoly":
        """Replace ``var`` by a polynomial expression."""
        i = _INDEX[var]
        by_power: Dict[int, Dict[Exponents, Fraction]] = {}
        for e, c in self.terms.items():
            rest = e[:i] + (0,) + e[i + 1:]
            by_power.setdefault(e[i], {})[rest] = c
        out = MultiPoly._raw({})
        powers = {0: MultiPoly.constant(1)}
        for p in sorted(by_power):
            if p not in powers:
                top = max(powers)
                acc = powers[top]
                for q in range(top + 1, p + 1):
                    acc = acc * value
                    powers[q] = acc
            out = out + MultiPoly._raw(by_power[p]) * powers[p]
        return out

    def from_simplex(self, active: Iterable[str]) -> "MultiPoly":
        """Eliminate ``w`` using ``w = 1 - sum(active)``."""
        slack = MultiPoly.constant(1)
        for v in active:
            slack = slack - MultiPoly.variable(v)
        return self.substitute("w", slack)

    def evaluate(self, t=0, x=0, y=0, z=0, w=0):
        """Exact evaluation at rational (or integer) arguments."""
        point = tuple(as_rational(v) for v in (t, x, y, z, w))
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for v, p in zip(point, e):
                if p:
                    term *= v ** p
            total += term
        return total

    def compile(self) -> "CompiledPoly":
        return CompiledPoly.from_multipoly(self)

    def to_json(self) -> list:
        return [[list(e), format_rational(c)] for e, c in sorted(self.terms.items())]

    @classmethod
    def from_json(cls, data) -> "MultiPoly":
        return cls({tuple(e): Fraction(c) for e, c in data})

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for e, c in sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), tuple(-p for p in kv[0]))):
            mono = "".join(v if p == 1 else f"{v}^{p}" for v, p in zip(VARIABLES, e) if p)
            pieces.append(_format_coeff_term(c, mono, not pieces))
        return "".join(pieces)

    __repr__ = __str__


@numba.njit(cache=True)
def _eval_terms(exps, coeffs, max_exp, pts):
    n_pts = pts.shape[0]
    n_vars = pts.shape[1]
    out = np.empty(n_pts)
    table = np.empty((n_vars, max_exp.max() + 1))
    for n in range(n_pts):
        for v in range(n_vars):
            table[v, 0] = 1.0
            for p in range(1, max_exp[v] + 1):
                table[v, p] = table[v, p - 1] * pts[n, v]
        acc = 0.0
        for j in range(exps.shape[0]):
            term = coeffs[j]
            for v in range(n_vars):
                term *= table[v, exps[j, v]]
            acc += term
        out[n] = acc
    return out


class CompiledPoly:
    """Floating-point evaluator for a ``MultiPoly`` over numpy arrays."""

    def __init__(self, exps: np.ndarray, coeffs: np.ndarray):
        self.exps = exps
        self.coeffs = coeffs
        self.max_exp = exps.max(axis=0) if len(exps) else np.zeros(NVARS, dtype=np.int64)

    @classmethod
    def from_multipoly(cls, poly: MultiPoly) -> "CompiledPoly":
        items = sorted(poly.terms.items())
        exps = np.array([e for e, _ in items], dtype=np.int64).reshape(-1, NVARS)
        coeffs = np.array([float(c) for _, c in items], dtype=float)
        return cls(exps, coeffs)

    def __call__(self, t=0.0, x=0.0, y=0.0, z=0.0, w=0.0) -> np.ndarray:
        values = [np.asarray(v, dtype=float) for v in (t, x, y, z, w)]
        shape = np.broadcast_shapes(*(v.shape for v in values))
        if not len(self.coeffs):
            return np.zeros(shape)
        pts = np.stack([np.broadcast_to(v, shape).ravel() for v in values], axis=1)
        return _eval_terms(self.exps, self.coeffs, self.max_exp, np.ascontiguousarray(pts)).reshape(shape)


def compose_shift(poly: SievePolynomial, bound: AffineBound) -> MultiPoly:
    """Expand ``P(bound - t)`` as a MultiPoly."""
    arg = bound.as_multipoly() - MultiPoly.variable("t")
    out = MultiPoly.constant(0)
    for c in reversed(poly.coeffs):
        out = out * arg + MultiPoly.constant(c)
    return out


def signed_sum_square(
    ptilde: SievePolynomial,
    shifts: Sequence[Tuple[int, AffineBound]],
    base: AffineBound = AffineBound(Fraction(1)),
) -> MultiPoly:
    """Expand ``(sum sign * ptilde(base - t - offset))**2``.

    ``base`` defaults to 1; pass ``w + x + ...`` to work in simplex
    coordinates.  The caller is responsible for the arguments being
    nonnegative on the region of use, so that the truncated antiderivative
    coincides with ``ptilde`` there.
    """
    total = MultiPoly.constant(0)
    for sign, offset in shifts:
        if sign not in (1, -1):
            raise ValueError("signs must be +1 or -1")
        term = compose_shift(ptilde, base - offset)
        total = total + term if sign == 1 else total - term
    return total * total


def _affine_powers(bound: AffineBound, top: int) -> list:
    poly = bound.as_multipoly()
    powers = [MultiPoly.constant(1)]
    for _ in range(top):
        powers.append(powers[-1] * poly)
    return powers


def integrate_t(f: MultiPoly, lower: AffineBound, upper: AffineBound) -> MultiPoly:
    """Exact ``integral_{lower}^{upper} f dt`` as a polynomial in the other variables."""
    groups = f.coefficients_in_t()
    if not groups:
        return MultiPoly.constant(0)
    top = max(groups) + 1
    up = _affine_powers(upper, top)
    lo = _affine_powers(lower, top)
    out = MultiPoly.constant(0)
    for p in sorted(groups):
        diff = up[p + 1] - lo[p + 1]
        out = out + groups[p] * diff.scale(Fraction(1, p + 1))
    return out


def integrate_t_numeric(fn, lower: float, upper: float, order: int = 40) -> float:
    """Gauss-Legendre reference for a t-integral of a vectorized callable."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    half = 0.5 * (upper - lower)
    ts = half * nodes + 0.5 * (upper + lower)
    return float(half * np.dot(weights, fn(ts)))

