"""Adaptive Gauss-Kronrod cubature over iterated affine regions in 1-3 dimensions.

A region is described by iterated limits: ``x`` between constants, ``y``
between affine functions of ``x`` and ``z`` between affine functions of
``x, y``.  The region is mapped onto the unit cube, and the cube is
bisected adaptively.  Each cell is integrated with a tensor Kronrod rule
whose embedded Gauss rule supplies the error estimate; the split direction
is the axis where swapping Kronrod for Gauss moves the estimate most.

Cells are refined in a fixed order (largest error first, ties by creation
index), and the final sums are taken in creation order with ``math.fsum``,
so the result is reproducible for a given integrand, region and tolerance.
"""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

import numpy as np

from .poly import AffineBound

__all__ = [
    "DegenerateRegionError",
    "IntegralEstimate",
    "Region",
    "gauss_legendre",
    "integrate",
]

# Gauss-Kronrod pairs on [-1, 1], as tabulated in QUADPACK (qk15, qk7).
_XGK15 = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
])
_WGK15 = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG7 = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])

_XGK7 = np.array([
    0.960491268708020283423507092629080, 0.774596669241483377035853079956480,
    0.434243749346802558002071502844628, 0.000000000000000000000000000000000,
])
_WGK7 = np.array([
    0.104656226026467265193823857192073, 0.268488089868333440728569280666710,
    0.401397414775962222905051818618432, 0.450916538658474142345110087045571,
])
_WG3 = np.array([0.555555555555555555555555555555556, 0.888888888888888888888888888888889])


def _symmetric(half: np.ndarray, odd_sign: float) -> np.ndarray:
    # half lists the nonnegative nodes from the outside in, ending with 0.
    return np.concatenate([odd_sign * half[:-1], half[::-1]])


def _kronrod_rule(name: str) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodes on [0, 1], Kronrod weights, Gauss weights (zero off the Gauss nodes)."""
    if name == "gk15":
        xk, wk, wg_half = _XGK15, _WGK15, _WG7
    elif name == "gk7":
        xk, wk, wg_half = _XGK7, _WGK7, _WG3
    else:
        raise ValueError(f"unknown rule {name!r}")
    nodes = _symmetric(xk, -1.0)
    wkron = _symmetric(wk, 1.0)
    wg = np.zeros_like(xk)
    wg[1::2] = wg_half  # Gauss nodes are the odd entries of the Kronrod list
    wgauss = _symmetric(wg, 1.0)
    return 0.5 * (nodes + 1.0), 0.5 * wkron, 0.5 * wgauss


class DegenerateRegionError(ValueError):
    pass


@dataclass(frozen=True)
class IntegralEstimate:
    value: float
    error_bound: float
    evaluations: int
    method: str = "adaptive"
    converged: bool = True

    def __post_init__(self) -> None:
        if not self.error_bound >= 0:
            raise ValueError("error_bound must be nonnegative")

    def __add__(self, other: "IntegralEstimate") -> "IntegralEstimate":
        return IntegralEstimate(
            self.value + other.value,
            self.error_bound + other.error_bound,
            self.evaluations + other.evaluations,
            self.method if self.method == other.method else "mixed",
            self.converged and other.converged,
        )

    @classmethod
    def total(cls, estimates: Sequence["IntegralEstimate"]) -> "IntegralEstimate":
        if not estimates:
            return cls(0.0, 0.0, 0, "adaptive")
        return cls(
            math.fsum(e.value for e in estimates),
            math.fsum(e.error_bound for e in estimates),
            sum(e.evaluations for e in estimates),
            estimates[0].method if len({e.method for e in estimates}) == 1 else "mixed",
            all(e.converged for e in estimates),
        )

    @property
    def lower(self) -> float:
        return self.value - self.error_bound

    @property
    def upper(self) -> float:
        return self.value + self.error_bound

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "error_bound": self.error_bound,
            "evaluations": self.evaluations,
            "method": self.method,
            "converged": self.converged,
        }


_NAMES = ("x", "y", "z")


@dataclass(frozen=True)
class Region:
    """Iterated region; ``bounds[i]`` limits variable i in terms of the earlier ones."""

    bounds: Tuple[Tuple[AffineBound, AffineBound], ...]

    def __post_init__(self) -> None:
        bounds = tuple((lo, hi) for lo, hi in self.bounds)
        if not 1 <= len(bounds) <= 3:
            raise ValueError("regions have dimension 1 to 3")
        for i, (lo, hi) in enumerate(bounds):
            for b in (lo, hi):
                if b.coeff_w != 0 or any(v not in _NAMES[:i] for v in b.variables()):
                    raise ValueError(f"limit {b} for {_NAMES[i]} may only use {_NAMES[:i]}")
        object.__setattr__(self, "bounds", bounds)

    @classmethod
    def box(cls, *intervals: Tuple[float, float]) -> "Region":
        from fractions import Fraction

        return cls(tuple((AffineBound.of(Fraction(a)), AffineBound.of(Fraction(b))) for a, b in intervals))

    @property
    def dimension(self) -> int:
        return len(self.bounds)

    def map_unit(self, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Map points of the unit cube (shape (n, d)) to the region; returns points and Jacobians."""
        n, d = u.shape
        pts = np.empty((n, d))
        jac = np.ones(n)
        coords = {}
        for i, (lo, hi) in enumerate(self.bounds):
            a = lo.evaluate_float(**coords) * np.ones(n)
            b = hi.evaluate_float(**coords) * np.ones(n)
            width = np.maximum(b - a, 0.0)
            pts[:, i] = a + width * u[:, i]
            jac *= width
            coords[_NAMES[i]] = pts[:, i]
        return pts, jac

    def check_nondegenerate(self) -> None:
        grid = np.linspace(0.05, 0.95, 7)
        u = np.array(list(itertools.product(grid, repeat=self.dimension)))
        _, jac = self.map_unit(u)
        if not np.any(jac > 0):
            raise DegenerateRegionError(f"region {self} has empty interior")

    def __str__(self) -> str:
        return ", ".join(f"{lo} < {v} < {hi}" for v, (lo, hi) in zip(_NAMES, self.bounds))


def _evaluate(f, region: Region, u: np.ndarray) -> np.ndarray:
    pts, jac = region.map_unit(u)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.asarray(f(*(pts[:, i] for i in range(region.dimension))), dtype=float)
        vals = np.broadcast_to(vals, jac.shape)
        out = np.where(jac > 0, vals * jac, 0.0)
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("integrand is not finite inside the region")
    return out


class _Rule:
    def __init__(self, name: str, dim: int):
        nodes, wk, wg = _kronrod_rule(name)
        self.dim = dim
        self.m = len(nodes)
        grids = np.meshgrid(*([nodes] * dim), indexing="ij")
        self.unit_nodes = np.stack([g.ravel() for g in grids], axis=1)
        self.wk = wk
        self.wg = wg

    def _tensor(self, ws: Sequence[np.ndarray]) -> np.ndarray:
        out = ws[0]
        for w in ws[1:]:
            out = np.multiply.outer(out, w)
        return out.ravel()

    def weight_sets(self) -> np.ndarray:
        """Rows: full Kronrod, full Gauss, then Kronrod with Gauss on axis i."""
        rows = [self._tensor([self.wk] * self.dim), self._tensor([self.wg] * self.dim)]
        for i in range(self.dim):
            rows.append(self._tensor([self.wg if j == i else self.wk for j in range(self.dim)]))
        return np.array(rows)


def _process_cells(f, region: Region, rule: _Rule, weights: np.ndarray, cells):
    """Apply the rule to a batch of (lo, hi) cells; returns (values, errors, split axes)."""
    npts = len(rule.unit_nodes)
    u = np.concatenate([lo + (hi - lo) * rule.unit_nodes for lo, hi in cells])
    vals = _evaluate(f, region, u).reshape(len(cells), npts)
    vol = np.array([np.prod(hi - lo) for lo, hi in cells])
    sums = (vals @ weights.T) * vol[:, None]
    kron = sums[:, 0]
    err = np.abs(kron - sums[:, 1])
    axis_err = np.abs(kron[:, None] - sums[:, 2:])
    return kron, err, np.argmax(axis_err, axis=1)


def integrate(
    f: Callable[..., np.ndarray],
    region: Region,
    tol: float = 1e-8,
    max_evals: int = 50_000_000,
    rule: str = "gk15",
    batch: int = 32,
    min_width: float = 2.0 ** -45,
) -> IntegralEstimate:
    """Integrate a vectorized integrand ``f(x[, y[, z]])`` over ``region``.

    Refinement stops when the summed error estimate is at most ``tol``
    (absolute).  If ``max_evals`` integrand evaluations are used first the
    best estimate is returned with ``converged=False`` and its honest error
    estimate.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    region.check_nondegenerate()
    d = region.dimension
    q = _Rule(rule, d)
    weights = q.weight_sets()
    npts = len(q.unit_nodes)

    counter = itertools.count()
    values = {}
    errors = {}
    heap = []
    frozen = set()

    def add(cells):
        kron, err, axes = _process_cells(f, region, q, weights, cells)
        for (lo, hi), v, e, ax in zip(cells, kron, err, axes):
            idx = next(counter)
            values[idx] = float(v)
            errors[idx] = float(e)
            if hi[ax] - lo[ax] > min_width:
                heapq.heappush(heap, (-float(e), idx, lo, hi, int(ax)))
            else:
                frozen.add(idx)

    add([(np.zeros(d), np.ones(d))])
    evals = npts
    total_err = math.fsum(errors.values())
    converged = True
    while total_err > tol:
        if not heap:
            converged = False
            break
        take = min(batch, len(heap))
        if evals + 2 * take * npts > max_evals:
            take = (max_evals - evals) // (2 * npts)
            if take <= 0:
                converged = False
                break
        children = []
        for _ in range(take):
            _, idx, lo, hi, ax = heapq.heappop(heap)
            del values[idx]
            del errors[idx]
            mid = 0.5 * (lo[ax] + hi[ax])
            hi_left = hi.copy()
            hi_left[ax] = mid
            lo_right = lo.copy()
            lo_right[ax] = mid
            children.append((lo, hi_left))
            children.append((lo_right, hi))
        add(children)
        evals += len(children) * npts
        total_err = math.fsum(errors.values())
    order = sorted(values)
    return IntegralEstimate(
        math.fsum(values[i] for i in order),
        math.fsum(errors[i] for i in order),
        evals,
        "adaptive",
        converged,
    )


def gauss_legendre(f: Callable[..., np.ndarray], region: Region, order: int = 10) -> IntegralEstimate:
    """Single-panel tensor Gauss-Legendre rule of the given order.

    Exact (to rounding) for integrands whose mapped form is a polynomial of
    degree at most ``2*order - 1`` in each unit-cube variable.  The error
    bound is the difference from the rule of order ``order - 1``.
    """
    if order < 2:
        raise ValueError("order must be at least 2")
    d = region.dimension

    def apply(n: int) -> float:
        x, w = np.polynomial.legendre.leggauss(n)
        x = 0.5 * (x + 1.0)
        w = 0.5 * w
        grids = np.meshgrid(*([x] * d), indexing="ij")
        u = np.stack([g.ravel() for g in grids], axis=1)
        wt = w
        for _ in range(d - 1):
            wt = np.multiply.outer(wt, w)
        return float(np.dot(wt.ravel(), _evaluate(f, region, u)))

    hi = apply(order)
    lo = apply(order - 1)
    return IntegralEstimate(hi, abs(hi - lo), order ** d + (order - 1) ** d, "fixed-order")
