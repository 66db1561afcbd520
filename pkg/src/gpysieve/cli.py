"""Command-line entry point: ``gpy <command> ...``.

Every command builds a JSON report (command, inputs, outputs, checks,
timings).  ``--json`` prints it as is; otherwise a plain-text rendering of
the same values is printed.  Exit status is 0 when all checks pass, 1 when a
check fails or a computation raises, and 2 for usage errors.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence

from .exact import format_rational, parse_rational
from .poly import SievePolynomial

REFERENCE_POLY = "1,60,-300,3500"
REFERENCE_TUPLE = "0,6,8,14,18,20,24,30,36,38,44,48,50,56,60,66,74,78,80,84,86,90"
REFERENCE_I0 = Fraction(121351, 59202)
REFERENCE_J1 = Fraction(228380, 18027009)
REFERENCE_J_BOUNDS = {2: 0.041, 3: 0.048, 4: 0.028}
REFERENCE_MARGIN = 0.013
GRID_THETAS = [Fraction(i, 100) for i in range(51, 99)]
GRID_K2 = range(1, 11)


def _real(x: float) -> float:
    """Round to 15 significant digits for stable output."""
    if isinstance(x, float) and math.isfinite(x):
        return float(f"{x:.15g}")
    return x


def _clean(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, float):
        return _real(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


class Report:
    """Collects inputs, outputs, checks and timings for one command."""

    def __init__(self, command: str, inputs: Dict[str, Any]):
        self.command = command
        self.inputs = inputs
        self.outputs: Dict[str, Any] = {}
        self.checks: List[Dict[str, Any]] = []
        self.timings: Dict[str, float] = {}

    def check(self, name: str, ok: Optional[bool], detail: str = "") -> None:
        status = "skipped" if ok is None else ("pass" if ok else "fail")
        self.checks.append({"name": name, "status": status, "detail": detail})

    def timed(self, label: str, fn: Callable[[], Any]) -> Any:
        start = time.perf_counter()
        try:
            return fn()
        finally:
            self.timings[label] = round(time.perf_counter() - start, 3)

    @property
    def failed(self) -> List[str]:
        return [c["name"] for c in self.checks if c["status"] == "fail"]

    def to_json(self, timings: bool = True) -> dict:
        out = {"command": self.command, "inputs": _clean(self.inputs),
               "outputs": _clean(self.outputs), "checks": _clean(self.checks)}
        if timings:
            out["timings"] = self.timings
        return out

    def render(self) -> str:
        data = self.to_json()
        lines = []
        for key, value in data["outputs"].items():
            lines.append(f"{key} = {value if not isinstance(value, (dict, list)) else json.dumps(value)}")
        for c in data["checks"]:
            tail = f"  ({c['detail']})" if c["detail"] else ""
            lines.append(f"[{c['status'].upper()}] {c['name']}{tail}")
        return "\n".join(lines)


def _poly(text: str) -> SievePolynomial:
    try:
        return SievePolynomial.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad polynomial {text!r}: {exc}")


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad rational {text!r}: {exc}")


def _offsets(text: str) -> List[int]:
    text = text.strip().strip("{}")
    if text.strip() == "":
        return []
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad offsets {text!r}: {exc}")


def _count(text: str) -> int:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer {text!r}")
    if value != int(value):
        raise argparse.ArgumentTypeError(f"bad integer {text!r}")
    return int(value)


def _float_list(text: str) -> List[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _apply_thread_cap() -> None:
    cap = os.environ.get("GPY_THREADS")
    if not cap:
        return
    import numba
    try:
        n = max(1, int(cap))
    except ValueError:
        return
    numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


# -- integrals ---------------------------------------------------------------

def _cmd_integrals(args, report: Report) -> None:
    from . import gpy

    ctx = gpy.GpyContext(args.poly, args.k)
    what = args.what
    if what == "i0":
        value = gpy.i0(ctx)
    elif what == "j1":
        value = gpy.j1(ctx)
    elif what == "f":
        if args.l is not None:
            ctx = gpy.GpyContext.monomial(args.k, args.l)
            bound = gpy.f_of_y_bound(args.k, args.l, args.y)
            report.outputs["bound"] = bound
        value = gpy.f_of_y(ctx, args.y)
        if args.l is not None:
            report.check("F <= bound", value <= bound)
    elif what == "idelta":
        if args.l is None:
            raise ValueError("idelta needs --l (P = x**l)")
        value = gpy.i_delta_bound(args.k, args.l, args.delta)
        report.outputs["numeric"] = gpy.i_delta_numeric(gpy.GpyContext.monomial(args.k, args.l), float(args.delta))
    else:
        if args.l is None:
            raise ValueError("q1 needs --l (P = x**l)")
        value = gpy.q1_coefficient_exact(args.theta, args.k1, args.k, args.l)
    report.outputs[what] = value
    report.outputs["decimal"] = float(value)


# -- ej ----------------------------------------------------------------------

def _cmd_ej(args, report: Report) -> None:
    from .gpy import GpyContext
    from .jintegrals import DEFAULT_B, eps_convergence_report, j_pieces
    from .quadrature import IntegralEstimate

    ctx = GpyContext(args.poly, args.k)
    if args.ej_cmd == "compute":
        pieces = report.timed("quadrature", lambda: j_pieces(
            args.r, ctx, DEFAULT_B, args.eps, args.tol, domain=args.domain, max_evals=args.max_evals))
        total = IntegralEstimate.total(list(pieces.values()))
        report.outputs["pieces"] = {name: est.to_json() for name, est in pieces.items()}
        report.outputs[f"J{args.r}"] = total.to_json()
        report.check("converged", all(e.converged for e in pieces.values()))
    else:
        rows = report.timed("quadrature", lambda: eps_convergence_report(
            ctx, DEFAULT_B, args.eps_list, args.tol, rs=args.rs, domain=args.domain, max_evals=args.max_evals))
        report.outputs["rows"] = [row.to_json() for row in rows]


# -- tuples ------------------------------------------------------------------

def _cmd_tuples(args, report: Report) -> None:
    from .tuples import KTuple, is_admissible, min_diameter_tuple

    if args.tuples_cmd == "check":
        t = KTuple.of(args.offsets)
        cert = is_admissible(t)
        report.outputs["tuple"] = str(t)
        report.outputs["result"] = str(cert)
        report.outputs["certificate"] = cert.to_json()
        report.check("admissible", cert.admissible)
    else:
        res = report.timed("search", lambda: min_diameter_tuple(args.k, args.budget, args.max_nodes))
        report.outputs.update(res.to_json())
        report.check("found", True)


# -- bounds ------------------------------------------------------------------

def _cmd_bounds(args, report: Report) -> None:
    from . import bounds

    if args.bounds_cmd == "thm1":
        params = bounds.Theorem1Params.choose(args.theta, args.k2, args.C1, args.C2, args.r)
        margin = bounds.s_margin_thm1(params)
        report.outputs.update(params.to_json())
        report.outputs["delta_decimal"] = float(params.delta)
        report.outputs["margin"] = margin
        report.outputs["r_threshold"] = bounds.r_exact_threshold(params.theta, params.k2)
        report.check("margin_positive", margin > 0)
        report.check("r_condition", bounds.check_r_condition(params.theta, params.r))
    elif args.bounds_cmd == "thm2":
        ev = report.timed("margin", lambda: bounds.evaluate_margin(
            args.poly, args.k, eps=args.eps, tol=args.tol, domain=args.domain, max_evals=args.max_evals))
        report.outputs.update(ev.to_json())
        report.check("margin_lower >= 0.013", ev.margin_lower >= REFERENCE_MARGIN, f"{ev.margin_lower:.6f}")
    else:
        box = args.box
        if len(box) != args.degree + 1:
            raise ValueError("--box needs degree+1 comma-separated lo:hi pairs")
        res = report.timed("optimize", lambda: bounds.optimize_polynomial(
            args.k, args.degree, box, args.budget, start=args.start, eps=args.eps, tol=args.tol))
        report.outputs.update(res.to_json())


def _box(text: str):
    try:
        pairs = []
        for part in text.split(","):
            lo, hi = part.split(":")
            pairs.append((int(lo), int(hi)))
        return pairs
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad box {text!r}; expected lo:hi,lo:hi,...")


# -- sim ---------------------------------------------------------------------

def _cmd_sim(args, report: Report) -> None:
    from .sieve_sim import SieveConfig, compare_with_asymptotics, empirical_sums

    if args.poly is not None and args.poly_l is not None:
        raise ValueError("give at most one of --poly and --poly-l")
    P = args.poly if args.poly is not None else SievePolynomial.monomial(args.poly_l if args.poly_l is not None else 0)
    config = SieveConfig(args.N, args.theta, args.tuple1, args.tuple2, P, args.r)
    sums = report.timed("sieve", lambda: empirical_sums(config, args.segment))
    report.outputs.update(compare_with_asymptotics(config, sums))


# -- verify-paper ------------------------------------------------------------

def _cmd_verify(args, report: Report) -> None:
    from . import bounds
    from .gpy import GpyContext, i0, j1
    from .jintegrals import DEFAULT_B, j_total
    from .tuples import KTuple, is_admissible

    P, k = args.poly, args.k
    is_reference = P == SievePolynomial.parse(REFERENCE_POLY) and k == 22
    ctx = GpyContext(P, k)

    I0 = report.timed("exact", lambda: i0(ctx))
    J1 = j1(ctx)
    report.outputs["I0"] = I0
    report.outputs["J1"] = J1
    report.check("I0 exact", I0 == REFERENCE_I0 if is_reference else None, format_rational(I0))
    report.check("J1 exact", J1 == REFERENCE_J1 if is_reference else None, format_rational(J1))

    js = {}
    for r in (2, 3, 4):
        if r == 4 and args.skip_j4:
            report.check("J4 >= 0.028", None, "skipped by --skip-j4")
            continue
        est = report.timed(f"J{r}", lambda r=r: j_total(r, ctx, DEFAULT_B, args.eps, args.tol,
                                                         domain=args.domain, max_evals=args.max_evals))
        js[r] = est
        report.outputs[f"J{r}"] = est.to_json()
        bound = REFERENCE_J_BOUNDS[r]
        ok = (est.lower >= bound and est.error_bound <= 1e-4 and est.converged) if is_reference else None
        report.check(f"J{r} >= {bound}", ok, f"{est.value:.6f} +/- {est.error_bound:.1e}")

    if 4 in js:
        margin = bounds.s_margin_thm2(k, I0, J1, js[2].value, js[3].value, js[4].value)
        lower = bounds.s_margin_thm2(k, I0, J1, js[2].lower, js[3].lower, js[4].lower)
        report.outputs["margin"] = margin
        report.outputs["margin_lower"] = lower
        report.check("margin >= 0.013", lower >= REFERENCE_MARGIN, f"{lower:.6f}")
    else:
        report.check("margin >= 0.013", None, "needs J4")

    t = KTuple.parse(REFERENCE_TUPLE)
    cert = is_admissible(t)
    report.check("22-tuple admissible", cert.admissible and cert.verify(t), str(cert))

    worst = math.inf
    ok_threshold = True
    ok_r = True
    for th in GRID_THETAS:
        for k2 in GRID_K2:
            params = bounds.Theorem1Params.choose(th, k2)
            worst = min(worst, bounds.s_margin_thm1(params))
            ok_threshold &= bounds.r_exact_threshold(th, k2) < 240 * k2 * k2 / float(2 * th - 1) ** 3
            ok_r &= bounds.check_r_condition(th, params.r)
    report.outputs["theorem1_min_margin"] = worst
    report.check("theorem 1 grid positivity", worst > 0 and ok_threshold, f"min margin {worst:.3e}")
    report.check("r condition grid", ok_r)


# -- parser ------------------------------------------------------------------

def _add_quad_flags(p: argparse.ArgumentParser, tol: float = 1e-5) -> None:
    p.add_argument("--eps", type=float, default=1e-4, help="lower cutoff for the smallest variable")
    p.add_argument("--tol", type=float, default=tol, help="absolute error target for the sum of pieces")
    p.add_argument("--max-evals", type=_count, default=20_000_000, help="integrand evaluations per piece")
    p.add_argument("--domain", choices=("literal", "simplex"), default="literal",
                   help="J4 outer limits taken literally or clipped to the simplex")


def build_parser() -> argparse.ArgumentParser:
    # --json is accepted before or after the subcommand.
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="print the JSON report")
    parser = argparse.ArgumentParser(prog="gpy", description="Sieve integrals, tuples and positivity margins.")
    parser.add_argument("--json", action="store_true", help="print the JSON report")
    _sub = parser.add_subparsers(dest="command", required=True)

    class _Sub:
        # Wrap add_subparsers so every leaf parser inherits the common flags.
        def __init__(self, action):
            self.action = action

        def add_parser(self, name, **kw):
            return self.action.add_parser(name, parents=[common], **kw)

    def nested(p, dest):
        return _Sub(p.add_subparsers(dest=dest, required=True))

    sub = _Sub(_sub)

    p = sub.add_parser("integrals", help="exact one-dimensional moments")
    p.add_argument("what", choices=("i0", "j1", "f", "idelta", "q1"))
    p.add_argument("--k", type=int, default=22)
    p.add_argument("--poly", type=_poly, default=_poly(REFERENCE_POLY), help="coefficients c0,c1,... of P")
    p.add_argument("--y", type=_rational, default=Fraction(1, 2))
    p.add_argument("--l", type=int)
    p.add_argument("--delta", type=_rational, default=Fraction(1, 100))
    p.add_argument("--theta", type=_rational, default=Fraction(3, 4))
    p.add_argument("--k1", type=int, default=1)

    p = sub.add_parser("ej", help="almost-prime integrals J2, J3, J4")
    ej = nested(p, "ej_cmd")
    q = ej.add_parser("compute")
    q.add_argument("--r", type=int, choices=(2, 3, 4), required=True)
    q.add_argument("--k", type=int, default=22)
    q.add_argument("--poly", type=_poly, default=_poly(REFERENCE_POLY))
    _add_quad_flags(q)
    q = ej.add_parser("converge")
    q.add_argument("--k", type=int, default=22)
    q.add_argument("--poly", type=_poly, default=_poly(REFERENCE_POLY))
    q.add_argument("--eps-list", type=_float_list, default=[1e-2, 1e-3, 1e-4])
    q.add_argument("--rs", type=lambda s: [int(v) for v in s.split(",")], default=[2, 3])
    _add_quad_flags(q)

    p = sub.add_parser("tuples", help="admissible tuples")
    tp = nested(p, "tuples_cmd")
    q = tp.add_parser("check")
    q.add_argument("offsets", type=_offsets)
    q = tp.add_parser("search")
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--budget", type=int, required=True)
    q.add_argument("--max-nodes", type=_count, default=50_000_000)

    p = sub.add_parser("bounds", help="theorem margins")
    bp = nested(p, "bounds_cmd")
    q = bp.add_parser("thm1")
    q.add_argument("--theta", type=_rational, required=True)
    q.add_argument("--k2", type=int, required=True)
    q.add_argument("--C1", type=_rational)
    q.add_argument("--C2", type=_rational, default=Fraction(3))
    q.add_argument("--r", type=int)
    q = bp.add_parser("thm2")
    q.add_argument("--k", type=int, default=22)
    q.add_argument("--poly", type=_poly, default=_poly(REFERENCE_POLY))
    _add_quad_flags(q)
    q = bp.add_parser("optimize")
    q.add_argument("--k", type=int, default=22)
    q.add_argument("--degree", type=int, required=True)
    q.add_argument("--box", type=_box, required=True, help="lo:hi per coefficient, comma separated")
    q.add_argument("--budget", type=int, default=20)
    q.add_argument("--start", type=_offsets)
    q.add_argument("--eps", type=float, default=1e-3)
    q.add_argument("--tol", type=float, default=1e-4)

    p = sub.add_parser("sim", help="desk-scale sieve sums")
    sp = nested(p, "sim_cmd")
    q = sp.add_parser("run")
    q.add_argument("--N", type=_count, required=True)
    q.add_argument("--theta", type=float, required=True)
    q.add_argument("--tuple1", type=_offsets, required=True)
    q.add_argument("--tuple2", type=_offsets, default=[])
    q.add_argument("--poly", type=_poly)
    q.add_argument("--poly-l", type=int)
    q.add_argument("--r", type=int, default=1)
    q.add_argument("--segment", type=_count, default=1 << 18)

    p = sub.add_parser("verify-paper", help="run every headline check")
    p.add_argument("--poly", type=_poly, default=_poly(REFERENCE_POLY))
    p.add_argument("--k", type=int, default=22)
    p.add_argument("--skip-j4", action="store_true")
    _add_quad_flags(p)
    return parser


_DISPATCH = {
    "integrals": _cmd_integrals,
    "ej": _cmd_ej,
    "tuples": _cmd_tuples,
    "bounds": _cmd_bounds,
    "sim": _cmd_sim,
    "verify-paper": _cmd_verify,
}


def run(argv: Optional[Sequence[str]] = None) -> tuple[int, Report, bool]:
    """Parse and execute; returns the exit code, the report and whether JSON was requested."""
    args = build_parser().parse_args(argv)
    _apply_thread_cap()
    inputs = {k: v for k, v in vars(args).items() if k not in ("json",)}
    inputs = {k: (str(v) if isinstance(v, SievePolynomial) else v) for k, v in inputs.items()}
    report = Report(" ".join(argv if argv is not None else sys.argv[1:]), inputs)
    try:
        _DISPATCH[args.command](args, report)
    except (ValueError, ArithmeticError) as exc:
        report.outputs["error"] = str(exc)
        report.check("computation", False, str(exc))
        return 1, report, args.json
    return (1 if report.failed else 0), report, args.json


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    code, report, want_json = run(argv)
    if want_json:
        print(json.dumps(report.to_json(), indent=2))
    else:
        print(report.render())
        if report.failed:
            print("failed: " + ", ".join(report.failed), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
