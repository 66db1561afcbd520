"""
Almost-prime integrals J2, J3, J4
=================================

Each J_r is a sum of pieces: an exact polynomial integral in t, done
symbolically, followed by an adaptive Gauss-Kronrod cubature over the
remaining one to three variables.  The smallest variable is cut off at eps.
Running this file takes about ten seconds, mostly J4.
"""
import time

from gpysieve.gpy import GpyContext
from gpysieve.jintegrals import DEFAULT_B, catalogue, eps_convergence_report, j_pieces, j_total
from gpysieve.poly import SievePolynomial

ctx = GpyContext(SievePolynomial.parse("1,60,-300,3500"), 22)

# %% The pieces for J3 and their integration regions
for spec in catalogue(3):
    print(spec.name, "dimension", spec.region.dimension)

# %% Piecewise values with error estimates
for r in (2, 3, 4):
    start = time.perf_counter()
    pieces = j_pieces(r, ctx, eps=1e-4, tol=1e-5)
    total = j_total(r, ctx, eps=1e-4, tol=1e-5)
    print(f"J{r} = {total.value:.7f} +/- {total.error_bound:.1e}  "
          f"[{', '.join(p for p in pieces)}]  {time.perf_counter() - start:.1f}s")

# %% Shrinking eps only adds nonnegative mass, so the values creep upward
for row in eps_convergence_report(ctx, DEFAULT_B, [1e-2, 1e-3, 1e-4], tol=1e-6, rs=(2, 3)):
    print(f"eps={row.eps:g}", {r: round(est.value, 7) for r, est in row.values.items()})

# %% J4 over the clipped simplex domain, for comparison with the default limits
clipped = j_total(4, ctx, eps=1e-4, tol=1e-5, domain="simplex")
print(f"J4 (simplex-clipped) = {clipped.value:.7f} +/- {clipped.error_bound:.1e}")
