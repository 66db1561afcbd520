"""
Exact one-dimensional moments
=============================

The weight polynomial P enters the main terms only through integrals of the
form  int_0^1 P(1-x)^2 x^(k+a) dx.  Expanding P and applying the Beta
identity gives these as exact rationals, so no floating point is involved.
"""
from fractions import Fraction

from gpysieve.exact import beta_integral
from gpysieve.gpy import GpyContext, f_of_y, f_of_y_bound, i0, j1
from gpysieve.poly import SievePolynomial

# %% The weight used throughout: P(t) = 1 + 60t - 300t^2 + 3500t^3, k = 22
P = SievePolynomial.parse("1,60,-300,3500")
ctx = GpyContext(P, 22)
print("P(t) =", P)
print("I0 =", i0(ctx), "~", float(i0(ctx)))
print("J1 =", j1(ctx), "~", float(j1(ctx)))

# %% The Beta identity behind every moment: int x^a (1-x)^b = a! b! / (a+b+1)!
print("B(3,4) =", beta_integral(3, 4))

# %% Moments are quadratic in P, so scaling P by c scales both by c^2
big = GpyContext(P.scale(3), 22)
print("I0(3P) / I0(P) =", i0(big) / i0(ctx))

# %% For a monomial weight, the shifted overlap F(y) sits below its closed-form bound
mono = GpyContext.monomial(22, 2)
for y in (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1)):
    print(f"y={y}:  F={float(f_of_y(mono, y)):.3e}  bound={float(f_of_y_bound(22, 2, y)):.3e}")
