"""
Margins behind the two bounds
=============================

The general bound picks k, l and r from theta and the number k2 of extra
offsets, then needs a certain expression to be positive.  The specific
bound combines I0, J1 and J2..J4 into one margin that must exceed 0.013.
"""
from fractions import Fraction

from gpysieve.bounds import (
    Theorem1Params,
    evaluate_margin,
    r_exact_threshold,
    s_margin_thm1,
    theorem1_r,
)
from gpysieve.poly import SievePolynomial

# %% Parameter choice and margin at theta = 3/4
params = Theorem1Params.choose(Fraction(3, 4), 1)
print(params.to_json())
print("margin =", s_margin_thm1(params))
print("exact r threshold =", r_exact_threshold(0.75, 1), "chosen r =", theorem1_r(0.75, 1))

# %% The smallest margin over the grid theta = 0.51..0.98, k2 = 1..10
worst = min(
    (s_margin_thm1(Theorem1Params.choose(Fraction(i, 100), k2)), i, k2)
    for i in range(51, 99) for k2 in range(1, 11)
)
print(f"min margin {worst[0]:.3e} at theta=0.{worst[1]}, k2={worst[2]}")

# %% The weighted-count margin for the cubic weight, eps and tol loosened for speed
ev = evaluate_margin(SievePolynomial.parse("1,60,-300,3500"), 22, eps=1e-3, tol=1e-4)
print(f"margin = {ev.margin:.5f} (lower {ev.margin_lower:.5f})")

# %% The constant weight does far worse
flat = evaluate_margin(SievePolynomial.parse("1"), 22, eps=1e-3, tol=1e-4)
print(f"P = 1: margin = {flat.margin:.5f}")
