"""
Admissible tuples
=================

A set of offsets is admissible when no prime p <= k covers every residue
class mod p.  Checking returns a certificate that can be replayed; the
search returns the smallest diameter with proof of minimality.
"""
import time

from gpysieve.tuples import KTuple, brute_force_min_diameter, is_admissible, min_diameter_tuple

# %% A failing and a passing example
for text in ("0,2,4", "0,2,6"):
    t = KTuple.parse(text)
    cert = is_admissible(t)
    print(text, "->", cert, cert.residues or "", "| replay ok:", cert.verify(t))

# %% Minimal diameters for small k, cross-checked against an exhaustive subset scan
for k in range(2, 8):
    res = min_diameter_tuple(k, 30)
    ref = brute_force_min_diameter(k, 30)
    print(f"k={k}: diameter {res.diameter}  {res.tuple}  brute force agrees: {ref[0] == res.diameter}")

# %% The 22-tuple of diameter 90 used with the main weight
start = time.perf_counter()
res = min_diameter_tuple(22, 90)
print(f"k=22: diameter {res.diameter}, exhaustive={res.exhaustive}, "
      f"{res.nodes} nodes, {time.perf_counter() - start:.3f}s")
print(res.tuple)
