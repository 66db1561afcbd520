"""Numerics for sieve-weight bounds on prime and almost-prime patterns.

Submodules: ``exact`` and ``poly`` (rational arithmetic and polynomials),
``gpy`` (exact moments), ``quadrature`` and ``jintegrals`` (adaptive
cubature), ``tuples``, ``bounds``, ``sieve_sim`` and ``cli``.
"""

__version__ = "0.1.0"
