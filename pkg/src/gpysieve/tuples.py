"""Admissible k-tuples: verification with certificates and minimal-diameter search.

A tuple of offsets ``h_1 < ... < h_k`` is admissible when for every prime
``p`` the offsets miss at least one residue class mod ``p``.  Only primes
``p <= k`` need checking, since ``k`` offsets cannot fill more than ``k``
classes.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

from sympy import primerange

__all__ = [
    "AdmissibilityCertificate",
    "BudgetTooSmallError",
    "KTuple",
    "SearchResult",
    "brute_force_min_diameter",
    "is_admissible",
    "min_diameter_tuple",
    "normalize",
]


@dataclass(frozen=True)
class KTuple:
    """Strictly increasing integer offsets."""

    offsets: Tuple[int, ...]

    def __post_init__(self) -> None:
        offs = tuple(int(h) for h in self.offsets)
        if not offs:
            raise ValueError("a tuple needs at least one offset")
        if any(b <= a for a, b in zip(offs, offs[1:])):
            raise ValueError("offsets must be strictly increasing")
        object.__setattr__(self, "offsets", offs)

    @classmethod
    def of(cls, offsets: Iterable[int]) -> "KTuple":
        """Build from any iterable of distinct integers (sorted here)."""
        offs = [int(h) for h in offsets]
        if len(set(offs)) != len(offs):
            raise ValueError("offsets must be distinct")
        return cls(tuple(sorted(offs)))

    @classmethod
    def parse(cls, text: str) -> "KTuple":
        parts = [p.strip() for p in text.replace("{", "").replace("}", "").split(",")]
        return cls.of(int(p) for p in parts if p)

    @property
    def k(self) -> int:
        return len(self.offsets)

    @property
    def diameter(self) -> int:
        return self.offsets[-1] - self.offsets[0]

    def shift(self, c: int) -> "KTuple":
        return KTuple(tuple(h + c for h in self.offsets))

    def __len__(self) -> int:
        return len(self.offsets)

    def __iter__(self):
        return iter(self.offsets)

    def __str__(self) -> str:
        return ",".join(str(h) for h in self.offsets)


def normalize(t: KTuple) -> KTuple:
    """Translate so the first offset is 0."""
    return t.shift(-t.offsets[0])


@dataclass(frozen=True)
class AdmissibilityCertificate:
    """Result of an admissibility check.

    For an inadmissible tuple ``prime`` is a prime whose residue classes are
    all occupied.  For an admissible one ``residues`` maps each prime
    ``p <= k`` to an ``n_p`` with ``n_p + h`` prime to ``p`` for every offset.
    """

    admissible: bool
    prime: Optional[int] = None
    residues: Dict[int, int] = field(default_factory=dict)

    def verify(self, t: KTuple) -> bool:
        """Replay the witness against the definition."""
        if self.admissible:
            primes = list(primerange(2, t.k + 1))
            if sorted(self.residues) != primes:
                return False
            return all((n + h) % p != 0 for p, n in self.residues.items() for h in t.offsets)
        p = self.prime
        if p is None or p > t.k:
            return False
        return {h % p for h in t.offsets} == set(range(p))

    def to_json(self) -> dict:
        if self.admissible:
            return {"admissible": True, "residues": {str(p): n for p, n in self.residues.items()}}
        return {"admissible": False, "prime": self.prime}

    def __str__(self) -> str:
        return "admissible" if self.admissible else f"inadmissible, p={self.prime}"


def is_admissible(t: KTuple) -> AdmissibilityCertificate:
    residues = {}
    for p in primerange(2, t.k + 1):
        occupied = {h % p for h in t.offsets}
        if len(occupied) == p:
            return AdmissibilityCertificate(False, prime=int(p))
        missed = min(set(range(p)) - occupied)
        # n + h = 0 (mod p) only when h = -n, so n_p = -missed avoids every offset.
        residues[int(p)] = (-missed) % p
    return AdmissibilityCertificate(True, residues=residues)


class BudgetTooSmallError(ValueError):
    """No admissible tuple of the requested size fits in the diameter budget."""


@dataclass(frozen=True)
class SearchResult:
    diameter: int
    tuple: KTuple
    exhaustive: bool
    nodes: int = 0

    def to_json(self) -> dict:
        return {"diameter": self.diameter, "tuple": str(self.tuple),
                "exhaustive": self.exhaustive, "nodes": self.nodes}


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


def _lowest_members(mask: int, count: int) -> List[int]:
    out = []
    while mask and len(out) < count:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class _NodeLimit(Exception):
    pass


def _best_at_diameter(k: int, D: int, primes: List[int], limit: List[int]) -> Optional[Tuple[int, ...]]:
    """Lexicographically least admissible k-tuple with offsets 0 and D, or None.

    Any admissible tuple avoids one residue class per prime, so it sits inside
    the survivors of some choice of excluded classes.  The search walks those
    choices prime by prime (smallest first) on a bitmask of candidate
    offsets, pruning as soon as fewer than ``k`` candidates remain.  For each
    complete choice the lexicographically least subset is 0, the next k-2
    survivors, then D.
    """
    full = 0
    for h in range(0, D + 1):
        full |= 1 << h
    class_masks = []
    for p in primes:
        masks = []
        for a in range(p):
            m = 0
            for h in range(a, D + 1, p):
                m |= 1 << h
            masks.append(m)
        class_masks.append(masks)
    must = 1 | (1 << D)
    best: List[Optional[Tuple[int, ...]]] = [None]

    def descend(i: int, alive: int) -> None:
        limit[0] -= 1
        if limit[0] < 0:
            raise _NodeLimit
        if _popcount(alive) < k:
            return
        if i == len(primes):
            inner = _lowest_members(alive & ~must, k - 2)
            cand = tuple([0] + inner + [D]) if k > 1 else (0,)
            if best[0] is None or cand < best[0]:
                best[0] = cand
            return
        for m in class_masks[i]:
            if m & must:
                continue
            descend(i + 1, alive & ~m)

    descend(0, full)
    return best[0]


def _greedy_tuple(k: int, budget: int) -> Optional[Tuple[int, ...]]:
    # Fallback: exclude the sparsest class for each prime, keep the first k survivors.
    alive = list(range(0, budget + 1))
    for p in primerange(2, k + 1):
        counts = [0] * p
        for h in alive:
            counts[h % p] += 1
        drop = min(range(p), key=lambda a: (counts[a], a))
        alive = [h for h in alive if h % p != drop]
    if len(alive) < k:
        return None
    return tuple(h - alive[0] for h in alive[:k])


def min_diameter_tuple(k: int, diameter_budget: int, max_nodes: int = 50_000_000,
                       time_limit: float | None = None) -> SearchResult:
    """Smallest-diameter admissible k-tuple with diameter at most ``diameter_budget``.

    Diameters are tried in increasing order; the first one with an admissible
    tuple is minimal and the result is flagged exhaustive.  If ``max_nodes``
    or ``time_limit`` runs out first, a greedy admissible tuple is returned
    with ``exhaustive=False``.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if diameter_budget < k - 1:
        raise BudgetTooSmallError(f"budget {diameter_budget} is below k-1 = {k - 1}")
    if k == 1:
        return SearchResult(0, KTuple((0,)), True, 0)
    primes = [int(p) for p in primerange(2, k + 1)]
    limit = [max_nodes]
    start = time.perf_counter()
    nodes_used = 0
    try:
        for D in range(k - 1, diameter_budget + 1):
            if time_limit is not None and time.perf_counter() - start > time_limit:
                raise _NodeLimit
            found = _best_at_diameter(k, D, primes, limit)
            if found is not None:
                return SearchResult(D, KTuple(found), True, max_nodes - limit[0])
    except _NodeLimit:
        nodes_used = max_nodes - max(limit[0], 0)
        fallback = _greedy_tuple(k, diameter_budget)
        if fallback is None:
            raise BudgetTooSmallError("search stopped early and no fallback tuple fits the budget")
        return SearchResult(fallback[-1], KTuple(fallback), False, nodes_used)
    raise BudgetTooSmallError(f"no admissible {k}-tuple has diameter <= {diameter_budget}")


def brute_force_min_diameter(k: int, budget: int) -> Tuple[int, KTuple]:
    """Reference search over every k-subset of [0, budget] containing 0.

    Admissibility is checked against every prime up to ``budget + 1``
    directly, without the pigeonhole shortcut.  Only practical for small k.
    """
    from itertools import combinations

    primes = [int(p) for p in primerange(2, max(budget, k) + 2)]
    for D in range(k - 1, budget + 1):
        inner = range(1, D)
        for middle in combinations(inner, k - 2) if k >= 2 else [()]:
            offs = (0,) + middle + ((D,) if k >= 2 else ())
            if all(len({h % p for h in offs}) < p for p in primes):
                return D, KTuple(offs)
    raise BudgetTooSmallError("no admissible tuple in budget")
