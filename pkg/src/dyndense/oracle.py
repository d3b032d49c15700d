"""Brute-force ground truth for small graphs."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

UNDIRECTED_LIMIT = 20
DIRECTED_LIMIT = 10


class OracleLimitError(ValueError):
    """The graph is too large to enumerate."""


@dataclass(frozen=True)
class DenseResult:
    density: Fraction
    witness: frozenset[int]


@dataclass(frozen=True)
class DirectedResult:
    """Best pair found; ``density`` is ``edges / sqrt(|S| |T|)`` rounded for display only."""

    edges: int
    s: frozenset[int]
    t: frozenset[int]

    @property
    def squared(self) -> Fraction:
        if not self.s:
            return Fraction(0)
        return Fraction(self.edges * self.edges, len(self.s) * len(self.t))

    @property
    def density(self) -> float:
        return math.sqrt(self.squared)


def brute_undirected(n: int, edges: Iterable[tuple[int, int]], weights: Optional[Sequence] = None) -> DenseResult:
    """Exact maximum of |E(S)| / w(S) over nonempty vertex sets S."""
    if n > UNDIRECTED_LIMIT:
        raise OracleLimitError(f"n={n} exceeds the enumeration guard {UNDIRECTED_LIMIT}")
    ws = [Fraction(1)] * n if weights is None else [Fraction(w) for w in weights]
    # adjacency masks with multiplicity, summed per subset incrementally
    mult = Counter()
    for u, v in edges:
        mult[(u, v) if u < v else (v, u)] += 1
    best = DenseResult(Fraction(0), frozenset())
    if n == 0:
        return best
    inner = [0] * (1 << n)
    wsum = [Fraction(0)] * (1 << n)
    nbr = [Counter() for _ in range(n)]
    for (a, b), c in mult.items():
        nbr[a][b] += c
        nbr[b][a] += c
    for mask in range(1, 1 << n):
        low = (mask & -mask).bit_length() - 1
        rest = mask & (mask - 1)
        inner[mask] = inner[rest] + sum(c for x, c in nbr[low].items() if rest >> x & 1)
        wsum[mask] = wsum[rest] + ws[low]
        d = inner[mask] / wsum[mask]
        if d > best.density:
            best = DenseResult(d, frozenset(i for i in range(n) if mask >> i & 1))
    return best


def undirected_density(edges: Iterable[tuple[int, int]], vertices: Iterable[int], weights: Optional[Sequence] = None) -> Fraction:
    s = set(vertices)
    if not s:
        return Fraction(0)
    m = sum(1 for u, v in edges if u in s and v in s)
    w = len(s) if weights is None else sum(Fraction(weights[x]) for x in s)
    return Fraction(m) / w


def brute_directed(n: int, edges: Iterable[tuple[int, int]]) -> DirectedResult:
    """Exact maximum of |E(S, T)| / sqrt(|S| |T|) over nonempty S, T.

    For a fixed S and size k the best T takes the k vertices receiving the
    most edges from S, so only S needs enumerating.
    """
    if n > DIRECTED_LIMIT:
        raise OracleLimitError(f"n={n} exceeds the enumeration guard {DIRECTED_LIMIT}")
    out = [Counter() for _ in range(n)]
    for u, v in edges:
        out[u][v] += 1
    best = DirectedResult(0, frozenset(), frozenset())
    for mask in range(1, 1 << n):
        s = [i for i in range(n) if mask >> i & 1]
        into = Counter()
        for x in s:
            into.update(out[x])
        ranked = sorted(range(n), key=lambda y: (-into[y], y))
        acc = 0
        for k, y in enumerate(ranked, start=1):
            acc += into[y]
            # compare acc^2 / (|S| k) against the best by cross-multiplication
            if acc and (not best.s or acc * acc * len(best.s) * len(best.t) > best.edges ** 2 * len(s) * k):
                best = DirectedResult(acc, frozenset(s), frozenset(ranked[:k]))
    return best


def pair_edges(edges: Iterable[tuple[int, int]], s: Iterable[int], t: Iterable[int]) -> int:
    ss, tt = set(s), set(t)
    return sum(1 for u, v in edges if u in ss and v in tt)


def pair_density_squared(edges: Iterable[tuple[int, int]], s: Iterable[int], t: Iterable[int]) -> Fraction:
    ss, tt = set(s), set(t)
    if not ss or not tt:
        return Fraction(0)
    e = pair_edges(edges, ss, tt)
    return Fraction(e * e, len(ss) * len(tt))
