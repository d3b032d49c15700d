"""Directed densest subgraph through a grid of vertex-weighted undirected instances.

For a parameter t, every directed edge u -> v becomes the undirected edge
(u_L, v_R) between a left clone weighing 1/(2t) and a right clone weighing
t/2.  Any set's weighted density in that graph never exceeds the directed
density of the corresponding pair, and some t on a fine enough grid comes
within a factor (1 - eps/2) of the optimum.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ._rational import as_fraction
from .dynamic import DynamicStats
from .fast import make_densest
from .lazy_labels import InvariantError, StoreError


@dataclass(frozen=True)
class DirectedDensityPair:
    s: frozenset[int]
    t: frozenset[int]
    edges: int

    @property
    def squared(self) -> Fraction:
        if not self.s or not self.t:
            return Fraction(0)
        return Fraction(self.edges * self.edges, len(self.s) * len(self.t))

    @property
    def density(self) -> float:
        return math.sqrt(self.squared)


def geometric_grid(n: int, eps) -> list[Fraction]:
    """t_0 = 1/n, t_{k+1} = t_k (1 + eps/2), stopping at the first point >= n."""
    eps = as_fraction(eps)
    ratio = 1 + eps / 2
    t = Fraction(1, n)
    grid = [t]
    while t < n:
        t *= ratio
        grid.append(t)
    return grid


def _round_down_dyadic(x: Fraction, bits: int) -> Fraction:
    """Largest m * 2**e <= x with an integer mantissa of ``bits`` bits."""
    e = x.numerator.bit_length() - x.denominator.bit_length() - bits
    while Fraction(2) ** (e + bits) <= x:
        e += 1
    while Fraction(2) ** (e + bits - 1) > x:
        e -= 1
    m = math.floor(x / Fraction(2) ** e)
    return m * Fraction(2) ** e


def dyadic_grid(n: int, eps) -> list[Fraction]:
    """Grid of short-mantissa binary fractions with consecutive ratio <= 1 + eps/2.

    Each point is the largest representable value not above the previous one
    times (1 + eps/2), so coverage matches the geometric grid while weights
    stay small integers over powers of two.
    """
    eps = as_fraction(eps)
    ratio = 1 + eps / 2
    bits = 2
    # mantissa spacing well below the step keeps every step productive
    while Fraction(1, 2 ** (bits - 1)) > eps / 64:
        bits += 1
    t = _round_down_dyadic(Fraction(1, n), bits)
    grid = [t]
    while t < n:
        nxt = _round_down_dyadic(t * ratio, bits)
        if nxt <= t:
            raise AssertionError("dyadic grid failed to advance")
        t = nxt
        grid.append(t)
    return grid


GRIDS = {"geometric": geometric_grid, "dyadic": dyadic_grid}


class DirectedDensest:
    """(1 - eps)-approximate directed densest pair under edge updates.

    ``grid`` picks the t values: ``"geometric"`` uses exact powers of
    (1 + eps/2), ``"dyadic"`` rounds them to short binary fractions so the
    compiled engine can hold the labels in machine integers.
    """

    def __init__(
        self,
        n: int,
        eps,
        grid: str = "geometric",
        alpha: Optional[int] = None,
        engine: str = "auto",
        parallel: bool = False,
    ):
        if n < 1:
            raise ValueError("need at least one vertex")
        self.n = n
        self.eps = as_fraction(eps)
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        if grid not in GRIDS:
            raise ValueError(f"unknown grid {grid!r}")
        self.grid_kind = grid
        self.grid = GRIDS[grid](n, self.eps)
        inner = self.eps / 2
        self.instances = []
        for t in self.grid:
            weights = [1 / (2 * t)] * n + [t / 2] * n
            # a simple digraph has pair density at most sqrt(|S||T|) <= n
            inst = make_densest(2 * n, inner, weights, alpha, engine=engine, max_edges=n * n, density_cap=n)
            self.instances.append(inst)
        self.live: Counter = Counter()
        self.flips_last_op = 0
        # instances share nothing, so updates may fan out; results are summed in grid order
        self._pool = ThreadPoolExecutor() if parallel else None

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def _apply(self, op: str, u: int, v: int) -> int:
        calls = [getattr(inst, op) for inst in self.instances]
        if self._pool is None:
            for f in calls:
                f(u, self.n + v)
        else:
            for fut in [self._pool.submit(f, u, self.n + v) for f in calls]:
                fut.result()
        return sum(inst.stats.flips_last_op for inst in self.instances)

    def instance_weights(self, k: int) -> tuple[Fraction, Fraction]:
        t = self.grid[k]
        return 1 / (2 * t), t / 2

    def _check(self, u: int, v: int) -> None:
        for x in (u, v):
            if not 0 <= x < self.n:
                raise StoreError(f"vertex {x} out of range [0, {self.n})")

    def insert(self, u: int, v: int) -> None:
        self._check(u, v)
        self.flips_last_op = self._apply("insert", u, v)
        self.live[(u, v)] += 1

    def delete(self, u: int, v: int) -> None:
        self._check(u, v)
        if not self.live.get((u, v)):
            raise StoreError(f"edge {u}->{v} is not live")
        self.flips_last_op = self._apply("delete", u, v)
        self.live[(u, v)] -= 1
        if not self.live[(u, v)]:
            del self.live[(u, v)]

    @property
    def stats(self) -> DynamicStats:
        """Counters summed over instances; per-copy flips are concatenated in grid order."""
        agg = DynamicStats(flips_last_op=self.flips_last_op)
        for inst in self.instances:
            st = inst.stats
            agg.flips_total += st.flips_total
            agg.max_round_flips = max(agg.max_round_flips, st.max_round_flips)
            agg.round_budget_violations += st.round_budget_violations
            agg.pending_limit_violations += st.pending_limit_violations
            agg.forced_flushes += st.forced_flushes
            agg.ladder_growths += st.ladder_growths
            agg.max_active_step = max(agg.max_active_step, st.max_active_step)
            agg.per_copy_flips.extend(st.per_copy_flips)
        return agg

    def num_live_edges(self) -> int:
        return sum(self.live.values())

    def _best(self) -> tuple[int, Fraction]:
        best_k, best = 0, Fraction(0)
        for k, inst in enumerate(self.instances):
            d = inst.query_density()
            if d > best:
                best_k, best = k, d
        return best_k, best

    def query_density(self) -> Fraction:
        return self._best()[1]

    def query_subgraph(self) -> DirectedDensityPair:
        k, best = self._best()
        if best == 0:
            return DirectedDensityPair(frozenset(), frozenset(), 0)
        chosen = self.instances[k].query_subgraph()
        s = frozenset(x for x in chosen if x < self.n)
        t = frozenset(x - self.n for x in chosen if x >= self.n)
        e = sum(c for (a, b), c in self.live.items() if a in s and b in t)
        return DirectedDensityPair(s, t, e)

    def max_load_raw(self) -> Fraction:
        k, _ = self._best()
        return self.instances[k].max_load_raw()

    @property
    def active(self) -> int:
        """Active copy of the best instance."""
        return self.instances[self._best()[0]].active

    def check(self) -> None:
        want = Counter()
        for (a, b), c in self.live.items():
            want[(a, self.n + b)] += c
        for k, inst in enumerate(self.instances):
            if Counter(inst.live) != want:
                raise InvariantError(f"instance {k} does not mirror the live edges")
            inst.check()
