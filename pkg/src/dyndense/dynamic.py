"""Fully dynamic (1 - eps)-approximate densest subgraph.

Every input edge is duplicated ``alpha`` times.  A ladder of threshold
instances with doubling density estimates runs side by side; the *active*
copy is the lowest one whose estimate is still accurate, and copies below it
park surplus edges in pending lists instead of growing their chains.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from sortedcontainers import SortedDict

from ._rational import as_fraction, ceil_log2, duplication_factor
from .lazy_labels import InvariantError, StoreError
from .threshold import ThresholdInstance


def _pair(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


class PendingEdges:
    """Multiset of undirected edges indexed by both endpoints."""

    def __init__(self, n: int):
        self._adj: list[SortedDict] = [SortedDict() for _ in range(n)]
        self.size = 0

    def add(self, u: int, v: int) -> None:
        for a, b in ((u, v), (v, u)):
            d = self._adj[a]
            d[b] = d.get(b, 0) + 1
        self.size += 1

    def _drop(self, u: int, v: int) -> None:
        for a, b in ((u, v), (v, u)):
            d = self._adj[a]
            c = d[b]
            if c == 1:
                del d[b]
            else:
                d[b] = c - 1
        self.size -= 1

    def discard(self, u: int, v: int) -> bool:
        """Remove one copy of ``{u, v}`` if present."""
        if self._adj[u].get(v):
            self._drop(u, v)
            return True
        return False

    def pop_incident(self, w: int) -> Optional[tuple[int, int]]:
        """Remove and return one copy of the edge at ``w`` with the smallest other end."""
        d = self._adj[w]
        if not d:
            return None
        x = d.peekitem(0)[0]
        self._drop(w, x)
        return _pair(w, x)

    def count(self, u: int, v: int) -> int:
        return self._adj[u].get(v, 0)

    def items(self) -> Iterable[tuple[tuple[int, int], int]]:
        for a, d in enumerate(self._adj):
            for b, c in d.items():
                if a < b:
                    yield (a, b), c

    def __len__(self) -> int:
        return self.size


@dataclass
class DynamicStats:
    """Counters kept by the controller; ``flips_last_op`` covers the latest public call."""

    flips_total: int = 0
    flips_last_op: int = 0
    max_round_flips: int = 0
    round_budget_violations: int = 0
    pending_limit_violations: int = 0
    forced_flushes: int = 0
    ladder_growths: int = 0
    max_active_step: int = 0
    per_copy_flips: list[int] = field(default_factory=list)


def normalize_weights(n: int, weights) -> tuple[tuple[Fraction, ...], Fraction]:
    """Scale weights so the lightest is 1; returns them with the original minimum."""
    if weights is None:
        return tuple([Fraction(1)] * n), Fraction(1)
    ws = [as_fraction(w) for w in weights]
    if len(ws) != n:
        raise ValueError(f"expected {n} weights, got {len(ws)}")
    if any(w <= 0 for w in ws):
        raise ValueError("weights must be positive")
    if not ws:
        return (), Fraction(1)
    lo = min(ws)
    return tuple(w / lo for w in ws), lo


@dataclass(frozen=True)
class Ladder:
    """Static parameters shared by every engine: weights, alpha and the level range."""

    n: int
    eps: Fraction
    weights: tuple[Fraction, ...]
    weight_min: Fraction
    alpha: int
    eta_floor: int
    level_lo: int
    level_hi: int

    @classmethod
    def build(cls, n: int, eps, weights=None, alpha: Optional[int] = None, density_cap=None) -> "Ladder":
        """``density_cap`` is an optional a-priori bound on the optimum (input units).

        It trims levels the graph can never reach; an update that outgrows the
        top level still adds a level on demand.
        """
        if n < 1:
            raise ValueError("need at least one vertex")
        eps = as_fraction(eps)
        if not 0 < eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        ws, wmin = normalize_weights(n, weights)
        big_w = max(ws)
        if alpha is None:
            alpha = duplication_factor(n * big_w, eps)
        elif alpha < 1:
            raise ValueError("alpha must be a positive integer")
        weighted = big_w > 1
        level_lo = 1 - ceil_log2(big_w) if weighted else 1
        level_hi = max(1, ceil_log2(Fraction(n)))
        if density_cap is not None:
            cap = as_fraction(density_cap) * wmin / (1 - eps)
            if cap > 0:
                level_hi = min(level_hi, ceil_log2(cap) + 1)
            level_hi = max(level_hi, level_lo)
        return cls(
            n=n,
            eps=eps,
            weights=ws,
            weight_min=wmin,
            alpha=alpha,
            # weighted loads move in steps of 1/w, which need eta >= 2 to keep the gap
            eta_floor=2 if weighted else 1,
            level_lo=level_lo,
            level_hi=level_hi,
        )

    @property
    def W(self) -> Fraction:
        return max(self.weights)

    @property
    def n_weight(self) -> Fraction:
        return self.n * self.W

    def params(self, level: int) -> tuple[Fraction, Fraction]:
        """``(rho_est, eta)`` of a ladder level."""
        rho = Fraction(2) ** (level - 2) * self.alpha
        eta = max(Fraction(2) ** (level - 1), Fraction(self.eta_floor))
        return rho, eta


class DynamicDensest:
    """Maintains a density estimate within a factor ``1 - eps`` of the optimum.

    ``weights`` are positive rationals (normalised internally so the lightest
    vertex weighs 1); ``alpha`` overrides the duplication factor, in which
    case the guarantee becomes empirical.
    """

    engine = "python"

    def __init__(self, n: int, eps, weights=None, alpha: Optional[int] = None, density_cap=None):
        self.ladder = lad = Ladder.build(n, eps, weights, alpha, density_cap)
        self.n = n
        self.eps = lad.eps
        self.weights, self.weight_min = lad.weights, lad.weight_min
        self.W = lad.W
        self.n_weight = lad.n_weight
        self.alpha = lad.alpha
        self.level_hi = lad.level_hi
        self.copies: list[ThresholdInstance] = []
        self.pending: list[PendingEdges] = []
        for level in range(lad.level_lo, lad.level_hi + 1):
            self._add_copy(level)
        self.active = 0
        self.live: Counter = Counter()
        self.stats = DynamicStats(per_copy_flips=[0] * len(self.copies))

    # ------------------------------------------------------------------
    # ladder

    def _add_copy(self, level: int) -> ThresholdInstance:
        rho, eta = self.ladder.params(level)
        t = ThresholdInstance(self.n, rho, self.eps, self.alpha, self.weights, eta=eta)
        self.copies.append(t)
        self.pending.append(PendingEdges(self.n))
        return t

    @property
    def num_copies(self) -> int:
        return len(self.copies)

    def rho_est(self, pos: int) -> Fraction:
        """Estimate of ladder position ``pos`` (1-based); position 0 sits one halving below."""
        if pos == 0:
            return self.copies[0].rho_est / 2
        return self.copies[pos - 1].rho_est

    def copy(self, pos: int) -> ThresholdInstance:
        return self.copies[pos - 1]

    def copy_counters(self, pos: int) -> dict[str, int]:
        t = self.copies[pos - 1]
        return {"inserts": t.inserts, "deletes": t.deletes, "flips": t.flips, "max_chain": t.max_chain}

    def _grow(self, u: int, v: int, rounds: int) -> None:
        """Append a copy one level above the top, replaying every live edge copy."""
        t = self._add_copy(self.level_hi + 1)
        self.level_hi += 1
        self.stats.per_copy_flips.append(0)
        for (a, b), c in sorted(self.live.items()):
            for _ in range(c * self.alpha):
                t.insert(a, b)
        for _ in range(rounds):
            t.insert(u, v)
        self.stats.ladder_growths += 1

    # ------------------------------------------------------------------
    # updates

    def _ins(self, pos: int, u: int, v: int) -> int:
        t = self.copies[pos - 1]
        t.insert(u, v)
        self.stats.per_copy_flips[pos - 1] += t.last_chain
        return t.last_chain

    def _del(self, pos: int, u: int, v: int) -> tuple[int, int]:
        t = self.copies[pos - 1]
        w = t.delete(u, v)
        self.stats.per_copy_flips[pos - 1] += t.last_chain
        return w, t.last_chain

    def _park(self, pos: int, u: int, v: int) -> None:
        t = self.copies[pos - 1]
        limit = 2 * t.rho_est
        # audited at the only entry point of the pending lists
        if t.query_load(u) < limit or t.query_load(v) < limit:
            self.stats.pending_limit_violations += 1
        self.pending[pos - 1].add(u, v)

    def _end_round(self, flips: int) -> None:
        st = self.stats
        if flips > st.max_round_flips:
            st.max_round_flips = flips
        if flips > self.num_copies * (2 * self.alpha + 2):
            st.round_budget_violations += 1

    def insert(self, u: int, v: int) -> None:
        self._check_vertices(u, v)
        if u == v:
            raise StoreError(f"self-loop ({u}, {v}) rejected")
        start = self.active
        total = 0
        for rnd in range(1, self.alpha + 1):
            flips = 0
            for pos in range(self.num_copies, self.active, -1):
                flips += self._ins(pos, u, v)
            a = self.active
            if a == self.num_copies and self.copy(a).query_max_load() >= 2 * self.rho_est(a):
                self._grow(u, v, rnd)
            if a < self.num_copies and self.copy(a + 1).query_max_load() >= 2 * self.rho_est(a):
                self.active = a + 1
            elif a >= 1:
                flips += self._ins(a, u, v)
            for pos in range(self.active - 1, 0, -1):
                t = self.copies[pos - 1]
                limit = 2 * t.rho_est
                if t.query_load(u) >= limit and t.query_load(v) >= limit:
                    self._park(pos, u, v)
                else:
                    flips += self._ins(pos, u, v)
            self._end_round(flips)
            total += flips
        self.live[_pair(u, v)] += 1
        self._finish(start, total)

    def delete(self, u: int, v: int) -> None:
        self._check_vertices(u, v)
        key = _pair(u, v)
        if not self.live.get(key):
            raise StoreError(f"edge ({u}, {v}) is not live")
        start = self.active
        total = 0
        for _ in range(self.alpha):
            flips = 0
            for pos in range(self.num_copies, self.active, -1):
                flips += self._del(pos, u, v)[1]
            a = self.active
            if a >= 1:
                flips += self._del(a, u, v)[1]
                if self.copy(a).query_max_load() < self.rho_est(a):
                    self.active = a - 1
            # walk down from the copy below the pre-decrement active one
            for pos in range(a - 1, 0, -1):
                pend = self.pending[pos - 1]
                if pend.discard(u, v):
                    continue
                w, f = self._del(pos, u, v)
                flips += f
                moved = pend.pop_incident(w)
                if moved is not None:
                    flips += self._ins(pos, *moved)
            b = self.active
            if b >= 1 and len(self.pending[b - 1]):
                flips += self._flush(b)
            self._end_round(flips)
            total += flips
        self.live[key] -= 1
        if not self.live[key]:
            del self.live[key]
        self._finish(start, total)

    def _flush(self, pos: int) -> int:
        pend = self.pending[pos - 1]
        flips = 0
        for (a, b), c in list(pend.items()):
            for _ in range(c):
                pend.discard(a, b)
                flips += self._ins(pos, a, b)
                self.stats.forced_flushes += 1
        return flips

    def _finish(self, start: int, total: int) -> None:
        st = self.stats
        st.flips_last_op = total
        st.flips_total += total
        st.max_active_step = max(st.max_active_step, abs(self.active - start))

    def _check_vertices(self, u: int, v: int) -> None:
        for x in (u, v):
            if not 0 <= x < self.n:
                raise StoreError(f"vertex {x} out of range [0, {self.n})")

    # ------------------------------------------------------------------
    # queries

    def max_load_raw(self) -> Fraction:
        """Maximum load of the active copy, in duplicated normalised units."""
        if self.active == 0:
            return Fraction(0)
        return self.copy(self.active).query_max_load()

    def query_density(self) -> Fraction:
        if self.active == 0:
            return Fraction(0)
        # undo duplication and weight normalisation
        return self.copy(self.active).query_density() / self.alpha / self.weight_min

    def query_subgraph(self) -> set[int]:
        if self.active == 0:
            return set()
        return self.copy(self.active).query_subgraph()

    def num_live_edges(self) -> int:
        return sum(self.live.values())

    def density_of(self, vertices: Iterable[int]) -> Fraction:
        """Exact density of the live graph induced on ``vertices``, in input weight units."""
        s = set(vertices)
        if not s:
            return Fraction(0)
        m = sum(c for (a, b), c in self.live.items() if a in s and b in s)
        return Fraction(m) / (sum(self.weights[x] for x in s) * self.weight_min)

    # ------------------------------------------------------------------
    # full-scan checks

    def check(self) -> None:
        """Raise InvariantError unless every structural invariant holds."""
        for pos, (t, pend) in enumerate(zip(self.copies, self.pending), start=1):
            t.check(gap=True)
            held: Counter = Counter()
            for a, b, c in t.store.edges():
                held[_pair(a, b)] += c
            for key, c in pend.items():
                held[key] += c
            want = Counter({k: c * self.alpha for k, c in self.live.items()})
            if held != want:
                raise InvariantError(f"copy {pos} does not hold alpha copies of every live edge")
            if pos >= self.active and len(pend):
                raise InvariantError(f"copy {pos} at or above the active one has pending edges")
        if self.stats.pending_limit_violations:
            raise InvariantError("an edge was parked below its load limit")

    def window_ok(self) -> bool:
        a = self.active
        if a == 0:
            return True
        load = self.copy(a).query_max_load()
        return self.rho_est(a) <= load <= 2 * self.rho_est(a)
