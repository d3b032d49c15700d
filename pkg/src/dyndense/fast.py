"""Compiled engine with the same interface as :class:`DynamicDensest`."""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction
from typing import Optional

import numpy as np

from . import _kernel as K
from ._rational import subgraph_ratio
from .dynamic import DynamicDensest, DynamicStats, Ladder, _pair
from .lazy_labels import InvariantError, StoreError, _scale_for, peel_bands
from .threshold import ChainBudgetError

# dense n x n arrays per copy; beyond this the reference engine is the better fit
MAX_VERTICES = 96
_INT_LIMIT = 1 << 62

_CHECK_NAMES = {
    K.BAD_RING: "in-neighbour ring is malformed",
    K.BAD_MIRROR: "in-neighbour rings and out-neighbour views differ",
    K.BAD_INDEG: "in-degree counters drifted",
    K.BAD_LABEL: "label is not in-degree / weight",
    K.BAD_GAP: "gap constraint broken",
    K.BAD_CONSERVATION: "copy does not hold alpha copies of every live edge",
    K.BAD_PENDING_ABOVE: "copy at or above the active one has pending edges",
    K.BAD_MAXLAB: "cached maximum label is stale",
    K.BAD_PENDING_LIMIT: "an edge was parked below its load limit",
}


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


class FastDynamicDensest:
    """Drop-in replacement for :class:`DynamicDensest` on graphs with few vertices.

    Labels must fit in 63-bit integers; :func:`fits` tells whether a ladder
    qualifies.
    """

    engine = "numba"

    def __init__(self, n: int, eps, weights=None, alpha: Optional[int] = None, density_cap=None):
        lad = Ladder.build(n, eps, weights, alpha, density_cap)
        if n > MAX_VERTICES:
            raise ValueError(f"the compiled engine handles at most {MAX_VERTICES} vertices")
        self.ladder = lad
        self.n = n
        self.eps = lad.eps
        self.weights, self.weight_min = lad.weights, lad.weight_min
        self.W = lad.W
        self.n_weight = lad.n_weight
        self.alpha = lad.alpha
        levels = range(lad.level_lo, lad.level_hi + 1)
        etas = [lad.params(i)[1] for i in levels]
        self.scale = scale = _scale_for(lad.weights, etas[0])
        if any(_scale_for(lad.weights, e) != scale for e in etas):
            raise ValueError("copies disagree on the label scale")
        self._unit_max = max(scale * w.denominator // w.numerator for w in lad.weights)
        k = K.allocate(n, len(etas) + 4)
        k.P[K.P_N] = n
        k.P[K.P_K] = len(etas)
        k.P[K.P_ALPHA] = lad.alpha
        k.P[K.P_LEVEL_HI] = lad.level_hi
        k.P[K.P_ETA_FLOOR] = lad.eta_floor
        k.P[K.P_SCALE] = scale
        for c, level in enumerate(levels):
            rho, eta = lad.params(level)
            k.eta[c] = int(eta * scale)
            k.half[c] = int(eta * scale / 2)
            k.rho[c] = _ceil(rho * scale)
            k.rho2[c] = _ceil(2 * rho * scale)
        k.P[K.P_RHO2_ZERO] = _ceil(lad.params(lad.level_lo)[0] * scale)
        for v, w in enumerate(lad.weights):
            k.unit[v] = scale * w.denominator // w.numerator
        self._k = k
        self.live: Counter = Counter()

    # ------------------------------------------------------------------

    @staticmethod
    def fits(n: int, eps, weights=None, alpha: Optional[int] = None, max_edges: int = 0) -> bool:
        if n > MAX_VERTICES:
            return False
        lad = Ladder.build(n, eps, weights, alpha)
        scale = _scale_for(lad.weights, lad.params(lad.level_lo)[1])
        unit = max(scale * w.denominator // w.numerator for w in lad.weights)
        top = lad.params(lad.level_hi + 8)[0] * scale * 4
        return unit * lad.alpha * max(max_edges, 1) < _INT_LIMIT and top < _INT_LIMIT

    @property
    def active(self) -> int:
        return int(self._k.P[K.P_ACTIVE])

    @property
    def num_copies(self) -> int:
        return int(self._k.P[K.P_K])

    @property
    def level_hi(self) -> int:
        return int(self._k.P[K.P_LEVEL_HI])

    def rho_est(self, pos: int) -> Fraction:
        lad = self.ladder
        if pos == 0:
            return lad.params(lad.level_lo)[0] / 2
        return lad.params(lad.level_lo + pos - 1)[0]

    def eta(self, pos: int) -> Fraction:
        return Fraction(int(self._k.eta[pos - 1]), self.scale)

    @property
    def stats(self) -> DynamicStats:
        S = self._k.S
        return DynamicStats(
            flips_total=int(S[K.S_FLIPS_TOTAL]),
            flips_last_op=int(S[K.S_FLIPS_LAST]),
            max_round_flips=int(S[K.S_MAX_ROUND]),
            round_budget_violations=int(S[K.S_ROUND_VIOL]),
            forced_flushes=int(S[K.S_FORCED]),
            ladder_growths=int(S[K.S_GROWTHS]),
            max_active_step=int(S[K.S_MAX_STEP]),
            pending_limit_violations=int(S[K.S_PEND_VIOL]),
            per_copy_flips=[int(x) for x in self._k.cstat[: self.num_copies, K.C_CTRL_FLIPS]],
        )

    def copy_counters(self, pos: int) -> dict[str, int]:
        row = self._k.cstat[pos - 1]
        return {
            "inserts": int(row[K.C_INSERTS]),
            "deletes": int(row[K.C_DELETES]),
            "flips": int(row[K.C_FLIPS]),
            "max_chain": int(row[K.C_MAX_CHAIN]),
        }

    # ------------------------------------------------------------------
    # updates

    def _check_vertices(self, u: int, v: int) -> None:
        for x in (u, v):
            if not 0 <= x < self.n:
                raise StoreError(f"vertex {x} out of range [0, {self.n})")

    def _raise(self, code: int) -> None:
        c = int(self._k.S[K.S_ERR_COPY]) + 1
        if code == K.ERR_CHAIN:
            raise ChainBudgetError(f"tight chain exceeded its cap in copy {c}")
        if code == K.ERR_ABSENT:
            raise StoreError(f"copy {c} lost track of an edge")
        if code == K.ERR_NEGATIVE:
            raise StoreError(f"a label in copy {c} would become negative")
        raise RuntimeError(f"compiled engine failed with code {code}")

    def insert(self, u: int, v: int) -> None:
        self._check_vertices(u, v)
        if u == v:
            raise StoreError(f"self-loop ({u}, {v}) rejected")
        edges = sum(self.live.values()) + 1
        if self._unit_max * self.alpha * edges >= _INT_LIMIT:
            raise OverflowError("labels would overflow the compiled engine")
        k = self._k
        if k.eta.shape[0] - self.num_copies < 2:
            self._k = k = K.grow_capacity(k, self.num_copies)
        code = K.insert_op(k, u, v)
        if code:
            self._raise(code)
        self.live[_pair(u, v)] += 1

    def delete(self, u: int, v: int) -> None:
        self._check_vertices(u, v)
        key = _pair(u, v)
        if not self.live.get(key):
            raise StoreError(f"edge ({u}, {v}) is not live")
        code = K.delete_op(self._k, u, v)
        if code:
            self._raise(code)
        self.live[key] -= 1
        if not self.live[key]:
            del self.live[key]

    # ------------------------------------------------------------------
    # queries

    def labels(self, pos: int) -> list[Fraction]:
        return [Fraction(int(x), self.scale) for x in self._k.lab[pos - 1]]

    def max_load_raw(self) -> Fraction:
        a = self.active
        if a == 0:
            return Fraction(0)
        return Fraction(int(self._k.maxlab[a - 1]), self.scale)

    def query_density(self) -> Fraction:
        return self.max_load_raw() * (1 - self.eps) / self.alpha / self.weight_min

    def query_subgraph(self) -> set[int]:
        a = self.active
        if a == 0 or self._k.maxlab[a - 1] == 0:
            return set()
        eta = int(self._k.eta[a - 1])
        r = subgraph_ratio(Fraction(eta, self.scale), self.rho_est(a), self.n_weight)
        if r <= 0:
            return set()
        ordered = sorted((int(x), v) for v, x in enumerate(self._k.lab[a - 1]))
        return peel_bands(ordered, self.weights, eta, r)

    def num_live_edges(self) -> int:
        return sum(self.live.values())

    density_of = DynamicDensest.density_of

    def check(self) -> None:
        code = K.check_all(self._k)
        if code:
            c = int(self._k.S[K.S_ERR_COPY]) + 1
            raise InvariantError(f"copy {c}: {_CHECK_NAMES.get(code, code)}")

    def window_ok(self) -> bool:
        a = self.active
        if a == 0:
            return True
        load = self.max_load_raw()
        return self.rho_est(a) <= load <= 2 * self.rho_est(a)

    # ------------------------------------------------------------------
    # raw views for differential tests

    def raw_copy(self, pos: int) -> dict[str, np.ndarray]:
        c = pos - 1
        k = self._k
        return {name: getattr(k, name)[c] for name in ("lab", "cnt", "key", "pend", "icur", "scur")}


def make_densest(
    n: int,
    eps,
    weights=None,
    alpha: Optional[int] = None,
    engine: str = "auto",
    max_edges: Optional[int] = None,
    density_cap=None,
):
    """Construct a controller, choosing the compiled engine when it is safe.

    ``max_edges`` bounds the live multigraph size used for the overflow test;
    it defaults to the number of distinct vertex pairs.
    """
    if engine == "python":
        return DynamicDensest(n, eps, weights, alpha, density_cap)
    bound = max_edges if max_edges is not None else math.comb(n, 2)
    if engine == "numba":
        return FastDynamicDensest(n, eps, weights, alpha, density_cap)
    if engine != "auto":
        raise ValueError(f"unknown engine {engine!r}")
    if FastDynamicDensest.fits(n, eps, weights, alpha, bound):
        return FastDynamicDensest(n, eps, weights, alpha, density_cap)
    return DynamicDensest(n, eps, weights, alpha, density_cap)

