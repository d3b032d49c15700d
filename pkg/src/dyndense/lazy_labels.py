"""Directed multigraph with lazily propagated vertex labels.

A vertex's label is its in-degree divided by its weight.  Each vertex keeps

* a ring of its distinct in-neighbours, walked by two independent round-robin
  cursors: one for pushing its label to in-neighbours, one for scanning them;
* a max-priority queue of its out-neighbours keyed by the *apparent* label,
  i.e. the value the out-neighbour last reported.

Labels are stored as integers scaled by a common factor so that every
threshold comparison is an exact integer comparison.
"""

from __future__ import annotations

import heapq
import math
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

from sortedcontainers import SortedList

from ._rational import as_fraction


class StoreError(Exception):
    """Raised for bookkeeping errors such as removing an absent edge."""


class InvariantError(AssertionError):
    """A full-scan consistency check failed."""


def _scale_for(weights: Sequence[Fraction], eta: Fraction) -> int:
    scale = 4 * eta.denominator
    for w in weights:
        scale = math.lcm(scale, w.numerator)
    return scale


def peel_bands(labels: Sequence[tuple[int, int]], weights: Sequence[Fraction], eta: int, r) -> set[int]:
    """Band peeling over an ascending sequence of ``(scaled_label, vertex)``.

    With m the top label, take A = {d >= m - eta} and B = {d >= m - 2 eta};
    while w(B) >= (1 + r) w(A) lower m by eta and repeat.  Returns the last B.
    """
    r = as_fraction(r)
    if r <= 0:
        raise ValueError("r must be positive")
    if not labels or labels[-1][0] == 0:
        return set()
    grow = 1 + r
    m = labels[-1][0]
    taken: list[int] = []
    idx = len(labels) - 1
    weight_b = Fraction(0)

    def extend(limit: int) -> None:
        nonlocal idx, weight_b
        while idx >= 0 and labels[idx][0] >= limit:
            v = labels[idx][1]
            taken.append(v)
            weight_b += weights[v]
            idx -= 1

    while True:
        extend(m - eta)
        weight_a = weight_b
        extend(m - 2 * eta)
        m -= eta
        if weight_b < grow * weight_a:
            break
    return set(taken)


class OrientationStore:
    """Directed multigraph on vertices ``0..n-1`` with exact labels.

    Parallel copies of an edge collapse into a multiplicity: a vertex occupies
    a single slot in its head's in-neighbour ring and holds one apparent key.
    """

    def __init__(self, n: int, eta, weights: Optional[Iterable] = None):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        eta = as_fraction(eta)
        if eta <= 0:
            raise ValueError("eta must be positive")
        if weights is None:
            ws = [Fraction(1)] * n
        else:
            ws = [as_fraction(w) for w in weights]
            if len(ws) != n:
                raise ValueError(f"expected {n} weights, got {len(ws)}")
            if any(w <= 0 for w in ws):
                raise ValueError("weights must be positive")
        self.n = n
        self.eta = eta
        self.weights: tuple[Fraction, ...] = tuple(ws)
        self.scale = _scale_for(ws, eta)
        scale = self.scale
        # label step of each vertex, scaled: scale / weight
        self._unit = [scale * w.denominator // w.numerator for w in ws]
        self._eta = int(eta * scale)
        self._half = self._eta // 2
        self._lab = [0] * n
        self._indeg = [0] * n
        self._cnt: list[dict[int, int]] = [{} for _ in range(n)]
        self._nxt: list[dict[int, int]] = [{} for _ in range(n)]
        self._prv: list[dict[int, int]] = [{} for _ in range(n)]
        self._icur = [-1] * n
        self._scur = [-1] * n
        self._key: list[dict[int, int]] = [{} for _ in range(n)]
        self._heap: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        self._labels = SortedList((0, v) for v in range(n))
        # touched-element counter, used by the cost tests
        self.touched = 0

    # ------------------------------------------------------------------
    # ring of distinct in-neighbours

    def _ring_insert(self, v: int, x: int) -> None:
        nxt, prv = self._nxt[v], self._prv[v]
        c = self._icur[v]
        if c < 0:
            nxt[x] = x
            prv[x] = x
            self._icur[v] = x
            self._scur[v] = x
            return
        p = prv[c]
        nxt[p] = x
        prv[x] = p
        nxt[x] = c
        prv[c] = x

    def _ring_remove(self, v: int, x: int) -> None:
        nxt, prv = self._nxt[v], self._prv[v]
        after = nxt.pop(x)
        before = prv.pop(x)
        if after == x:
            self._icur[v] = -1
            self._scur[v] = -1
            return
        nxt[before] = after
        prv[after] = before
        if self._icur[v] == x:
            self._icur[v] = after
        if self._scur[v] == x:
            self._scur[v] = after

    def _batch(self, k: int) -> int:
        # ceil(4k / eta), in scaled integers
        return min(k, -(-4 * k * self.scale // self._eta))

    # ------------------------------------------------------------------
    # edges

    def add_edge(self, u: int, v: int) -> None:
        """Add one copy of ``u -> v``; u's key for v becomes v's true label."""
        if u == v:
            raise StoreError(f"self-loop {u}->{v} rejected")
        cnt = self._cnt[u]
        c = cnt.get(v, 0)
        cnt[v] = c + 1
        self._indeg[v] += 1
        if not c:
            self._ring_insert(v, u)
        lab = self._lab[v]
        self._key[u][v] = lab
        self._push(u, lab, v)

    def remove_edge(self, u: int, v: int) -> None:
        cnt = self._cnt[u]
        c = cnt.get(v, 0)
        if not c:
            raise StoreError(f"edge {u}->{v} is not present")
        if c == 1:
            del cnt[v]
            del self._key[u][v]
            self._ring_remove(v, u)
        else:
            cnt[v] = c - 1
        self._indeg[v] -= 1

    def flip_edge(self, u: int, v: int) -> None:
        """Turn one copy of ``u -> v`` into ``v -> u``."""
        self.remove_edge(u, v)
        self.add_edge(v, u)

    def count(self, u: int, v: int) -> int:
        """Number of copies of ``u -> v``."""
        return self._cnt[u].get(v, 0)

    def in_degree(self, u: int) -> int:
        return self._indeg[u]

    def in_neighbors(self, u: int) -> list[int]:
        """Distinct in-neighbours in ring order, starting at the inform cursor."""
        return list(self._walk(u, self._icur[u], len(self._nxt[u])))

    def edges(self) -> Iterator[tuple[int, int, int]]:
        """Yield ``(u, v, copies)`` for every oriented pair present."""
        for u, cnt in enumerate(self._cnt):
            for v, c in cnt.items():
                yield u, v, c

    def num_edges(self) -> int:
        return sum(self._indeg)

    def apparent(self, u: int, v: int) -> Fraction:
        """v's label as last reported to u."""
        return Fraction(self._key[u][v], self.scale)

    # ------------------------------------------------------------------
    # labels

    def _push(self, u: int, lab: int, v: int) -> None:
        heap = self._heap[u]
        heapq.heappush(heap, (-lab, v))
        if len(heap) > 2 * len(self._key[u]) + 8:
            keys = self._key[u]
            heap[:] = [(-k, x) for x, k in keys.items()]
            heapq.heapify(heap)

    def _walk(self, u: int, start: int, steps: int) -> Iterator[int]:
        nxt = self._nxt[u]
        x = start
        for _ in range(steps):
            yield x
            x = nxt[x]

    def _relabel(self, u: int, new: int) -> None:
        labels = self._labels
        labels.remove((self._lab[u], u))
        labels.add((new, u))
        self._lab[u] = new
        k = len(self._nxt[u])
        if not k:
            return
        b = self._batch(k)
        nxt = self._nxt[u]
        key = self._key
        x = self._icur[u]
        for _ in range(b):
            key[x][u] = new
            self._push(x, new, u)
            x = nxt[x]
        self._icur[u] = x
        self.touched += b

    def increment(self, u: int) -> None:
        """Raise u's label by 1/weight and inform the next batch of in-neighbours."""
        self._relabel(u, self._lab[u] + self._unit[u])

    def decrement(self, u: int) -> None:
        new = self._lab[u] - self._unit[u]
        if new < 0:
            raise StoreError(f"label of {u} would become negative")
        self._relabel(u, new)

    def tight_in_nbr(self, u: int) -> Optional[int]:
        """Scan the next batch of in-neighbours for one with label <= d(u) - eta/2.

        The scan cursor only moves past vertices found slack, so a tight
        in-neighbour with many parallel copies is revisited until it is not.
        """
        k = len(self._nxt[u])
        if not k:
            return None
        b = self._batch(k)
        self.touched += b
        lab = self._lab
        thr = lab[u] - self._half
        nxt = self._nxt[u]
        x = self._scur[u]
        for _ in range(b):
            if lab[x] <= thr:
                # stay on x: it is re-examined first on the next call
                self._scur[u] = x
                return x
            x = nxt[x]
        self._scur[u] = x
        return None

    def tight_out_nbr(self, u: int) -> Optional[int]:
        """Return the max-key out-neighbour if its apparent label is >= d(u) + eta/2."""
        heap = self._heap[u]
        keys = self._key[u]
        while heap:
            negk, v = heap[0]
            if keys.get(v) == -negk:
                if -negk >= self._lab[u] + self._half:
                    return v
                return None
            heapq.heappop(heap)
        return None

    def label(self, u: int) -> Fraction:
        return Fraction(self._lab[u], self.scale)

    def max_label(self) -> Fraction:
        if not self.n:
            return Fraction(0)
        return Fraction(self._labels[-1][0], self.scale)

    def max_label_scaled(self) -> int:
        return self._labels[-1][0] if self.n else 0

    def maximal_label_set(self, r) -> set[int]:
        """Peel label bands of width eta from the top until the weight stops growing by 1 + r.

        Walks the ordered label index from the maximum, so the cost is the
        size of the returned set plus a logarithmic search.
        """
        if not self.n:
            return set()
        taken = peel_bands(self._labels, self.weights, self._eta, r)
        self.touched += len(taken)
        return taken

    # ------------------------------------------------------------------
    # full-scan checks (test support)

    def check(self) -> None:
        """Verify the mirror, label-count and load-conservation invariants."""
        n = self.n
        ring_pairs = {}
        for v in range(n):
            nxt, prv = self._nxt[v], self._prv[v]
            if set(nxt) != set(prv):
                raise InvariantError(f"ring links of {v} disagree")
            if nxt:
                seen = list(self._walk(v, self._icur[v], len(nxt)))
                if set(seen) != set(nxt):
                    raise InvariantError(f"ring of {v} is not a single cycle")
                if self._scur[v] not in nxt:
                    raise InvariantError(f"scan cursor of {v} is off the ring")
            elif self._icur[v] != -1 or self._scur[v] != -1:
                raise InvariantError(f"empty ring of {v} keeps a cursor")
            for x in nxt:
                ring_pairs[(x, v)] = True
        out_pairs = {}
        indeg = [0] * n
        for u in range(n):
            for v, c in self._cnt[u].items():
                if c <= 0:
                    raise InvariantError(f"nonpositive multiplicity on {u}->{v}")
                out_pairs[(u, v)] = True
                indeg[v] += c
            if set(self._key[u]) != set(self._cnt[u]):
                raise InvariantError(f"out-neighbour keys of {u} disagree with its edges")
        if ring_pairs.keys() != out_pairs.keys():
            raise InvariantError("in-neighbour rings and out-neighbour views differ")
        if indeg != self._indeg:
            raise InvariantError("in-degree counters drifted")
        if len(self._labels) != n:
            raise InvariantError("label index does not hold one entry per vertex")
        if sorted(self._labels) != sorted((self._lab[v], v) for v in range(n)):
            raise InvariantError("label index disagrees with vertex labels")
        for v in range(n):
            if self._lab[v] != self._indeg[v] * self._unit[v]:
                raise InvariantError(f"label of {v} is not in-degree / weight")

    def gap_violations(self) -> list[tuple[int, int]]:
        """Oriented pairs u->v with d(v) > d(u) + eta."""
        lab, eta = self._lab, self._eta
        return [(u, v) for u, v, _ in self.edges() if lab[v] > lab[u] + eta]

    def max_staleness(self) -> Fraction:
        """Largest |d_u(v) - d(v)| over present pairs."""
        worst = 0
        for u in range(self.n):
            for v, k in self._key[u].items():
                worst = max(worst, abs(k - self._lab[v]))
        return Fraction(worst, self.scale)
