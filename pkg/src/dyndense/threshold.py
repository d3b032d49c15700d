"""Locally stable orientation for a single density estimate.

Each inserted edge is pointed at its lighter endpoint; a maximal chain of
tight edges ending at that endpoint is then flipped so that only the far end
of the chain gains load.  Deletions do the same along tight out-edges.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from ._rational import as_fraction, subgraph_ratio
from .lazy_labels import OrientationStore, StoreError


class ChainBudgetError(RuntimeError):
    """A tight chain grew past 2 * max_label / eta + 2 flips."""


class ThresholdInstance:
    """Orientation of a (duplicated) undirected multigraph for one estimate ``rho_est``.

    ``eta`` defaults to ``2 * rho_est / alpha``.  Loads are reported in the
    weight-normalised, duplicated units; rescaling is the caller's job.
    """

    def __init__(self, n: int, rho_est, eps, alpha: int, weights=None, eta=None):
        self.rho_est = as_fraction(rho_est)
        self.eps = as_fraction(eps)
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        if alpha < 1:
            raise ValueError("alpha must be a positive integer")
        if self.rho_est <= 0:
            raise ValueError("rho_est must be positive")
        self.alpha = alpha
        self.eta = as_fraction(eta) if eta is not None else 2 * self.rho_est / alpha
        self.store = OrientationStore(n, self.eta, weights)
        ws = self.store.weights
        self.n_weight = n * max(ws) / min(ws) if ws else Fraction(0)
        self.inserts = 0
        self.deletes = 0
        self.flips = 0
        self.last_chain = 0
        self.max_chain = 0

    @property
    def n(self) -> int:
        return self.store.n

    def _cap(self) -> int:
        # chain-length cap 2 * max_label / eta + 2, as an integer
        st = self.store
        return (2 * st.max_label_scaled()) // st._eta + 2

    def _note(self, chain: int) -> None:
        self.last_chain = chain
        self.flips += chain
        if chain > self.max_chain:
            self.max_chain = chain

    def insert(self, u: int, v: int) -> int:
        """Insert one copy of edge ``{u, v}``; returns the number of flips."""
        if u == v:
            raise StoreError(f"self-loop ({u}, {v}) rejected")
        st = self.store
        lab = st._lab
        if lab[u] >= lab[v]:
            st.add_edge(u, v)
            w = v
        else:
            st.add_edge(v, u)
            w = u
        cap = self._cap()
        chain = 0
        while True:
            x = st.tight_in_nbr(w)
            if x is None:
                break
            st.flip_edge(x, w)
            w = x
            chain += 1
            if chain > cap:
                raise ChainBudgetError(f"insert chain exceeded {cap} flips")
        st.increment(w)
        self.inserts += 1
        self._note(chain)
        return chain

    def delete(self, u: int, v: int) -> int:
        """Delete one copy of edge ``{u, v}``; returns the vertex whose load dropped."""
        st = self.store
        if st._cnt[u].get(v):
            st.remove_edge(u, v)
            w = v
        elif st._cnt[v].get(u):
            st.remove_edge(v, u)
            w = u
        else:
            raise StoreError(f"edge ({u}, {v}) is not present")
        cap = self._cap()
        chain = 0
        while True:
            x = st.tight_out_nbr(w)
            if x is None:
                break
            st.flip_edge(w, x)
            w = x
            chain += 1
            if chain > cap:
                raise ChainBudgetError(f"delete chain exceeded {cap} flips")
        st.decrement(w)
        self.deletes += 1
        self._note(chain)
        return w

    def orientation(self, u: int, v: int) -> tuple[int, int]:
        """Copies of the pair oriented ``u -> v`` and ``v -> u``."""
        return self.store.count(u, v), self.store.count(v, u)

    def query_load(self, u: int) -> Fraction:
        return self.store.label(u)

    def query_max_load(self) -> Fraction:
        return self.store.max_label()

    def query_density(self) -> Fraction:
        return self.store.max_label() * (1 - self.eps)

    def subgraph_ratio(self) -> Fraction:
        return subgraph_ratio(self.eta, self.rho_est, self.n_weight)

    def query_subgraph(self) -> set[int]:
        if self.store.max_label_scaled() == 0:
            return set()
        r = self.subgraph_ratio()
        if r <= 0:
            # a single vertex cannot carry load; nothing to peel
            return set()
        return self.store.maximal_label_set(r)

    def num_edges(self) -> int:
        return self.store.num_edges()

    def check(self, gap: bool = True) -> None:
        """Full-scan check of the store plus the local gap constraint."""
        from .lazy_labels import InvariantError

        self.store.check()
        if gap:
            bad = self.store.gap_violations()
            if bad:
                raise InvariantError(f"gap constraint broken on {bad[:5]}")

    def chain_cap_ok(self, chain: Optional[int] = None) -> bool:
        chain = self.last_chain if chain is None else chain
        return chain <= self._cap()
