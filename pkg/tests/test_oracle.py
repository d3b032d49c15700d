import itertools
from fractions import Fraction

import pytest

from dyndense.oracle import (
    OracleLimitError,
    brute_directed,
    brute_undirected,
    pair_density_squared,
    undirected_density,
)


def slow_directed_squared(n, edges):
    best = Fraction(0)
    verts = range(n)
    for ks in range(1, n + 1):
        for s in itertools.combinations(verts, ks):
            for kt in range(1, n + 1):
                for t in itertools.combinations(verts, kt):
                    best = max(best, pair_density_squared(edges, s, t))
    return best


class TestUndirected:
    def test_triangle(self):
        r = brute_undirected(3, [(0, 1), (1, 2), (2, 0)])
        assert r.density == 1
        assert r.witness == {0, 1, 2}

    def test_k4(self):
        edges = list(itertools.combinations(range(4), 2))
        assert brute_undirected(4, edges).density == Fraction(3, 2)

    def test_weighted_edge(self):
        assert brute_undirected(2, [(0, 1)], [1, 3]).density == Fraction(1, 4)

    def test_empty(self):
        assert brute_undirected(4, []).density == 0

    def test_multigraph(self):
        assert brute_undirected(3, [(0, 1), (1, 0), (1, 2)]).density == 1

    def test_witness_achieves_density(self):
        edges = [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)]
        r = brute_undirected(5, edges)
        assert undirected_density(edges, r.witness) == r.density

    def test_guard(self):
        with pytest.raises(OracleLimitError):
            brute_undirected(21, [])


class TestDirected:
    def test_single_edge(self):
        r = brute_directed(2, [(0, 1)])
        assert r.squared == 1
        assert (r.s, r.t) == ({0}, {1})

    def test_out_star(self):
        assert brute_directed(5, [(0, x) for x in range(1, 5)]).squared == 4

    def test_two_cycle(self):
        assert brute_directed(2, [(0, 1), (1, 0)]).squared == 1

    def test_self_loop(self):
        assert brute_directed(1, [(0, 0)]).squared == 1

    def test_empty(self):
        r = brute_directed(3, [])
        assert r.squared == 0 and r.density == 0

    @pytest.mark.parametrize(
        "edges",
        [
            [(0, 1), (0, 2), (1, 2), (2, 0)],
            [(0, 0), (1, 0), (2, 0), (3, 1), (3, 2)],
            [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)],
        ],
    )
    def test_matches_full_enumeration(self, edges):
        assert brute_directed(4, edges).squared == slow_directed_squared(4, edges)

    def test_guard(self):
        with pytest.raises(OracleLimitError):
            brute_directed(11, [])
