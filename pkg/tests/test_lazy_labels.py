import random
from fractions import Fraction

import pytest

from dyndense.lazy_labels import InvariantError, OrientationStore, StoreError, peel_bands


def bump(st: OrientationStore, u: int, times: int) -> None:
    for _ in range(times):
        st.increment(u)


class TestEdges:
    def test_fresh_key_is_true_label(self):
        st = OrientationStore(3, 1)
        st.add_edge(0, 1)
        assert st.apparent(0, 1) == 0
        assert st.in_neighbors(1) == [0]

    def test_key_read_at_add_time(self):
        st = OrientationStore(3, 1)
        st.add_edge(0, 1)
        st.increment(1)
        st.add_edge(2, 1)
        assert st.apparent(2, 1) == 1

    def test_parallel_copies(self):
        st = OrientationStore(2, 1)
        st.add_edge(0, 1)
        st.add_edge(0, 1)
        assert st.count(0, 1) == 2
        assert st.in_degree(1) == 2
        assert st.in_neighbors(1) == [0]

    def test_add_then_remove_leaves_nothing(self):
        st = OrientationStore(2, 1)
        st.add_edge(0, 1)
        st.remove_edge(0, 1)
        assert list(st.edges()) == []
        assert st.in_neighbors(1) == []
        st.check()

    def test_remove_one_of_two(self):
        st = OrientationStore(2, 1)
        st.add_edge(0, 1)
        st.add_edge(0, 1)
        st.remove_edge(0, 1)
        assert st.count(0, 1) == 1

    def test_remove_absent(self):
        with pytest.raises(StoreError):
            OrientationStore(2, 1).remove_edge(0, 1)

    def test_self_loop_rejected(self):
        with pytest.raises(StoreError):
            OrientationStore(2, 1).add_edge(1, 1)

    def test_flip(self):
        st = OrientationStore(2, 1)
        st.add_edge(0, 1)
        st.flip_edge(0, 1)
        assert st.count(1, 0) == 1 and st.count(0, 1) == 0

    def test_flip_reads_fresh_label(self):
        st = OrientationStore(2, 1)
        bump(st, 0, 3)
        st.add_edge(0, 1)
        st.flip_edge(0, 1)
        assert st.apparent(1, 0) == 3

    def test_flip_twice_restores(self):
        st = OrientationStore(3, 1)
        st.add_edge(0, 1)
        st.add_edge(2, 1)
        before = sorted(st.edges())
        st.flip_edge(0, 1)
        st.flip_edge(1, 0)
        assert sorted(st.edges()) == before


class TestLabels:
    def test_increment_without_in_neighbours(self):
        st = OrientationStore(2, 1)
        st.increment(0)
        assert st.label(0) == 1
        assert st.touched == 0

    def test_increment_informs_full_ring(self):
        st = OrientationStore(4, 4)
        for x in (1, 2, 3):
            st.add_edge(x, 0)
        st.increment(0)
        # ceil(4 * 3 / 4) = 3 in-neighbours informed
        assert st.touched == 3
        assert all(st.apparent(x, 0) == 1 for x in (1, 2, 3))

    def test_batch_rotates_through_ring(self):
        st = OrientationStore(9, 16)
        for x in range(1, 9):
            st.add_edge(x, 0)
        st.increment(0)
        # ceil(4 * 8 / 16) = 2 neighbours per change
        assert sum(st.apparent(x, 0) == 1 for x in range(1, 9)) == 2
        for _ in range(3):
            st.increment(0)
        assert all(st.apparent(x, 0) >= 1 for x in range(1, 9))

    @pytest.mark.parametrize("eta,k", [(8, 5), (16, 9), (4, 7)])
    def test_staleness_at_fixed_in_degree(self, eta, k):
        st = OrientationStore(k + 1, eta)
        for x in range(1, k + 1):
            st.add_edge(x, 0)
        bump(st, 0, 3 * eta)
        rng = random.Random(eta * 100 + k)
        for _ in range(500):
            if st.label(0) > 0 and rng.random() < 0.5:
                st.decrement(0)
            else:
                st.increment(0)
            assert st.max_staleness() <= -(-eta // 4)

    def test_weighted_increment(self):
        st = OrientationStore(2, 1, [1, 2])
        st.increment(1)
        assert st.label(1) == Fraction(1, 2)

    def test_decrement(self):
        st = OrientationStore(2, 1)
        st.increment(0)
        st.decrement(0)
        assert st.label(0) == 0

    def test_decrement_at_zero(self):
        with pytest.raises(StoreError):
            OrientationStore(2, 1).decrement(0)

    def test_weighted_decrement(self):
        st = OrientationStore(2, 1, [1, 2])
        st.increment(1)
        st.decrement(1)
        assert st.label(1) == 0

    def test_max_label(self):
        st = OrientationStore(3, 1)
        assert st.max_label() == 0
        bump(st, 1, 2)
        bump(st, 2, 5)
        assert st.max_label() == 5

    def test_exact_rational_label(self):
        st = OrientationStore(2, 1, [1, Fraction(2, 3)])
        st.increment(1)
        assert st.label(1) == Fraction(3, 2)


class TestTightNeighbours:
    def test_tight_in(self):
        st = OrientationStore(2, 4)
        bump(st, 0, 5)
        bump(st, 1, 3)
        st.add_edge(1, 0)
        assert st.tight_in_nbr(0) == 1

    def test_no_tight_in(self):
        st = OrientationStore(3, 4)
        bump(st, 0, 5)
        for x in (1, 2):
            bump(st, x, 4)
            st.add_edge(x, 0)
        assert st.tight_in_nbr(0) is None

    def test_tight_in_empty(self):
        assert OrientationStore(2, 4).tight_in_nbr(0) is None

    def test_scan_cursor_stays_on_tight_vertex(self):
        st = OrientationStore(3, 8)
        bump(st, 0, 9)
        st.add_edge(1, 0)
        st.add_edge(2, 0)
        bump(st, 2, 20)
        # ring of 0 is [1, 2]; vertex 1 is tight and must be offered again
        assert st.tight_in_nbr(0) == 1
        assert st.tight_in_nbr(0) == 1

    def test_tight_out(self):
        st = OrientationStore(2, 4)
        bump(st, 1, 3)
        st.add_edge(0, 1)
        bump(st, 0, 1)
        assert st.tight_out_nbr(0) == 1

    def test_no_tight_out(self):
        st = OrientationStore(2, 4)
        bump(st, 1, 2)
        st.add_edge(0, 1)
        bump(st, 0, 1)
        assert st.tight_out_nbr(0) is None

    def test_tight_out_empty(self):
        assert OrientationStore(2, 4).tight_out_nbr(0) is None


class TestMaximalLabelSet:
    def store_with(self, labels, eta=1):
        st = OrientationStore(len(labels), eta)
        for v, d in enumerate(labels):
            bump(st, v, d)
        return st

    def test_stops_when_growth_is_small(self):
        st = self.store_with([5, 5, 4, 1])
        assert st.maximal_label_set(Fraction(1, 2)) == {0, 1, 2}

    def test_all_equal(self):
        st = self.store_with([2, 2, 2])
        assert st.maximal_label_set(Fraction(1, 2)) == {0, 1, 2}

    def test_single_peak(self):
        st = self.store_with([0, 5, 0, 0])
        assert st.maximal_label_set(Fraction(1, 2)) == {1}

    def test_empty_graph(self):
        assert self.store_with([0, 0]).maximal_label_set(Fraction(1, 2)) == set()
        assert OrientationStore(0, 1).maximal_label_set(Fraction(1, 2)) == set()

    def test_ratio_must_be_positive(self):
        with pytest.raises(ValueError):
            peel_bands([(1, 0)], [Fraction(1)], 1, 0)


class TestCheck:
    def test_detects_drifted_label(self):
        st = OrientationStore(2, 1)
        st.add_edge(0, 1)
        with pytest.raises(InvariantError):
            st.check()
        st.increment(1)
        st.check()

    def test_gap_scan(self):
        st = OrientationStore(2, 1)
        st.add_edge(0, 1)
        st.increment(1)
        st.add_edge(0, 1)
        st.increment(1)
        assert st.gap_violations() == [(0, 1)]

    @pytest.mark.parametrize("eta", [0, -1])
    def test_eta_positive(self, eta):
        with pytest.raises(ValueError):
            OrientationStore(2, eta)

    def test_weights_positive(self):
        with pytest.raises(ValueError):
            OrientationStore(2, 1, [1, 0])
