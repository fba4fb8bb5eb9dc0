"""Matching solver against the exhaustive oracle and its invariants."""

import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricbias.matching import (
    InfeasibleMatchingError,
    Matching,
    MatchingGraph,
    MatchingStructureError,
    SizeLimitError,
    brute_force_matching,
    min_weight_pairs_dense,
    min_weight_perfect_matching,
    read_edge_list,
)


def random_complete(rng, count, high=100.0):
    w = rng.uniform(0.0, high, size=(count, count))
    w = np.triu(w, 1)
    return MatchingGraph.complete_from_matrix(w + w.T)


class TestBasics:
    def test_two_nodes_single_edge(self):
        m = min_weight_perfect_matching(MatchingGraph(2, [(0, 1, 3.7)]))
        assert m.pairs == [(0, 1)]
        assert m.total_weight == pytest.approx(3.7)

    def test_dominant_pairing(self):
        edges = [
            (0, 1, 1.0),
            (2, 3, 1.0),
            (0, 2, 10.0),
            (1, 3, 10.0),
            (0, 3, 10.0),
            (1, 2, 10.0),
        ]
        m = min_weight_perfect_matching(MatchingGraph(4, edges))
        assert m.pairs == [(0, 1), (2, 3)]
        assert m.total_weight == pytest.approx(2.0)

    def test_odd_node_count_rejected(self):
        with pytest.raises(MatchingStructureError):
            min_weight_perfect_matching(MatchingGraph(3, [(0, 1, 1.0)]))

    def test_infeasible_graph(self):
        # path 0-1-2-3 minus middle edge: 1 and 2 cannot both be covered
        graph = MatchingGraph(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)])
        with pytest.raises(InfeasibleMatchingError):
            min_weight_perfect_matching(graph)

    def test_empty_graph(self):
        assert min_weight_perfect_matching(MatchingGraph(0, [])) == Matching([], 0.0)

    def test_self_loop_rejected(self):
        with pytest.raises(MatchingStructureError):
            MatchingGraph(2, [(0, 0, 1.0)])

    def test_duplicate_edge_rejected(self):
        with pytest.raises(MatchingStructureError):
            MatchingGraph(2, [(0, 1, 1.0), (1, 0, 2.0)])

    def test_non_finite_weight_rejected(self):
        with pytest.raises(MatchingStructureError):
            MatchingGraph(2, [(0, 1, float("inf"))])


class TestBruteForce:
    def test_empty(self):
        assert brute_force_matching(MatchingGraph(0, [])) == Matching([], 0.0)

    def test_two_nodes(self):
        m = brute_force_matching(MatchingGraph(2, [(0, 1, 5.0)]))
        assert m.pairs == [(0, 1)]

    def test_size_cap(self):
        with pytest.raises(SizeLimitError):
            brute_force_matching(MatchingGraph(14, []))

    def test_agrees_on_six_node_graphs(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            graph = random_complete(rng, 6)
            a = min_weight_perfect_matching(graph)
            b = brute_force_matching(graph)
            assert a.total_weight == pytest.approx(b.total_weight, abs=1e-9)


class TestOracleEquivalence:
    def test_eight_node_exhaustive(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            graph = random_complete(rng, 8)
            solver = min_weight_perfect_matching(graph)
            oracle = brute_force_matching(graph)
            assert abs(solver.total_weight - oracle.total_weight) <= 1e-9

    def test_integer_weights_exact(self):
        rng = np.random.default_rng(4)
        for _ in range(300):
            count = int(rng.integers(2, 6)) * 2
            w = rng.integers(0, 60, size=(count, count)).astype(float)
            w = np.triu(w, 1)
            graph = MatchingGraph.complete_from_matrix(w + w.T)
            solver = min_weight_perfect_matching(graph)
            oracle = brute_force_matching(graph)
            assert solver.total_weight == oracle.total_weight

    def test_sparse_graphs_including_infeasible(self):
        rng = np.random.default_rng(6)
        agreements = 0
        for _ in range(400):
            count = int(rng.integers(2, 6)) * 2
            edges = []
            for u in range(count):
                for v in range(u + 1, count):
                    if rng.random() < 0.5:
                        edges.append((u, v, float(rng.uniform(0, 50))))
            graph = MatchingGraph(count, edges)
            try:
                solver = min_weight_perfect_matching(graph)
            except InfeasibleMatchingError:
                with pytest.raises(InfeasibleMatchingError):
                    brute_force_matching(graph)
                continue
            oracle = brute_force_matching(graph)
            assert abs(solver.total_weight - oracle.total_weight) <= 1e-9
            agreements += 1
        assert agreements > 100  # the sweep must exercise feasible cases


class TestInvariants:
    @given(st.integers(0, 2**32 - 1), st.floats(0.1, 20.0))
    @settings(max_examples=40, deadline=None)
    def test_scaling_invariance_of_pairs(self, seed, scale):
        rng = np.random.default_rng(seed)
        graph = random_complete(rng, 8)
        scaled = MatchingGraph(
            8, [(u, v, w * scale) for u, v, w in graph.edges]
        )
        assert (
            min_weight_perfect_matching(graph).pairs
            == min_weight_perfect_matching(scaled).pairs
        )

    @given(st.integers(0, 2**32 - 1), st.floats(-5.0, 30.0))
    @settings(max_examples=40, deadline=None)
    def test_translation_covariance(self, seed, shift):
        rng = np.random.default_rng(seed)
        graph = random_complete(rng, 6)
        shifted = MatchingGraph(
            6, [(u, v, w + shift) for u, v, w in graph.edges]
        )
        a = min_weight_perfect_matching(graph)
        b = min_weight_perfect_matching(shifted)
        assert a.pairs == b.pairs
        assert b.total_weight == pytest.approx(a.total_weight + 3 * shift)

    def test_perfect_cover(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            count = int(rng.integers(2, 11)) * 2
            m = min_weight_perfect_matching(random_complete(rng, count))
            covered = sorted(v for pair in m.pairs for v in pair)
            assert covered == list(range(count))

    def test_total_weight_is_float_sum_of_pairs(self):
        rng = np.random.default_rng(12)
        graph = random_complete(rng, 10)
        weights = {(u, v): w for u, v, w in graph.edges}
        m = min_weight_perfect_matching(graph)
        exact = sum(weights[p] for p in m.pairs)
        assert abs(m.total_weight - exact) <= 1e-9 * max(1.0, abs(exact))

    def test_deterministic_repeat(self):
        rng = np.random.default_rng(10)
        graph = random_complete(rng, 10)
        first = min_weight_perfect_matching(graph)
        for _ in range(5):
            assert min_weight_perfect_matching(graph) == first


class TestDensePath:
    def test_matches_edge_list_solver(self):
        rng = np.random.default_rng(14)
        for _ in range(100):
            count = int(rng.integers(1, 8)) * 2
            w = rng.uniform(0, 10, size=(count, count))
            w = np.triu(w, 1)
            w = w + w.T
            pairs = min_weight_pairs_dense(w)
            reference = min_weight_perfect_matching(
                MatchingGraph.complete_from_matrix(w)
            )
            assert sorted((int(u), int(v)) for u, v in pairs) == reference.pairs

    def test_empty_matrix(self):
        assert min_weight_pairs_dense(np.zeros((0, 0))).shape == (0, 2)


class TestEdgeListFormat:
    def test_parse_with_comments(self):
        text = "# header\n0 1 2.5\n\n1 2 3.0  # inline\n"
        graph = read_edge_list(io.StringIO(text))
        assert graph.node_count == 3
        assert graph.edges == [(0, 1, 2.5), (1, 2, 3.0)]

    def test_malformed_line(self):
        with pytest.raises(MatchingStructureError):
            read_edge_list(io.StringIO("0 1\n"))
