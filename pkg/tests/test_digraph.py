import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.sparse.csgraph import connected_components

from aas.digraph import (
    DirectedGraph,
    FormatError,
    NumericalFailure,
    condensation,
    is_strongly_connected_spectral,
    read_edge_list,
    scc_spectral,
    scc_tarjan,
    shortest_path_node_counts,
    write_edge_list,
)
from aas import digraph


def random_graph(rng, n, p):
    a = (rng.random((n, n)) < p).astype(np.int8)
    np.fill_diagonal(a, 0)
    return DirectedGraph.from_adjacency(a)


@st.composite
def digraphs(draw, max_n=12):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return DirectedGraph(n, [e for e, keep in zip(pairs, mask) if keep])


def cycle(n):
    return DirectedGraph(n, [(i, (i + 1) % n) for i in range(n)])


class TestGraph:
    def test_rejects_self_loop(self):
        with pytest.raises(ValueError):
            DirectedGraph(2, [(1, 1)])

    def test_rejects_non_binary_adjacency(self):
        with pytest.raises(ValueError):
            DirectedGraph.from_adjacency([[0, 2], [0, 0]])

    def test_adjacency_read_only(self):
        g = cycle(3)
        with pytest.raises(ValueError):
            g.adjacency[0, 1] = 0

    def test_asymmetric(self):
        g = DirectedGraph(2, [(0, 1)])
        assert g.adjacency[0, 1] == 1 and g.adjacency[1, 0] == 0


class TestTarjan:
    def test_cycle(self):
        assert scc_tarjan(cycle(3)).components == [[0, 1, 2]]

    def test_path(self):
        d = scc_tarjan(DirectedGraph(3, [(0, 1), (1, 2)]))
        assert d.as_partition() == {frozenset({0}), frozenset({1}), frozenset({2})}

    def test_empty(self):
        assert len(scc_tarjan(DirectedGraph(4))) == 4

    def test_deep_path_no_recursion_error(self):
        n = 5000
        d = scc_tarjan(DirectedGraph(n, [(i, i + 1) for i in range(n - 1)]))
        assert len(d) == n

    def test_matches_scipy(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            g = random_graph(rng, int(rng.integers(1, 30)), rng.uniform(0.02, 0.3))
            ncomp, lab = connected_components(g.adjacency, directed=True, connection="strong")
            ref = {frozenset(np.flatnonzero(lab == c).tolist()) for c in range(ncomp)}
            assert scc_tarjan(g).as_partition() == ref


class TestSpectral:
    def test_cycle_uniform_centrality(self):
        d = scc_spectral(cycle(3))
        assert d.components == [[0, 1, 2]]
        np.testing.assert_allclose(d.centrality, [1 / 3] * 3, atol=1e-12)

    def test_path_peels_from_sink(self):
        d = scc_spectral(DirectedGraph(3, [(0, 1), (1, 2)]))
        assert d.components == [[2], [1], [0]]
        assert d.peel_order == [0, 1, 2]
        np.testing.assert_array_equal(d.centrality, [1.0, 1.0, 1.0])

    def test_star_centrality(self):
        # hub 0 <-> leaves 1..3: stationary mass proportional to in-flow
        g = DirectedGraph(4, [(0, i) for i in (1, 2, 3)] + [(i, 0) for i in (1, 2, 3)])
        d = scc_spectral(g)
        np.testing.assert_allclose(d.centrality, [0.5, 1 / 6, 1 / 6, 1 / 6], atol=1e-12)

    def test_two_sinks_same_round(self):
        # 0 feeds two separate 2-cycles
        g = DirectedGraph(5, [(0, 1), (0, 3), (1, 2), (2, 1), (3, 4), (4, 3)])
        d = scc_spectral(g)
        assert d.components == [[1, 2], [3, 4], [0]]
        assert d.peel_order == [0, 0, 1]
        np.testing.assert_allclose(d.centrality[1:], 0.5, atol=1e-12)

    def test_random_graphs_match_tarjan(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            g = random_graph(rng, int(rng.integers(1, 41)), rng.uniform(0.05, 0.3))
            assert scc_spectral(g).as_partition() == scc_tarjan(g).as_partition()

    @settings(max_examples=150, deadline=None)
    @given(digraphs())
    def test_partition_and_centrality_invariants(self, g):
        d = scc_spectral(g)
        assert d.as_partition() == scc_tarjan(g).as_partition()
        assert sorted(u for c in d.components for u in c) == list(range(g.n))
        for comp in d.components:
            assert np.all(d.centrality[comp] > 0)
            assert abs(d.centrality[comp].sum() - 1.0) < 1e-10
            assert comp == sorted(comp)

    def test_null_dimension_counts_sink_components(self):
        rng = np.random.default_rng(5)
        checked = 0
        for _ in range(100):
            g = random_graph(rng, int(rng.integers(2, 30)), rng.uniform(0.1, 0.3))
            if np.any(g.out_degree() == 0):
                continue
            basis = digraph._left_fixed_space(g.adjacency.astype(float))
            cg = condensation(g, scc_tarjan(g))
            out = {j for j, _ in cg.dag_edges}
            n_sinks = sum(1 for j in range(cg.c) if j not in out)
            assert basis.shape[1] == n_sinks
            checked += 1
        assert checked > 20

    def test_empty_null_space_raises(self, monkeypatch):
        monkeypatch.setattr(digraph, "_left_fixed_space", lambda adj: np.zeros((adj.shape[0], 0)))
        with pytest.raises(NumericalFailure):
            scc_spectral(cycle(4))

    def test_deterministic(self):
        g = random_graph(np.random.default_rng(2), 30, 0.1)
        a, b = scc_spectral(g), scc_spectral(g)
        assert a.components == b.components
        np.testing.assert_array_equal(a.centrality, b.centrality)


class TestStrongConnectivity:
    def test_complete(self):
        g = DirectedGraph(3, [(u, v) for u in range(3) for v in range(3) if u != v])
        assert is_strongly_connected_spectral(g)

    def test_path_with_back_edge(self):
        assert not is_strongly_connected_spectral(DirectedGraph(3, [(0, 1), (1, 2), (2, 1)]))

    def test_zero_out_degree(self):
        assert not is_strongly_connected_spectral(DirectedGraph(3, [(0, 1), (1, 2)]))

    def test_disconnected(self):
        g = DirectedGraph(4, [(0, 1), (1, 0), (2, 3), (3, 2)])
        assert not is_strongly_connected_spectral(g)

    def test_matches_oracle(self):
        rng = np.random.default_rng(7)
        seen = 0
        while seen < 100:
            g = random_graph(rng, int(rng.integers(2, 25)), rng.uniform(0.08, 0.4))
            if np.any(g.out_degree() == 0):
                continue
            seen += 1
            assert is_strongly_connected_spectral(g) == (len(scc_tarjan(g)) == 1)


class TestCondensation:
    def test_two_cycles_joined(self):
        g = DirectedGraph(4, [(0, 1), (1, 0), (2, 3), (3, 2), (1, 2)])
        cg = condensation(g, scc_spectral(g))
        assert cg.c == 2 and len(cg.dag_edges) == 1
        # peel order puts the sink pair {2, 3} first
        assert cg.dag_edges == {(1, 0)}

    def test_strongly_connected(self):
        g = cycle(5)
        cg = condensation(g, scc_spectral(g))
        assert cg.c == 1 and cg.dag_edges == set()

    def test_random_is_acyclic(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            g = random_graph(rng, int(rng.integers(1, 40)), rng.uniform(0.02, 0.2))
            cg = condensation(g, scc_spectral(g))
            assert len(cg.topological_order()) == cg.c

    def test_cycle_detected(self):
        from aas.digraph import CondensationGraph

        with pytest.raises(ValueError):
            CondensationGraph(2, {(0, 1), (1, 0)}).topological_order()


class TestShortestPaths:
    def test_edge(self):
        counts = shortest_path_node_counts(DirectedGraph(2, [(0, 1)]), [0, 1], [0, 1])
        assert counts[0, 1] == 2
        assert counts[1, 0] == np.inf
        assert counts[0, 0] == counts[1, 1] == 1

    def test_two_hops(self):
        g = DirectedGraph(3, [(0, 2), (2, 1)])
        assert shortest_path_node_counts(g, [0], [1])[0, 0] == 3

    def test_mutually_unreachable(self):
        counts = shortest_path_node_counts(DirectedGraph(2), [0, 1], [0, 1])
        assert counts[0, 1] == counts[1, 0] == np.inf

    def test_against_floyd_warshall(self):
        from scipy.sparse.csgraph import shortest_path

        rng = np.random.default_rng(4)
        g = random_graph(rng, 25, 0.1)
        ref = shortest_path(g.adjacency.astype(float), unweighted=True, directed=True) + 1
        got = shortest_path_node_counts(g, range(25), range(25))
        np.testing.assert_array_equal(got, ref)


class TestEdgeListIO:
    def test_round_trip(self, tmp_path):
        g = random_graph(np.random.default_rng(0), 12, 0.2)
        write_edge_list(g, tmp_path / "g.edges", header="test")
        n, edges = read_edge_list(tmp_path / "g.edges", n=12)
        assert DirectedGraph(n, edges).edges == g.edges

    def test_comments_and_blank_lines(self, tmp_path):
        f = tmp_path / "g.edges"
        f.write_text("# header\n0\t1\n\n1\t2  # trailing\n")
        assert read_edge_list(f) == (3, [(0, 1), (1, 2)])

    def test_bad_line_reports_location(self, tmp_path):
        f = tmp_path / "g.edges"
        f.write_text("0\t1\n1\tx\n")
        with pytest.raises(FormatError, match=r"g\.edges:2"):
            read_edge_list(f)
