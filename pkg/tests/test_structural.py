import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aas.digraph import (
    CondensationGraph,
    DirectedGraph,
    SccDecomposition,
    scc_spectral,
    shortest_path_node_counts,
)
from aas.structural import (
    InvalidTheta,
    anchor_count,
    anchor_similarity,
    build_structural_similarity,
    condensation_similarity,
    random_anchors,
    save_s_tilde_csv,
    select_anchors,
)


def cycle(n, offset=0):
    return [(offset + i, offset + (i + 1) % n) for i in range(n)]


def random_graph(rng, n, p):
    a = (rng.random((n, n)) < p).astype(np.int8)
    np.fill_diagonal(a, 0)
    return DirectedGraph.from_adjacency(a)


class TestAnchors:
    def test_single_component_top_three(self):
        centrality = np.linspace(0.05, 0.14, 10)
        centrality /= centrality.sum()
        d = SccDecomposition(10, [list(range(10))], centrality, [0])
        assert select_anchors(d, 0.3) == [9, 8, 7]

    def test_singletons_each_contribute(self):
        d = SccDecomposition(6, [[i] for i in range(6)], np.ones(6), list(range(6)))
        assert select_anchors(d, 0.1) == list(range(6))

    def test_count_for_sbm_sizes(self):
        assert sum(anchor_count(s, 0.3) for s in (10, 15, 12, 13)) == 16

    def test_exact_multiple_not_rounded_up(self):
        assert anchor_count(10, 0.3) == 3
        assert anchor_count(10, 0.7) == 7

    def test_ties_go_to_smaller_index(self):
        d = scc_spectral(DirectedGraph(4, cycle(4)))
        assert select_anchors(d, 0.5) == [0, 1]

    @pytest.mark.parametrize("theta", [0.0, 1.0, -0.1, 1.5])
    def test_invalid_theta(self, theta):
        d = scc_spectral(DirectedGraph(3, cycle(3)))
        with pytest.raises(InvalidTheta):
            select_anchors(d, theta)

    def test_random_anchors_same_count(self):
        g = random_graph(np.random.default_rng(0), 30, 0.08)
        d = scc_spectral(g)
        chosen = random_anchors(d, 0.3, np.random.default_rng(1))
        assert len(chosen) == len(select_anchors(d, 0.3))
        assert len(set(chosen)) == len(chosen)


class TestCondensationSimilarity:
    def test_single_node(self):
        np.testing.assert_array_equal(condensation_similarity(CondensationGraph(1, set())), [[2.0]])

    def test_one_edge(self):
        a = condensation_similarity(CondensationGraph(2, {(0, 1)}))
        np.testing.assert_allclose(a, [[2, 0.5], [0.5, 2]])

    def test_isolated(self):
        a = condensation_similarity(CondensationGraph(2, set()))
        assert a[0, 1] == a[1, 0] == 0


class TestAnchorSimilarity:
    def test_three_cycle(self):
        c = anchor_similarity(DirectedGraph(3, cycle(3)), [0, 1, 2])
        expected = np.full((3, 3), 5 / 6)
        np.fill_diagonal(expected, 2.0)
        np.testing.assert_allclose(c, expected, atol=1e-15)

    def test_two_way_edge(self):
        c = anchor_similarity(DirectedGraph(2, [(0, 1), (1, 0)]), [0, 1])
        assert c[0, 1] == 1.0

    def test_unreachable(self):
        c = anchor_similarity(DirectedGraph(4, cycle(2) + cycle(2, 2)), [0, 2])
        assert c[0, 1] == 0.0


class TestStructuralSimilarity:
    def test_single_scc_doubles_c(self):
        g = DirectedGraph(6, cycle(6) + [(0, 3)])
        s = build_structural_similarity(g, theta=0.5)
        np.testing.assert_allclose(s.s_tilde, 2 * s.anchor_sim_c)

    def test_unreachable_sccs_zero(self):
        g = DirectedGraph(6, cycle(3) + cycle(3, 3))
        s = build_structural_similarity(g, theta=0.3)
        assert len(s.anchors) == 2
        assert s.s_tilde[0, 1] == 0.0

    def test_identity_mode(self):
        g = random_graph(np.random.default_rng(2), 20, 0.15)
        s = build_structural_similarity(g, theta=0.3, identity=True)
        np.testing.assert_array_equal(s.s_tilde, np.eye(s.m))

    def test_csv_export(self, tmp_path):
        s = build_structural_similarity(DirectedGraph(3, cycle(3)), theta=0.9)
        save_s_tilde_csv(s, tmp_path / "s.csv")
        np.testing.assert_array_equal(np.loadtxt(tmp_path / "s.csv", delimiter=","), s.s_tilde)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10_000), st.integers(2, 25), st.floats(0.03, 0.3),
           st.floats(0.05, 0.95))
    def test_invariants(self, seed, n, p, theta):
        g = random_graph(np.random.default_rng(seed), n, p)
        s = build_structural_similarity(g, theta=theta)
        assert np.all(s.membership_b.sum(axis=0) == 1)
        for mat in (s.condensation_sim_a, s.anchor_sim_c, s.s_tilde):
            np.testing.assert_array_equal(mat, mat.T)
            assert mat.min() >= 0
        np.testing.assert_array_equal(s.recompute(), s.s_tilde)
        d = scc_spectral(g)
        assert s.m == sum(anchor_count(len(c), theta) for c in d.components)
        # positive similarity needs a directed path one way or the other
        c_raw = np.isfinite(shortest_path_node_counts(g, s.anchors, s.anchors))
        assert np.all((s.s_tilde > 0) <= (c_raw | c_raw.T))
        # same component -> b^T a b entry is the diagonal value 2
        lab = d.labels()[s.anchors]
        bab = s.membership_b.T @ s.condensation_sim_a @ s.membership_b
        np.testing.assert_array_equal(bab[lab[:, None] == lab[None, :]], 2.0)

    def test_anchor_permutation(self):
        g = random_graph(np.random.default_rng(4), 25, 0.1)
        d = scc_spectral(g)
        base = build_structural_similarity(g, d, anchors=select_anchors(d, 0.4))
        perm = np.random.default_rng(5).permutation(base.m)
        shuffled = build_structural_similarity(g, d, anchors=[base.anchors[i] for i in perm])
        np.testing.assert_array_equal(shuffled.s_tilde, base.s_tilde[np.ix_(perm, perm)])
