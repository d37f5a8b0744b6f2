import numpy as np
import pytest

from cdsim.errors import DomainError, NormalizationError, ParseError
from cdsim.graph import (
    Graph,
    complete_graph,
    eigenvector_centrality,
    erdos_renyi_graph,
    is_cohesive,
    load_edge_list,
    rank_nodes,
    ring_graph,
    row_normalize,
    social_power,
    star_graph,
    two_triangle_graph,
)

from util import TWO_TRIANGLE_EDGES


class TestLoadEdgeList:
    def test_smallest_symmetric_pair(self):
        g = load_edge_list("0 1\n1 0")
        assert g.n == 2
        assert g.matrix[0, 1] == 1.0 and g.matrix[1, 0] == 1.0

    def test_two_triangle_file(self):
        g = load_edge_list(TWO_TRIANGLE_EDGES, symmetrize=True)
        assert g.n == 6
        assert len(g.edges()) == 14
        assert np.array_equal(g.matrix, two_triangle_graph().matrix)

    def test_malformed_line_reports_number(self):
        with pytest.raises(ParseError) as err:
            load_edge_list("0 1\n0 x")
        assert "line 2" in str(err.value)

    def test_malformed_token_count(self):
        with pytest.raises(ParseError):
            load_edge_list("0 1 2 3")

    def test_negative_weight_rejected(self):
        with pytest.raises(DomainError):
            load_edge_list("0 1 -2.0")

    def test_duplicate_edges_sum(self):
        g = load_edge_list("0 1 0.5\n0 1 0.25")
        assert g.matrix[0, 1] == 0.75

    def test_comments_and_blanks_skipped(self):
        g = load_edge_list("# header\n\n0 1  # inline\n1 0\n")
        assert g.n == 2

    def test_string_labels_first_appearance_order(self):
        g = load_edge_list("alice bob\nbob carol\ncarol alice")
        assert g.labels == ("alice", "bob", "carol")
        assert g.matrix[0, 1] == 1.0 and g.matrix[1, 2] == 1.0

    def test_integer_ids_span_to_max(self):
        g = load_edge_list("0 3")
        assert g.n == 4 and g.labels is None

    def test_self_loops_stripped_by_default(self):
        g = load_edge_list("0 0 2.0\n0 1")
        assert g.matrix[0, 0] == 0.0
        kept = load_edge_list("0 0 2.0\n0 1", strip_self_loops=False)
        assert kept.matrix[0, 0] == 2.0


class TestRowNormalize:
    def test_single_neighbor_gets_full_weight(self):
        g = row_normalize(load_edge_list("0 1\n1 0"))
        assert g.matrix[0, 1] == 1.0 and g.row_stochastic

    def test_uniform_split(self):
        g = row_normalize(load_edge_list("0 1\n0 2\n0 3\n1 0\n2 0\n3 0"))
        assert np.allclose(g.matrix[0, 1:], 1.0 / 3.0, atol=0, rtol=0)

    def test_isolated_node_named(self):
        with pytest.raises(NormalizationError) as err:
            row_normalize(load_edge_list("0 1\n1 0\n0 2"))
        assert "node 2" in str(err.value)

    def test_idempotent(self):
        rng = np.random.Generator(np.random.PCG64(5))
        for seed in range(20):
            g = erdos_renyi_graph(8, 0.6, rng)
            if np.any(g.matrix.sum(axis=1) == 0):
                continue
            once = row_normalize(g)
            twice = row_normalize(once)
            assert np.max(np.abs(twice.matrix - once.matrix)) < 1e-12


class TestEigenvectorCentrality:
    def test_complete_graph_uniform(self):
        c = eigenvector_centrality(complete_graph(4))
        assert np.allclose(c, 0.25, atol=1e-10)

    def test_star_matches_direct_eigendecomposition(self):
        g = star_graph(3)
        c = eigenvector_centrality(g)
        # oracle: dominant eigenvector straight from numpy's solver
        vals, vecs = np.linalg.eig(g.matrix)
        v = np.abs(np.real(vecs[:, np.argmax(np.real(vals))]))
        v /= v.sum()
        assert np.allclose(c, v, atol=1e-8)
        assert np.argmax(c) == 0
        assert c[0] > c[1]

    def test_disconnected_rejected(self):
        with pytest.raises(DomainError):
            eigenvector_centrality(load_edge_list("0 1\n1 0\n2 3\n3 2"))

    def test_scale_invariance(self):
        g = two_triangle_graph()
        scaled = Graph(g.matrix * 7.5)
        assert np.allclose(
            eigenvector_centrality(g), eigenvector_centrality(scaled), atol=1e-8
        )

    def test_unit_sum(self):
        c = eigenvector_centrality(two_triangle_graph())
        assert abs(c.sum() - 1.0) < 1e-12


class TestSocialPower:
    def test_complete_uniform_rows(self):
        g = row_normalize(complete_graph(5))
        pi = social_power(g)
        assert np.max(np.abs(pi - 0.2)) < 1e-10

    def test_three_node_star_stationary_system(self):
        # leaves listen only to the hub; the hub splits attention evenly
        w = np.array([[0.0, 0.5, 0.5], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
        g = Graph(w, row_stochastic=True)
        pi = social_power(g)
        assert np.allclose(pi, [0.5, 0.25, 0.25], atol=1e-12)
        # oracle: solve the stationary system directly
        a = np.vstack([w.T - np.eye(3), np.ones(3)])
        ref, *_ = np.linalg.lstsq(a, np.array([0.0, 0.0, 0.0, 1.0]), rcond=None)
        assert np.allclose(pi, ref, atol=1e-10)

    def test_two_closed_classes_rejected(self):
        w = np.array([
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
        ])
        with pytest.raises(DomainError):
            social_power(Graph(w, row_stochastic=True))

    def test_requires_stochastic_flag(self):
        with pytest.raises(DomainError):
            social_power(complete_graph(3))

    def test_properties(self):
        rng = np.random.Generator(np.random.PCG64(9))
        w = rng.random((6, 6)) + 0.05
        g = Graph(w / w.sum(axis=1, keepdims=True), row_stochastic=True)
        pi = social_power(g)
        assert abs(pi.sum() - 1.0) < 1e-12
        assert np.all(pi >= 0)
        assert np.max(np.abs(pi @ g.matrix - pi)) < 1e-10


class TestIsCohesive:
    def test_two_triangle_plus_side(self):
        g = row_normalize(two_triangle_graph())
        # internal masses are 1, 2/3, 1: all at least 1/2 when alpha = 0
        assert is_cohesive(g, {0, 1, 2}, alpha=0.0, action=1)

    def test_two_triangle_bridge_fails_strong_disadvantage(self):
        g = row_normalize(two_triangle_graph())
        # needs 2/3 >= 1/1.4, which the bridge node misses
        assert not is_cohesive(g, {0, 1, 2}, alpha=-0.6, action=1)

    def test_singleton_self_loop(self):
        g = Graph(np.array([[1.0]]), row_stochastic=True)
        assert is_cohesive(g, {0}, alpha=0.3, action=1)
        assert is_cohesive(g, {0}, alpha=0.3, action=-1)

    def test_empty_set_rejected(self):
        g = row_normalize(two_triangle_graph())
        with pytest.raises(DomainError):
            is_cohesive(g, set(), alpha=0.0, action=1)

    def test_fig1b_clustered_equilibrium_window(self):
        # both cliques cohesive for +1 iff alpha >= -1/2 and for -1 iff alpha <= 1
        g = row_normalize(two_triangle_graph())
        for alpha in (-0.9, -0.7, -0.5, -0.3, 0.0, 0.5, 1.0, 1.2, 2.0):
            for nodes in ({0, 1, 2}, {3, 4, 5}):
                assert is_cohesive(g, nodes, alpha, 1) == (alpha >= -0.5)
                assert is_cohesive(g, nodes, alpha, -1) == (alpha <= 1.0)


class TestGenerators:
    def test_ring(self):
        g = ring_graph(5)
        assert np.all(g.matrix.sum(axis=1) == 2)

    def test_erdos_renyi_symmetric(self):
        g = erdos_renyi_graph(20, 0.3, np.random.Generator(np.random.PCG64(0)))
        assert np.array_equal(g.matrix, g.matrix.T)

    def test_rank_nodes_two_triangle(self):
        order = rank_nodes(two_triangle_graph(), "eigenvector")
        assert set(order[:2]) == {1, 4}

    def test_rank_nodes_degree_and_random(self):
        g = star_graph(4)
        assert rank_nodes(g, "degree")[0] == 0
        rng = np.random.Generator(np.random.PCG64(3))
        perm = rank_nodes(g, "random", rng)
        assert sorted(perm) == list(range(5))

    def test_rank_warns_on_stochastic(self):
        g = row_normalize(two_triangle_graph())
        with pytest.warns(UserWarning):
            rank_nodes(g, "eigenvector")


class TestGraphType:
    def test_rejects_negative_weights(self):
        with pytest.raises(DomainError):
            Graph(np.array([[0.0, -1.0], [0.0, 0.0]]))

    def test_stochastic_flag_checked(self):
        with pytest.raises(DomainError):
            Graph(np.array([[0.0, 0.5], [1.0, 0.0]]), row_stochastic=True)

    def test_matrix_immutable(self):
        g = complete_graph(3)
        with pytest.raises(ValueError):
            g.matrix[0, 1] = 5.0
