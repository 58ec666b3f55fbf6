import math

import numpy as np
import pytest

from pdslab.errors import EdgeListParseError, InvalidParameterError
from pdslab.graphmodels import (
    BipartiteGraph,
    Graph,
    PdsParams,
    gen_bipartite_er,
    gen_bipartite_pc,
    gen_bipartite_pds,
    gen_er,
    gen_pds_fixed_size,
    gen_pds_random_size,
    gen_planted_clique,
    read_edge_list,
    subgraph_edge_count,
    write_edge_list,
)
from pdslab.randkit import Seed
from pdslab.theorychecks import er_law_exact, pds_law_exact


class TestGraphContainers:
    def test_normalization_and_lookup(self):
        g = Graph(4, [(2, 1), (0, 3)])
        assert g.edges.tolist() == [[0, 3], [1, 2]]
        assert g.has_edge(1, 2) and g.has_edge(2, 1)
        assert not g.has_edge(0, 1)

    def test_rejects_self_loops_and_duplicates(self):
        with pytest.raises(InvalidParameterError):
            Graph(3, [(1, 1)])
        with pytest.raises(InvalidParameterError):
            Graph(3, [(0, 1), (1, 0)])
        with pytest.raises(InvalidParameterError):
            Graph(3, [(0, 5)])

    def test_fingerprint_stability(self):
        g = Graph(5, [(0, 1), (2, 4)])
        assert g.fingerprint() == Graph(5, [(2, 4), (0, 1)]).fingerprint()
        assert g.fingerprint() != Graph(5, [(0, 1), (2, 3)]).fingerprint()

    def test_bipartite_ranges(self):
        b = BipartiteGraph(2, 3, [(1, 2), (0, 0)])
        assert b.num_edges == 2
        with pytest.raises(InvalidParameterError):
            BipartiteGraph(2, 3, [(2, 0)])


class TestErdosRenyi:
    def test_extremes(self):
        assert gen_er(10, 0.0, Seed(0)).num_edges == 0
        assert gen_er(10, 1.0, Seed(0)).num_edges == 45

    def test_determinism(self):
        assert gen_er(200, 0.03, Seed(5)) == gen_er(200, 0.03, Seed(5))

    def test_sparse_and_dense_paths_both_unbiased(self):
        # q = 0.01 exercises geometric skip-sampling, q = 0.3 per-pair draws
        for q, trials, n in [(0.01, 1000, 1000), (0.3, 400, 120)]:
            pairs = n * (n - 1) // 2
            total = sum(gen_er(n, q, Seed(7).child(i)).num_edges for i in range(trials))
            band = 4 * math.sqrt(pairs * q * (1 - q) / trials)
            assert abs(total / trials - pairs * q) <= band


class TestPlantedModels:
    def test_p_equals_q_exact_law(self):
        # analytic model law with an invisible planted set is exactly ER
        for n, k in [(3, 2), (4, 3)]:
            tv = 0.5 * np.abs(pds_law_exact(n, k, 0.3, 0.3) - er_law_exact(n, 0.3)).sum()
            assert tv <= 1e-12

    def test_full_membership(self):
        inst = gen_pds_random_size(PdsParams(6, 6, 0.7, 0.2), Seed(3))
        assert inst.planted == tuple(range(6))
        inst = gen_pds_fixed_size(PdsParams(6, 6, 0.7, 0.2), Seed(3))
        assert inst.planted == tuple(range(6))

    def test_membership_moments(self):
        sizes = [
            len(gen_pds_random_size(PdsParams(100, 10, 0.0, 0.0), Seed(77).child(i)).planted)
            for i in range(10_000)
        ]
        assert abs(np.mean(sizes) - 10.0) <= 0.4
        assert abs(np.var(sizes) - 9.0) <= 0.3 * 9.0

    def test_fixed_size_uniformity(self):
        counts = np.zeros(6)
        trials = 10_000
        for i in range(trials):
            inst = gen_pds_fixed_size(PdsParams(6, 3, 0.0, 0.0), Seed(13).child(i))
            counts[list(inst.planted)] += 1
        assert np.all(np.abs(counts / trials - 0.5) <= 0.02)

    def test_singleton_plant_is_plain_er(self):
        # K = 1 leaves no within-set pair, and the edge stream is untouched
        inst = gen_pds_fixed_size(PdsParams(40, 1, 0.9, 0.2), Seed(8))
        assert inst.graph == gen_er(40, 0.2, Seed(8))

    def test_membership_stream_separate_from_edges(self):
        # changing only the edge process must not move the planted set
        a = gen_pds_fixed_size(PdsParams(30, 5, 0.9, 0.1), Seed(21))
        b = gen_pds_fixed_size(PdsParams(30, 5, 0.3, 0.25), Seed(21))
        assert a.planted == b.planted
        a = gen_pds_random_size(PdsParams(30, 5, 0.9, 0.1), Seed(22))
        b = gen_pds_random_size(PdsParams(30, 5, 0.3, 0.25), Seed(22))
        assert a.planted == b.planted

    def test_params_validation(self):
        with pytest.raises(InvalidParameterError):
            PdsParams(5, 0, 0.5, 0.2)
        with pytest.raises(InvalidParameterError):
            PdsParams(5, 2, 0.2, 0.5)


class TestPlantedClique:
    def test_complete_when_k_is_n(self):
        inst = gen_planted_clique(6, 6, 0.5, Seed(1))
        assert inst.graph.num_edges == 15

    def test_gamma_zero_triangle(self):
        inst = gen_planted_clique(9, 3, 0.0, Seed(4))
        assert inst.graph.num_edges == 3
        assert subgraph_edge_count(inst.graph, inst.planted) == 3

    def test_planted_subgraph_always_complete(self):
        for i in range(1000):
            inst = gen_planted_clique(20, 5, 0.5, Seed(9).child(i))
            assert subgraph_edge_count(inst.graph, inst.planted) == 10


class TestBipartite:
    def test_biclique_complete(self):
        inst = gen_bipartite_pc(5, 5, 0.3, Seed(2))
        assert inst.graph.num_edges == 25

    def test_p_equals_q_marginal(self):
        # with p = q the planting consumes no edge randomness at all
        inst = gen_bipartite_pds(PdsParams(40, 6, 0.1, 0.1), Seed(14))
        assert inst.graph == gen_bipartite_er(40, 0.1, Seed(14))

    def test_fixed_size_forced_block(self):
        inst = gen_bipartite_pds(PdsParams(50, 5, 1.0, 0.0), Seed(6), fixed_size=True)
        top, bottom = inst.planted
        assert len(top) == len(bottom) == 5
        assert inst.graph.num_edges == 25
        assert all(inst.graph.has_edge(u, v) for u in top for v in bottom)


class TestSubgraphEdgeCount:
    def test_small_sets(self):
        g = gen_er(8, 0.5, Seed(5))
        assert subgraph_edge_count(g, []) == 0
        assert subgraph_edge_count(g, [3]) == 0

    def test_complete_graph(self):
        g = gen_er(8, 1.0, Seed(5))
        assert subgraph_edge_count(g, [0, 2, 5, 7]) == 6

    def test_path(self):
        g = Graph(4, [(0, 1), (1, 2), (2, 3)])
        assert subgraph_edge_count(g, {1, 2, 3}) == 2

    def test_out_of_range(self):
        with pytest.raises(InvalidParameterError):
            subgraph_edge_count(Graph(3, []), [5])


class TestEdgeListIO:
    def test_empty_graph_header(self, tmp_graph_file):
        g = read_edge_list(tmp_graph_file("3 0\n"))
        assert isinstance(g, Graph) and g.num_vertices == 3 and g.num_edges == 0

    def test_round_trip(self, tmp_path):
        g = gen_er(50, 0.2, Seed(11))
        path = tmp_path / "g.txt"
        write_edge_list(g, path)
        assert read_edge_list(path) == g

    def test_bipartite_round_trip(self, tmp_path):
        g = gen_bipartite_er(20, 0.3, Seed(12))
        path = tmp_path / "b.txt"
        write_edge_list(g, path)
        assert read_edge_list(path) == g

    def test_malformed_line_reports_position(self, tmp_graph_file):
        with pytest.raises(EdgeListParseError) as err:
            read_edge_list(tmp_graph_file("3 1\na b\n"))
        assert err.value.line == 2

    def test_duplicate_edge(self, tmp_graph_file):
        with pytest.raises(EdgeListParseError):
            read_edge_list(tmp_graph_file("4 2\n0 1\n0 1\n"))

    def test_endpoint_order_enforced(self, tmp_graph_file):
        with pytest.raises(EdgeListParseError):
            read_edge_list(tmp_graph_file("4 1\n2 1\n"))

    def test_out_of_range_endpoint(self, tmp_graph_file):
        with pytest.raises(EdgeListParseError):
            read_edge_list(tmp_graph_file("4 1\n0 9\n"))

    def test_wrong_edge_count(self, tmp_graph_file):
        with pytest.raises(EdgeListParseError):
            read_edge_list(tmp_graph_file("4 2\n0 1\n"))

    def test_bad_header(self, tmp_graph_file):
        with pytest.raises(EdgeListParseError):
            read_edge_list(tmp_graph_file("oops\n"))
