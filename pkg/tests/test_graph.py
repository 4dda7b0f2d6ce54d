import pytest
from hypothesis import given
from hypothesis import strategies as st

from congestlab import graph as gr
from congestlab.graph import CycleWitness, Graph, GraphFormatError, SubgraphPattern, validate_witness
from congestlab.oracles import brute_girth

from conftest import nx_girth


def small_graphs(max_n=16):
    @st.composite
    def build(draw):
        n = draw(st.integers(1, max_n))
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        chosen = draw(st.lists(st.sampled_from(pairs), unique=True) if pairs else st.just([]))
        return Graph.from_edges(n, chosen)

    return build()


class TestGenerators:
    def test_zero_probability_is_edgeless(self):
        g = gr.gen_random(5, 0.0, seed=1)
        assert g.n == 5 and g.m == 0

    def test_full_probability_is_complete(self):
        g = gr.gen_random(5, 1.0, seed=1)
        assert g.m == 10

    def test_random_is_deterministic(self):
        a = gr.gen_random(100, 0.1, seed=7)
        b = gr.gen_random(100, 0.1, seed=7)
        assert a.edge_list == b.edge_list
        assert gr.gen_random(100, 0.1, seed=8).edge_list != a.edge_list

    def test_plant_full_cycle(self):
        g, w = gr.plant_cycle(gr.empty_graph(6), 6, seed=0)
        assert g.m == 6 and all(g.degree(v) == 2 for v in range(6))
        assert brute_girth(g) == 6 and w.is_valid(g, 6)

    def test_plant_c4_on_ten(self):
        g, _ = gr.plant_cycle(gr.empty_graph(10), 4, seed=3)
        assert g.m == 4 and brute_girth(g) == 4

    def test_plant_triangle_into_c5(self):
        g, _ = gr.plant_cycle(gr.cycle_graph(5), 3, seed=0)
        assert brute_girth(g) == 3

    def test_plant_too_long(self):
        with pytest.raises(GraphFormatError):
            gr.plant_cycle(gr.empty_graph(4), 5, seed=0)

    def test_bounded_degree(self):
        g = gr.gen_bounded_degree(40, 3, seed=5)
        assert g.max_degree <= 3 and g.m > 0

    @pytest.mark.parametrize("girth", [4, 5, 7, 9])
    def test_planted_girth_exact(self, girth):
        for seed in range(5):
            g, w = gr.planted_girth_graph(60, girth, seed, extra_edges=20, hub_leaves=3)
            assert brute_girth(g) == girth
            assert w.is_valid(g, girth)


class TestGraph:
    def test_rejects_self_loop(self):
        with pytest.raises(GraphFormatError):
            Graph.from_edges(3, [(1, 1)])

    def test_rejects_parallel_edge(self):
        with pytest.raises(GraphFormatError):
            Graph.from_edges(3, [(0, 1), (1, 0)])

    def test_rejects_out_of_range(self):
        with pytest.raises(GraphFormatError):
            Graph.from_edges(3, [(0, 3)])

    def test_edge_list_round_trip(self, petersen):
        assert Graph.parse_edge_list(petersen.to_edge_list()) == petersen

    @pytest.mark.parametrize("text", ["", "3\n", "2 1\n0 x\n", "3 2\n0 1\n", "3 1\n0 1 2\n"])
    def test_bad_files(self, text):
        with pytest.raises(GraphFormatError):
            Graph.parse_edge_list(text)

    @given(small_graphs())
    def test_degree_sum(self, g):
        assert sum(g.degree(v) for v in range(g.n)) == 2 * g.m
        assert all(g.has_edge(u, v) and g.has_edge(v, u) for u, v in g.edges())

    @given(small_graphs(), st.integers(0, 2**32))
    def test_relabel_preserves_girth(self, g, seed):
        import numpy as np

        perm = np.random.default_rng(seed).permutation(g.n).tolist()
        assert brute_girth(g.relabel(perm)) == brute_girth(g)

    def test_components_example(self):
        g = Graph.from_edges(6, [(0, 3), (3, 5), (1, 2)])
        assert g.components().tolist() == [0, 1, 1, 0, 2, 0]
        assert not g.is_connected()
        assert gr.petersen_graph().is_connected()

    @given(small_graphs())
    def test_components_match_networkx(self, g):
        import networkx as nx

        from conftest import to_nx

        label = g.components()
        for comp in nx.connected_components(to_nx(g)):
            assert len({int(label[v]) for v in comp}) == 1
        assert label.max() + 1 == nx.number_connected_components(to_nx(g))


class TestPatterns:
    def test_parse_named(self):
        assert SubgraphPattern.parse("K4").k == 6
        assert SubgraphPattern.parse("C6").p == 6
        assert SubgraphPattern.parse("P4").k == 3
        assert SubgraphPattern.parse("triangle").k == 3

    def test_parse_edge_spec(self):
        h = SubgraphPattern.parse("0-1,1-2,2-0")
        assert h.p == 3 and h.k == 3

    @pytest.mark.parametrize("spec", ["C2", "0-0", "a-b", ""])
    def test_parse_rejects(self, spec):
        with pytest.raises(GraphFormatError):
            SubgraphPattern.parse(spec)

    def test_back_degrees(self):
        assert SubgraphPattern.cycle(4).d == (0, 1, 1, 2)
        assert SubgraphPattern.clique(4).d == (0, 1, 2, 3)


class TestWitness:
    def test_c6_valid(self):
        assert validate_witness(gr.cycle_graph(6), [0, 1, 2, 3, 4, 5], 6)

    def test_missing_closing_edge(self):
        assert not validate_witness(gr.cycle_graph(6), [0, 1, 2, 0], 3)

    def test_k4_triangle(self):
        assert validate_witness(gr.complete_graph(4), [0, 1, 2], 3)

    def test_wrong_length(self):
        assert not validate_witness(gr.cycle_graph(6), [0, 1, 2, 3, 4, 5], 5)

    def test_repeated_vertex(self):
        assert not CycleWitness((0, 1, 0, 1)).is_valid(gr.complete_graph(4))

    @given(small_graphs(10))
    def test_girth_matches_networkx(self, g):
        assert brute_girth(g) == nx_girth(g)
