import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from congestlab import graph as gr
from congestlab.graph import INF, Graph, GraphFormatError, SubgraphPattern
from congestlab.oracles import (
    brute_girth,
    enumerate_cycles,
    enumerate_subgraph,
    neighborhood,
    prune_degenerate,
    shortest_cycle,
)

from conftest import nx_cycle_count, nx_girth


def _brute_count(g: Graph, h: SubgraphPattern) -> int:
    """Count images by trying every injective map (tiny graphs only)."""
    seen = set()
    for mp in itertools.permutations(range(g.n), h.p):
        if all(g.has_edge(mp[a], mp[b]) for a, b in h.edges):
            seen.add(frozenset(tuple(sorted((mp[a], mp[b]))) for a, b in h.edges))
    return len(seen)


class TestGirth:
    def test_c5(self):
        assert brute_girth(gr.cycle_graph(5)) == 5

    def test_k4(self):
        assert brute_girth(gr.complete_graph(4)) == 3

    def test_petersen(self, petersen):
        assert brute_girth(petersen) == 5
        assert nx_girth(petersen) == 5
        assert not enumerate_cycles(petersen, 3) and not enumerate_cycles(petersen, 4)
        assert enumerate_cycles(petersen, 5)

    def test_forest(self):
        assert brute_girth(gr.random_tree(30, 1)) is INF
        assert brute_girth(gr.empty_graph(3)) is INF

    def test_shortest_cycle_witness(self, petersen):
        w = shortest_cycle(petersen)
        assert w is not None and w.is_valid(petersen, 5)

    @pytest.mark.parametrize("seed", range(40))
    def test_random_against_networkx(self, seed):
        g = gr.gen_random(20 + seed, 0.06, seed)
        assert brute_girth(g) == nx_girth(g)


class TestEnumerate:
    def test_k4_triangles(self):
        assert len(enumerate_subgraph(gr.complete_graph(4), SubgraphPattern.clique(3))) == 4

    def test_c6_in_c6(self):
        assert len(enumerate_subgraph(gr.cycle_graph(6), SubgraphPattern.cycle(6))) == 1

    def test_k4_c4(self):
        k4 = gr.complete_graph(4)
        assert len(enumerate_subgraph(k4, SubgraphPattern.cycle(4))) == 3
        assert _brute_count(k4, SubgraphPattern.cycle(4)) == 3

    def test_too_large(self):
        with pytest.raises(GraphFormatError):
            enumerate_subgraph(gr.complete_graph(12), SubgraphPattern.cycle(11))

    @given(st.integers(0, 10_000), st.sampled_from(["K3", "C4", "C5", "P4", "0-1,1-2,2-0,2-3"]))
    def test_against_permutation_count(self, seed, spec):
        g = gr.gen_random(7, 0.45, seed)
        h = SubgraphPattern.parse(spec)
        assert len(enumerate_subgraph(g, h)) == _brute_count(g, h)

    @given(st.integers(0, 10_000), st.integers(3, 7))
    def test_cycles_against_networkx(self, seed, length):
        g = gr.gen_random(10, 0.35, seed)
        assert len(enumerate_cycles(g, length)) == nx_cycle_count(g, length)

    def test_instances_carry_valid_maps(self):
        g = gr.gen_random(12, 0.4, 3)
        h = SubgraphPattern.cycle(5)
        for inst in enumerate_subgraph(g, h):
            assert all(g.has_edge(inst.mapping[a], inst.mapping[b]) for a, b in h.edges)
            assert tuple(sorted(inst.mapping)) == inst.vertices


class TestPrune:
    def test_path_vanishes(self):
        assert prune_degenerate(gr.path_graph(4)).m == 0

    def test_pendant_removed(self):
        g = Graph.from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5)])
        assert prune_degenerate(g) == gr.pad(gr.cycle_graph(5), 6)

    def test_tree_vanishes(self):
        assert prune_degenerate(gr.random_tree(25, 4)).m == 0

    @pytest.mark.parametrize("block", range(10))
    def test_girth_preserved(self, block):
        # 1000 seeded graphs in ten blocks
        for seed in range(block * 100, block * 100 + 100):
            n = 8 + seed % 57
            g = gr.gen_random(n, 1.6 / n, seed)
            pruned = prune_degenerate(g)
            assert brute_girth(pruned) == brute_girth(g)
            assert all(pruned.degree(v) in (0,) or pruned.degree(v) >= 2 for v in range(n))


class TestNeighborhood:
    def test_c6_radius_one(self):
        nb = neighborhood(gr.cycle_graph(6), 0, 1)
        assert nb.vertices == {5, 0, 1}
        assert nb.edges == {(0, 5), (0, 1)}

    def test_star(self):
        star = gr.star_graph(4)
        nb = neighborhood(star, 0, 1)
        assert nb.vertices == set(range(5)) and len(nb.edges) == 4

    def test_petersen_radius_two(self, petersen):
        nb = neighborhood(petersen, 0, 2)
        # every vertex is within distance 2; edges touch the center or its 3 neighbours
        assert len(nb.vertices) == 10
        assert len(nb.edges) == 9

    @given(st.integers(0, 10_000), st.integers(1, 4))
    def test_tree_below_half_girth(self, seed, radius):
        g, _ = gr.planted_girth_graph(40, 9, seed, extra_edges=10)
        for v in range(0, 40, 7):
            nb = neighborhood(g, v, radius)
            if 2 * radius < brute_girth(g):
                assert nb.is_tree()
