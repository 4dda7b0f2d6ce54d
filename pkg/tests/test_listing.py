import pytest
from hypothesis import given
from hypothesis import strategies as st

from congestlab import graph as gr
from congestlab.clique.listing import (
    C1,
    C2,
    DetectKind,
    build_partition_tree,
    certify_tree,
    choose_x,
    detect_c2k,
    edges_between,
    exact_girth_sparse,
    list_subgraph,
    list_with_tree,
    volume,
)
from congestlab.engine import CliqueNetwork, InvariantFault, Topology
from congestlab.graph import Graph, SubgraphPattern
from congestlab.oracles import brute_girth, enumerate_cycles, enumerate_subgraph

FANO_LINES = [(0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5)]


def fano_incidence(n=25) -> Graph:
    """Point-line incidence graph of the Fano plane (girth 6), padded to n vertices."""
    return Graph.from_edges(n, [(p, 7 + i) for i, line in enumerate(FANO_LINES) for p in line])


def build(g, h):
    return build_partition_tree(g, h, CliqueNetwork(Topology.clique(g)))


def test_constants():
    assert (C1, C2) == (8, 32)
    assert choose_x(16, 3) == 3
    assert choose_x(4, 6) == 2


class TestTree:
    def test_edgeless_balanced_intervals(self):
        g = gr.empty_graph(20)
        tree = build(g, SubgraphPattern.clique(3))
        cert = certify_tree(g, tree)
        assert cert.ok
        assert tree.root == [(0, 20)]

    def test_k16_triangle(self):
        g = gr.complete_graph(16)
        tree = build(g, SubgraphPattern.clique(3))
        assert tree.x == 3
        for parts in tree.partitions.values():
            for part in parts:
                assert edges_between(g, part, (0, 16)) == volume(g, part) <= C1 * g.m / tree.x + g.n
        assert certify_tree(g, tree).ok

    def test_refines_root(self):
        g = gr.gen_random(64, 0.2, 1)
        tree = build(g, SubgraphPattern.cycle(4))
        for prefix, parts in tree.partitions.items():
            for lo, hi in parts:
                assert any(rlo <= lo and hi <= rhi for rlo, rhi in tree.root)
        cert = certify_tree(g, tree)
        assert cert.ok and cert.root_parts <= max(1, tree.x // 2)

    def test_certificate_catches_tampering(self):
        g = gr.gen_random(40, 0.5, 2)
        tree = build(g, SubgraphPattern.clique(3))
        tree.partitions[()] = [(0, 39)]
        assert not certify_tree(g, tree).ok


class TestListing:
    def test_k4_triangles(self):
        g = gr.complete_graph(4)
        h = SubgraphPattern.clique(3)
        got, _ = list_with_tree(g, h, build(g, h))
        assert got == enumerate_subgraph(g, h) and len(got) == 4

    def test_c6(self):
        g = gr.cycle_graph(6)
        h = SubgraphPattern.cycle(6)
        got, _ = list_with_tree(g, h, build(g, h))
        assert len(got) == 1

    def test_c4_free_incidence(self):
        g = fano_incidence()
        assert brute_girth(g) == 6
        assert list_subgraph(g, SubgraphPattern.cycle(4)) == set()
        assert len(list_subgraph(g, SubgraphPattern.cycle(6))) == 28

    @pytest.mark.parametrize("spec", ["K3", "P4"])
    def test_random_32(self, spec):
        g = gr.gen_random(32, 0.3, 4)
        h = SubgraphPattern.parse(spec)
        assert list_subgraph(g, h) == enumerate_subgraph(g, h)

    @pytest.mark.parametrize("spec", ["K3", "C4", "C6", "P4"])
    def test_edgeless(self, spec):
        assert list_subgraph(gr.empty_graph(16), SubgraphPattern.parse(spec)) == set()

    def test_report_fields(self):
        g = gr.gen_random(30, 0.2, 9)
        h = SubgraphPattern.cycle(5)
        rep = list_subgraph(g, h, report=True)
        bound = C2 * h.k * rep.tree.m_tilde / rep.tree.x**2 + h.p * g.n
        assert rep.max_learned <= bound
        assert rep.metrics.rounds > 0

    @given(
        st.integers(0, 10**6),
        st.integers(6, 40),
        st.floats(0.0, 0.3),
        st.sampled_from(["K3", "C4", "C5", "P4", "K4", "0-1,1-2,2-3,3-0,0-2"]),
    )
    def test_equals_oracle(self, seed, n, p, spec):
        g = gr.gen_random(n, p, seed)
        h = SubgraphPattern.parse(spec)
        rep = list_subgraph(g, h, report=True)
        assert rep.instances == enumerate_subgraph(g, h)
        if rep.tree is not None:
            assert certify_tree(g, rep.tree).ok


class TestDetect:
    def test_c6_found(self):
        res = detect_c2k(gr.cycle_graph(6), 3)
        assert res.kind is DetectKind.FOUND and res.witness.is_valid(gr.cycle_graph(6), 6)

    def test_c5_free(self):
        assert detect_c2k(gr.cycle_graph(5), 2).kind is DetectKind.FREE

    def test_guaranteed_at_scale(self):
        # the edge-count gate needs n > 1000 for a simple graph to exceed 17k n^{1+1/k} at k = 3
        n = 1100
        g = gr.complete_graph(n)
        res = detect_c2k(g, 3)
        assert res.kind is DetectKind.GUARANTEED
        assert enumerate_cycles(g, 6, 1)

    @given(st.integers(0, 10**6), st.sampled_from([2, 3]))
    def test_agrees_with_oracle(self, seed, k):
        g = gr.gen_random(20, 0.12, seed)
        res = detect_c2k(g, k)
        has = bool(enumerate_cycles(g, 2 * k, 1))
        assert (res.kind is DetectKind.FOUND) == has
        if has:
            assert res.witness.is_valid(g, 2 * k)


class TestExactGirth:
    def test_petersen(self, petersen):
        assert exact_girth_sparse(petersen, 3) == 5

    def test_c9(self):
        assert exact_girth_sparse(gr.cycle_graph(9), 3) == 9

    def test_lower_bound_violation_faults(self):
        with pytest.raises(InvariantFault):
            exact_girth_sparse(gr.complete_graph(6), 3)

    @pytest.mark.parametrize("seed", range(12))
    def test_bipartite(self, seed):
        import numpy as np

        r = np.random.default_rng(seed)
        edges = [(a, 20 + b) for a in range(20) for b in range(20) if r.random() < 0.25]
        g = Graph.from_edges(40, edges)
        assert exact_girth_sparse(g, 3) == brute_girth(g)
