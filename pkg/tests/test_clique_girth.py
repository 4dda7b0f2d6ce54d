import pytest
from hypothesis import given
from hypothesis import strategies as st

from congestlab import graph as gr
from congestlab.clique import girth as cg
from congestlab.clique.girth import (
    EstimateKind,
    GirthEstimate,
    GirthTrace,
    NeighborhoodState,
    RegimeError,
    StateKind,
    girth_plus_one,
    phase1_path_listing,
    phase2_double,
    preprocess,
)
from congestlab.engine import CliqueNetwork, InvariantFault, Topology
from congestlab.graph import INF, Graph
from congestlab.oracles import brute_girth, neighborhood, prune_degenerate


def radius_one(g):
    return NeighborhoodState(1, [set(neighborhood(g, v, 1).edges) for v in range(g.n)])


def fidelity(g, state):
    return all(state.known[v] == set(neighborhood(g, v, state.radius).edges) for v in range(g.n) if g.degree(v))


class TestEstimate:
    def test_consistency_rules(self):
        assert GirthEstimate.plus_one(4).consistent_with(4)
        assert GirthEstimate.plus_one(4).consistent_with(5)
        assert not GirthEstimate.plus_one(4).consistent_with(6)
        assert GirthEstimate.acyclic().consistent_with(INF)
        assert not GirthEstimate.acyclic().consistent_with(3)
        assert not GirthEstimate.plus_one(4).consistent_with(INF)

    def test_str(self):
        assert str(GirthEstimate.plus_one(3)) == "PlusOne(3)"
        assert str(GirthEstimate.acyclic()) == "Acyclic"


class TestPreprocess:
    def test_tree_is_acyclic(self):
        est = preprocess(gr.random_tree(20, 2))
        assert isinstance(est, GirthEstimate) and est.kind is EstimateKind.ACYCLIC

    def test_c5_with_pendants(self):
        g = Graph.from_edges(8, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5), (2, 6), (3, 7)])
        est = preprocess(g)
        assert isinstance(est, GirthEstimate)
        assert str(est) == "Exact(5)" and est.witness.is_valid(g, 5)

    def test_dense_graph_unchanged(self):
        g = gr.gen_random(64, 0.5, 11)
        assert min(g.degree(v) for v in range(64)) >= 2
        out = preprocess(g)
        assert isinstance(out, Graph)
        assert out == g == prune_degenerate(g)

    @pytest.mark.parametrize("seed", range(10))
    def test_pruning_matches_sequential(self, seed):
        g = gr.gen_random(40, 0.7, seed)
        pend = Graph.from_edges(44, list(g.edges()) + [(0, 40), (40, 41), (41, 42), (5, 43)])
        out = preprocess(pend)
        assert out == prune_degenerate(pend)


class TestPhaseOne:
    def test_low_k_returns_radius_one(self):
        g = gr.complete_graph(4)
        w, state = phase1_path_listing(g)
        assert w is None and state.radius == 1 and fidelity(g, state)

    def test_strict_regime_rejects_small_n(self):
        # k = 5 at n = 1024, but the per-node edge sets exceed n at this size
        g = gr.gen_random(1024, 2 * 4500 / 1024**2, 3)
        with pytest.raises(RegimeError):
            phase1_path_listing(g, strict_regime=True)

    def test_relaxed_regime_charges_and_continues(self):
        g = gr.gen_random(1024, 2 * 4500 / 1024**2, 3)
        net = CliqueNetwork(Topology.clique(g))
        w, state = phase1_path_listing(g, net, strict_regime=False)
        assert w is None and state.radius == 1
        assert net.metrics.routing_calls == 1

    @pytest.mark.parametrize("seed", range(4))
    def test_redistribution_fidelity(self, seed):
        g, _ = gr.planted_girth_graph(30, 11, seed, extra_edges=5)
        net = CliqueNetwork(Topology.clique(g))
        views = [set(g.edges())] + [set() for _ in range(g.n - 1)]
        state = cg._phase1_redistribute(g, net, views, 2)
        assert state.radius == 2 and fidelity(g, state)


class TestPhaseTwo:
    def test_c10_doubles_then_settles(self):
        g = gr.cycle_graph(10)
        state = radius_one(g)
        radii = []
        for _ in range(5):
            res = phase2_double(g, state)
            if res.kind is not StateKind.STATE1:
                break
            assert fidelity(g, res.state)
            radii.append(res.state.radius)
            state = res.state
        assert radii[:2] == [2, 4]
        if res.kind is StateKind.EXACT:
            assert res.witness.is_valid(g, 10)
        else:
            assert brute_girth(g) in (2 * res.b + 1, 2 * res.b + 2)

    def test_planted_c8(self):
        g = gr.pad(gr.cycle_graph(8), 30)
        res = phase2_double(g, radius_one(g))
        assert res.kind is StateKind.STATE1 and res.state.radius == 2 and fidelity(g, res.state)
        res = phase2_double(g, res.state)
        assert (res.kind is StateKind.EXACT and res.witness.length == 8) or (
            res.kind is StateKind.STATE2 and res.b == 3
        )

    def test_petersen_state_two(self, petersen):
        res = phase2_double(petersen, radius_one(petersen))
        res = phase2_double(petersen, res.state)
        assert res.kind is StateKind.STATE2 and 5 in (2 * res.b + 1, 2 * res.b + 2)
        assert fidelity(petersen, res.state)

    def test_non_tree_faults(self):
        g = gr.complete_graph(4)
        state = NeighborhoodState(1, [set(g.edges()) for _ in range(4)])
        with pytest.raises(InvariantFault):
            phase2_double(g, state)


class TestDriver:
    def test_petersen(self, petersen):
        est = girth_plus_one(petersen)
        assert est.consistent_with(5)

    def test_c7_exact(self):
        assert str(girth_plus_one(gr.cycle_graph(7))) == "Exact(7)"

    def test_acyclic(self):
        assert girth_plus_one(gr.path_graph(9)).kind is EstimateKind.ACYCLIC

    def test_dense_path_uses_doubling(self):
        g = gr.gen_random(60, 0.4, 5)
        trace = GirthTrace()
        est = girth_plus_one(g, trace=trace)
        assert est.consistent_with(brute_girth(g))
        assert trace.phase2_calls >= 1 and trace.path[0].startswith("phase1")

    @given(st.integers(0, 10**6), st.integers(20, 60), st.floats(0.02, 0.5))
    def test_sound(self, seed, n, p):
        g = gr.gen_random(n, p, seed)
        est = girth_plus_one(g)
        girth = brute_girth(g)
        assert est.consistent_with(girth)
        if est.kind is EstimateKind.EXACT:
            assert est.witness.is_valid(g, est.value)
        if girth is not INF:
            assert est.kind is not EstimateKind.ACYCLIC
