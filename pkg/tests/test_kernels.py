import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from congestlab import _kernels_py as pure
from congestlab import graph as gr
from congestlab import kernels
from congestlab.graph import SubgraphPattern

compiled = pytest.importorskip("congestlab._kernels")


def _arrays(g):
    indptr, indices = g.csr
    adj = np.zeros((g.n, g.n), dtype=np.uint8)
    for u, v in g.edges():
        adj[u, v] = adj[v, u] = 1
    return adj, indptr, indices


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")


@given(st.integers(0, 10_000), st.integers(3, 40), st.floats(0.0, 0.4))
def test_shortest_cycle_backends_agree(seed, n, p):
    g = gr.gen_random(n, p, seed)
    indptr, indices = g.csr
    a = pure.shortest_cycle(indptr, indices)
    b = compiled.shortest_cycle(indptr, indices)
    assert a[0] == b[0]


@given(st.integers(0, 10_000), st.integers(3, 7))
def test_cycles_backends_agree(seed, length):
    g = gr.gen_random(12, 0.3, seed)
    indptr, indices = g.csr
    a = {tuple(c) for c in pure.cycles_of_length(indptr, indices, length, 0)}
    b = {tuple(c) for c in compiled.cycles_of_length(indptr, indices, length, 0)}
    assert a == b


@given(st.integers(0, 10_000), st.sampled_from(["K3", "C4", "C5", "P4"]))
def test_match_backends_agree(seed, spec):
    g = gr.gen_random(10, 0.4, seed)
    h = SubgraphPattern.parse(spec)
    adj, indptr, indices = _arrays(g)
    back = [list(b) for b in h.back]
    cand = np.ones((h.p, g.n), dtype=np.uint8)
    a = sorted(map(tuple, pure.match_pattern(adj, indptr, indices, back, cand, 0)))
    b = sorted(map(tuple, compiled.match_pattern(adj, indptr, indices, back, cand, 0)))
    assert a == b


def test_match_respects_candidates():
    g = gr.complete_graph(5)
    adj, indptr, indices = _arrays(g)
    cand = np.zeros((3, 5), dtype=np.uint8)
    cand[0, 0] = cand[1, 1] = 1
    cand[2, 2:] = 1
    back = [list(b) for b in SubgraphPattern.clique(3).back]
    for impl in (pure, compiled):
        maps = sorted(map(tuple, impl.match_pattern(adj, indptr, indices, back, cand, 0)))
        assert maps == [(0, 1, 2), (0, 1, 3), (0, 1, 4)]
