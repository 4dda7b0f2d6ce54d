from hypothesis import given
from hypothesis import strategies as st

from congestlab import graph as gr
from congestlab.oracles import enumerate_cycles
from congestlab.turan import SPARSE, girth_bound_holds, girth_turan_k, turan_c2k_gate


def test_gate_below_bound():
    assert not turan_c2k_gate(100, 5000, 2)


def test_gate_empty():
    assert not turan_c2k_gate(10, 0, 3)


def test_gate_above_bound():
    assert 17 * 2 * 16**1.5 == 2176
    assert turan_c2k_gate(16, 2500, 2)


def test_gate_boundary_is_not_exceeded():
    assert not turan_c2k_gate(16, 2176, 2)
    assert turan_c2k_gate(16, 2177, 2)


def test_girth_k_examples():
    assert girth_turan_k(16, 80) == 2
    assert girth_turan_k(16, 16) == SPARSE
    assert girth_turan_k(256, 4352) == 2
    assert girth_turan_k(256, 4353) == 1


def test_girth_bound_exact_at_integer_powers():
    # 16^{3/2} + 16 = 80 exactly
    assert girth_bound_holds(16, 80, 2)
    assert not girth_bound_holds(16, 81, 2)


@given(st.integers(2, 5000), st.integers(0, 10**6), st.integers(0, 10**5))
def test_girth_k_monotone(n, m, extra):
    a, b = girth_turan_k(n, m), girth_turan_k(n, m + extra)
    rank = lambda k: float("inf") if k == SPARSE else k  # noqa: E731
    assert rank(b) <= rank(a)


@given(st.integers(2, 5000), st.integers(0, 10**6))
def test_girth_k_is_largest(n, m):
    k = girth_turan_k(n, m)
    if k != SPARSE:
        assert girth_bound_holds(n, m, k)
        assert not girth_bound_holds(n, m, k + 1)


@given(st.integers(4, 40), st.integers(0, 10_000), st.sampled_from([2, 3]))
def test_gate_implies_cycle(n, seed, k):
    g = gr.gen_random(n, 0.9, seed)
    if turan_c2k_gate(g.n, g.m, k):
        assert enumerate_cycles(g, 2 * k, 1)
