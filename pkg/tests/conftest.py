import networkx as nx
import pytest
from hypothesis import HealthCheck, settings

from congestlab.graph import INF, Graph

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.load_profile("default")


def to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h


def nx_girth(g: Graph):
    value = nx.girth(to_nx(g))
    return INF if value == float("inf") else int(value)


def nx_cycle_count(g: Graph, length: int) -> int:
    return sum(1 for c in nx.simple_cycles(to_nx(g), length_bound=length) if len(c) == length)


@pytest.fixture
def petersen():
    from congestlab.graph import petersen_graph

    return petersen_graph()


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for num in sorted(results):
            terminalreporter.write_line(results[num])
