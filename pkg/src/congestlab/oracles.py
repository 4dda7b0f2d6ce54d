"""Brute-force sequential oracles that every protocol is checked against."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from congestlab import kernels
from congestlab.graph import (
    INF,
    CycleWitness,
    Edge,
    GirthInf,
    Graph,
    GraphFormatError,
    Instance,
    SubgraphPattern,
    _norm,
)

MAX_ORACLE_PATTERN = 10


def shortest_cycle(g: Graph) -> CycleWitness | None:
    """A shortest cycle of ``g``, or None for a forest."""
    length, root, x, y = kernels.shortest_cycle(*g.csr)
    if length == 0:
        return None
    par = {root: -1}
    q = deque([root])
    while q:
        v = q.popleft()
        for u in g.adj[v]:
            if u not in par:
                par[u] = v
                q.append(u)

    def up(v: int) -> list[int]:
        out = []
        while v != -1:
            out.append(v)
            v = par[v]
        return out

    px, py = up(x), up(y)
    # BFS trees may differ from the kernel's only in tie order; rebuild if needed
    cyc = list(reversed(px)) + py[:-1]
    w = CycleWitness(tuple(cyc))
    if w.is_valid(g, length):
        return w
    return _shortest_cycle_through(g, root, length)


def _shortest_cycle_through(g: Graph, root: int, length: int) -> CycleWitness:
    # fallback: search cycles of the known length through root
    for cyc in kernels.cycles_of_length(*g.csr, length, 0):
        if root in cyc:
            return CycleWitness(cyc)
    raise AssertionError("no cycle of the reported girth through its root")


def brute_girth(g: Graph) -> int | GirthInf:
    length = kernels.shortest_cycle(*g.csr)[0]
    return INF if length == 0 else int(length)


def enumerate_cycles(g: Graph, length: int, limit: int = 0) -> list[tuple[int, ...]]:
    """All simple cycles of ``length``, each once: smallest vertex first, then the
    smaller of its two cycle neighbours."""
    return kernels.cycles_of_length(*g.csr, length, limit)


def has_cycle_of_length(g: Graph, length: int) -> bool:
    return bool(kernels.cycles_of_length(*g.csr, length, 1))


def enumerate_subgraph(g: Graph, h: SubgraphPattern) -> set[Instance]:
    """All copies of ``h`` in ``g`` by plain backtracking (no shared kernels)."""
    if h.p > MAX_ORACLE_PATTERN:
        raise GraphFormatError(f"pattern with {h.p} nodes exceeds oracle limit {MAX_ORACLE_PATTERN}")
    if h.p > g.n:
        return set()
    hadj = [set() for _ in range(h.p)]
    for a, b in h.edges:
        hadj[a].add(b)
        hadj[b].add(a)
    # most-constrained-first order over pattern nodes
    order: list[int] = []
    remaining = set(range(h.p))
    while remaining:
        best = max(remaining, key=lambda z: (sum(1 for t in hadj[z] if t in order), len(hadj[z]), -z))
        order.append(best)
        remaining.remove(best)
    found: set[Instance] = set()
    phi: dict[int, int] = {}
    used: set[int] = set()

    def rec(i: int) -> None:
        if i == h.p:
            found.add(Instance.from_mapping(h, [phi[z] for z in range(h.p)]))
            return
        z = order[i]
        mapped_nb = [phi[t] for t in hadj[z] if t in phi]
        pool: Iterable[int] = g.adj[mapped_nb[0]] if mapped_nb else range(g.n)
        for v in pool:
            if v in used or len(g.adj[v]) < len(hadj[z]):
                continue
            if all(g.has_edge(v, w) for w in mapped_nb):
                phi[z] = v
                used.add(v)
                rec(i + 1)
                used.discard(v)
                del phi[z]

    rec(0)
    return found


def prune_degenerate(g: Graph) -> Graph:
    """Iteratively isolate vertices of degree < 2; the surviving graph keeps all cycles."""
    deg = [len(nb) for nb in g.adj]
    alive = [True] * g.n
    stack = [v for v in range(g.n) if deg[v] < 2]
    while stack:
        v = stack.pop()
        if not alive[v]:
            continue
        alive[v] = False
        for u in g.adj[v]:
            if alive[u]:
                deg[u] -= 1
                if deg[u] < 2:
                    stack.append(u)
    return g.induced(v for v in range(g.n) if alive[v])


@dataclass(frozen=True)
class Neighborhood:
    """The graph N_i(v): vertices within distance i, and all edges incident to
    vertices within distance i - 1."""

    center: int
    radius: int
    vertices: frozenset[int]
    edges: frozenset[Edge]

    def is_tree(self) -> bool:
        if len(self.edges) != len(self.vertices) - 1:
            return False
        adj: dict[int, list[int]] = {v: [] for v in self.vertices}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        seen = {self.center}
        stack = [self.center]
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == len(self.vertices)


def distances(g: Graph, src: int, limit: int | None = None) -> dict[int, int]:
    dist = {src: 0}
    q = deque([src])
    while q:
        v = q.popleft()
        if limit is not None and dist[v] >= limit:
            continue
        for u in g.adj[v]:
            if u not in dist:
                dist[u] = dist[v] + 1
                q.append(u)
    return dist


def neighborhood(g: Graph, v: int, radius: int) -> Neighborhood:
    if not 0 <= v < g.n:
        raise GraphFormatError(f"vertex {v} out of range")
    dist = distances(g, v, radius)
    inner = [u for u, d in dist.items() if d <= radius - 1]
    edges = frozenset(_norm(u, w) for u in inner for w in g.adj[u])
    return Neighborhood(v, radius, frozenset(dist), edges)
