"""Graph substrate: immutable simple graphs, patterns, witnesses and generators."""
from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from congestlab import rng


class GirthInf(enum.Enum):
    """Girth of an acyclic graph. Deliberately not an integer."""

    INF = "inf"

    def __str__(self) -> str:
        return "inf"


INF = GirthInf.INF


class GraphFormatError(ValueError):
    """Raised for malformed edge-list input or invalid graph data."""


Edge = tuple[int, int]


def _norm(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class Graph:
    """Immutable simple undirected graph on vertices ``0..n-1``."""

    __slots__ = ("n", "adj", "m", "__dict__")

    def __init__(self, n: int, adjacency: Sequence[Iterable[int]]):
        if n < 0:
            raise GraphFormatError("vertex count must be nonnegative")
        if len(adjacency) != n:
            raise GraphFormatError("adjacency length does not match n")
        raw = [list(nb) for nb in adjacency]
        adj = tuple(tuple(sorted(set(nb))) for nb in raw)
        total = 0
        for v, nb in enumerate(adj):
            if len(nb) != len(raw[v]):
                raise GraphFormatError(f"parallel edge at vertex {v}")
            for u in nb:
                if u == v:
                    raise GraphFormatError(f"self-loop at vertex {v}")
                if not 0 <= u < n:
                    raise GraphFormatError(f"neighbor {u} of {v} out of range")
            total += len(nb)
        self.n = n
        self.adj = adj
        sets = [frozenset(nb) for nb in adj]
        for v, nb in enumerate(adj):
            for u in nb:
                if v not in sets[u]:
                    raise GraphFormatError(f"asymmetric adjacency {v}->{u}")
        self.m = total // 2
        self._sets = sets

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge]) -> "Graph":
        adj: list[list[int]] = [[] for _ in range(n)]
        seen: set[Edge] = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise GraphFormatError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"edge ({u}, {v}) out of range for n={n}")
            e = _norm(u, v)
            if e in seen:
                raise GraphFormatError(f"parallel edge {e}")
            seen.add(e)
            adj[u].append(v)
            adj[v].append(u)
        return cls(n, adj)

    # basic queries
    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._sets[u]

    def edges(self) -> Iterator[Edge]:
        for v, nb in enumerate(self.adj):
            for u in nb:
                if v < u:
                    yield (v, u)

    @cached_property
    def edge_list(self) -> tuple[Edge, ...]:
        return tuple(self.edges())

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        for v, nb in enumerate(self.adj):
            indptr[v + 1] = indptr[v] + len(nb)
        indices = np.fromiter(
            (u for nb in self.adj for u in nb), dtype=np.int64, count=int(indptr[-1])
        )
        return indptr, indices

    @cached_property
    def max_degree(self) -> int:
        return max((len(nb) for nb in self.adj), default=0)

    def induced(self, keep: Iterable[int]) -> "Graph":
        """Subgraph on the same vertex ids with every vertex outside ``keep`` isolated."""
        ks = set(keep)
        return Graph.from_edges(self.n, ((u, v) for u, v in self.edges() if u in ks and v in ks))

    def with_edges(self, extra: Iterable[Edge]) -> "Graph":
        es = set(self.edge_list)
        for u, v in extra:
            es.add(_norm(u, v))
        return Graph.from_edges(self.n, sorted(es))

    def relabel(self, perm: Sequence[int]) -> "Graph":
        return Graph.from_edges(self.n, ((perm[u], perm[v]) for u, v in self.edges()))

    def components(self) -> np.ndarray:
        """Component label per node, labels numbered by smallest member."""
        label = np.full(self.n, -1, dtype=np.int64)
        c = 0
        for root in range(self.n):
            if label[root] >= 0:
                continue
            label[root] = c
            stack = [root]
            while stack:
                v = stack.pop()
                for u in self.adj[v]:
                    if label[u] < 0:
                        label[u] = c
                        stack.append(u)
            c += 1
        return label

    def is_connected(self) -> bool:
        return self.n <= 1 or int(self.components().max()) == 0

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __hash__(self) -> int:
        return hash((self.n, self.adj))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    # text format
    def to_edge_list(self) -> str:
        lines = [f"{self.n} {self.m}"]
        lines.extend(f"{u} {v}" for u, v in self.edges())
        return "\n".join(lines) + "\n"

    @classmethod
    def parse_edge_list(cls, text: str) -> "Graph":
        rows = []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if line:
                rows.append(line.split())
        if not rows:
            raise GraphFormatError("empty graph file")
        try:
            header = [int(t) for t in rows[0]]
            body = [tuple(int(t) for t in r) for r in rows[1:]]
        except ValueError as exc:
            raise GraphFormatError(f"non-integer token: {exc}") from None
        if len(header) != 2:
            raise GraphFormatError("header must be 'n m'")
        n, m = header
        if any(len(r) != 2 for r in body):
            raise GraphFormatError("edge lines must be 'u v'")
        if len(body) != m:
            raise GraphFormatError(f"header declares {m} edges, found {len(body)}")
        return cls.from_edges(n, body)

    @classmethod
    def read(cls, path: str) -> "Graph":
        with open(path, encoding="utf-8") as fh:
            return cls.parse_edge_list(fh.read())


@dataclass(frozen=True)
class DirectedGraph:
    """Directed graph with per-vertex sorted out-neighbor lists."""

    n: int
    out: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        for v, nb in enumerate(self.out):
            if v in nb:
                raise GraphFormatError(f"self-loop at vertex {v}")

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[Edge]) -> "DirectedGraph":
        out: list[set[int]] = [set() for _ in range(n)]
        for u, v in arcs:
            out[u].add(v)
        return cls(n, tuple(tuple(sorted(s)) for s in out))

    def arcs(self) -> Iterator[Edge]:
        for u, nb in enumerate(self.out):
            for v in nb:
                yield (u, v)

    def to_edge_list(self) -> str:
        arcs = list(self.arcs())
        return "\n".join([f"{self.n} {len(arcs)}"] + [f"{u} {v}" for u, v in arcs]) + "\n"


@dataclass(frozen=True)
class SubgraphPattern:
    """Pattern graph H on nodes z_0..z_{p-1}; node order fixes the back-degrees."""

    p: int
    edges: frozenset[Edge]
    name: str = ""

    def __post_init__(self) -> None:
        norm = frozenset(_norm(a, b) for a, b in self.edges)
        for a, b in norm:
            if a == b or not (0 <= a < self.p and 0 <= b < self.p):
                raise GraphFormatError(f"bad pattern edge ({a}, {b})")
        object.__setattr__(self, "edges", norm)

    @property
    def k(self) -> int:
        return len(self.edges)

    @cached_property
    def back(self) -> tuple[tuple[int, ...], ...]:
        """For each z_i, the earlier nodes z_t (t < i) adjacent to it."""
        return tuple(
            tuple(sorted(t for t in range(i) if _norm(t, i) in self.edges)) for i in range(self.p)
        )

    @property
    def d(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.back)

    def as_graph(self) -> Graph:
        return Graph.from_edges(self.p, sorted(self.edges))

    @classmethod
    def cycle(cls, length: int) -> "SubgraphPattern":
        if length < 3:
            raise GraphFormatError("cycle pattern needs length >= 3")
        return cls(length, frozenset((i, (i + 1) % length) for i in range(length)), f"C{length}")

    @classmethod
    def clique(cls, p: int) -> "SubgraphPattern":
        return cls(p, frozenset(itertools.combinations(range(p), 2)), f"K{p}")

    @classmethod
    def path(cls, p: int) -> "SubgraphPattern":
        """Path on p nodes (p-1 edges)."""
        return cls(p, frozenset((i, i + 1) for i in range(p - 1)), f"P{p}")

    @classmethod
    def parse(cls, spec: str) -> "SubgraphPattern":
        """Parse ``K3``, ``C6``, ``P4`` or an explicit edge spec ``0-1,1-2,2-0``."""
        s = spec.strip()
        mt = re.fullmatch(r"([KCP])(\d+)", s, flags=re.IGNORECASE)
        if mt:
            kind, size = mt.group(1).upper(), int(mt.group(2))
            if kind == "K":
                if size < 2:
                    raise GraphFormatError("clique pattern needs >= 2 nodes")
                return cls.clique(size)
            if kind == "C":
                return cls.cycle(size)
            if size < 2:
                raise GraphFormatError("path pattern needs >= 2 nodes")
            return cls.path(size)
        if s.lower() in ("triangle", "k3"):
            return cls.clique(3)
        pairs = []
        try:
            for tok in s.split(","):
                a, b = tok.split("-")
                pairs.append((int(a), int(b)))
        except ValueError:
            raise GraphFormatError(f"cannot parse pattern {spec!r}") from None
        if not pairs:
            raise GraphFormatError("empty pattern")
        p = 1 + max(max(a, b) for a, b in pairs)
        return cls(p, frozenset(pairs), s)


@dataclass(frozen=True)
class Instance:
    """A copy of H in G: image vertex set and image edge set, plus one witness map.

    Equality ignores the mapping, so automorphic copies collapse.
    """

    vertices: tuple[int, ...]
    edges: frozenset[Edge]
    mapping: tuple[int, ...] = field(compare=False)

    @classmethod
    def from_mapping(cls, h: SubgraphPattern, mapping: Sequence[int]) -> "Instance":
        mp = tuple(int(x) for x in mapping)
        return cls(
            tuple(sorted(mp)),
            frozenset(_norm(mp[a], mp[b]) for a, b in h.edges),
            mp,
        )


@dataclass(frozen=True)
class CycleWitness:
    """Ordered vertex sequence claimed to be a simple cycle."""

    vertices: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(int(v) for v in self.vertices))

    @property
    def length(self) -> int:
        return len(self.vertices)

    def is_valid(self, g: Graph, expected_len: int | None = None) -> bool:
        vs = self.vertices
        if len(vs) < 3 or len(set(vs)) != len(vs):
            return False
        if expected_len is not None and len(vs) != expected_len:
            return False
        if any(not (0 <= v < g.n) for v in vs):
            return False
        return all(g.has_edge(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs)))


def validate_witness(g: Graph, w: CycleWitness | Sequence[int], expected_len: int) -> bool:
    """True iff ``w`` is a simple cycle of length ``expected_len`` in ``g``."""
    if not isinstance(w, CycleWitness):
        w = CycleWitness(tuple(w))
    return w.is_valid(g, expected_len)


# generators


def empty_graph(n: int) -> Graph:
    return Graph(n, [()] * n)


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphFormatError("cycle needs n >= 3")
    return Graph.from_edges(n, ((i, (i + 1) % n) for i in range(n)))


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)))


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, ((0, i) for i in range(1, leaves + 1)))


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph.from_edges(a + b, ((i, a + j) for i in range(a) for j in range(b)))


def disjoint_union(*graphs: Graph) -> Graph:
    edges = []
    off = 0
    for g in graphs:
        edges.extend((u + off, v + off) for u, v in g.edges())
        off += g.n
    return Graph.from_edges(off, edges)


def pad(g: Graph, n: int) -> Graph:
    """Add isolated vertices so the graph has ``n`` vertices."""
    if n < g.n:
        raise GraphFormatError("cannot pad to fewer vertices")
    return Graph.from_edges(n, g.edges())


def gen_random(n: int, edge_prob: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p), deterministic per seed."""
    if n < 1:
        raise GraphFormatError("n must be >= 1")
    if not 0.0 <= edge_prob <= 1.0:
        raise GraphFormatError("edge probability must lie in [0, 1]")
    iu, ju = np.triu_indices(n, k=1)
    draws = rng.stream(seed, rng.GRAPH, 0).random(iu.shape[0])
    sel = draws < edge_prob
    return Graph.from_edges(n, zip(iu[sel].tolist(), ju[sel].tolist()))


def gen_bounded_degree(n: int, max_degree: int, seed: int, fill: float = 1.0) -> Graph:
    """Random graph with every degree <= max_degree: shuffled candidate pairs
    are added while both endpoints have room, until ``fill * n * max_degree / 2``
    edges or the candidates run out."""
    r = rng.stream(seed, rng.GRAPH, 4)
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    order = r.permutation(len(pairs))
    deg = [0] * n
    target = int(fill * n * max_degree / 2)
    edges = []
    for idx in order:
        if len(edges) >= target:
            break
        u, v = pairs[int(idx)]
        if deg[u] < max_degree and deg[v] < max_degree:
            edges.append((u, v))
            deg[u] += 1
            deg[v] += 1
    return Graph.from_edges(n, edges)


def random_tree(n: int, seed: int) -> Graph:
    """Uniform random recursive tree: vertex i attaches to a uniform earlier vertex."""
    if n <= 1:
        return empty_graph(max(n, 0))
    g = rng.stream(seed, rng.GRAPH, 1)
    parents = [int(g.integers(0, i)) for i in range(1, n)]
    return Graph.from_edges(n, ((p, i) for i, p in zip(range(1, n), parents)))


def plant_cycle(g: Graph, length: int, seed: int) -> tuple[Graph, CycleWitness]:
    """Add a simple ``length``-cycle on uniformly chosen vertices; returns graph and witness."""
    if length < 3:
        raise GraphFormatError("cycle length must be >= 3")
    if length > g.n:
        raise GraphFormatError(f"cycle length {length} exceeds n={g.n}")
    r = rng.stream(seed, rng.GRAPH, 2)
    verts = [int(v) for v in r.permutation(g.n)[:length]]
    extra = [(verts[i], verts[(i + 1) % length]) for i in range(length)]
    return g.with_edges(extra), CycleWitness(tuple(verts))


def _bfs_dist(adj: Sequence[Iterable[int]], src: int, limit: int) -> dict[int, int]:
    dist = {src: 0}
    frontier = [src]
    d = 0
    while frontier and d < limit:
        d += 1
        nxt = []
        for v in frontier:
            for u in adj[v]:
                if u not in dist:
                    dist[u] = d
                    nxt.append(u)
        frontier = nxt
    return dist


def planted_girth_graph(
    n: int,
    girth: int,
    seed: int,
    extra_edges: int = 0,
    hub_leaves: int = 0,
    connected: bool = True,
    hubs: int = 1,
) -> tuple[Graph, CycleWitness]:
    """Graph with girth exactly ``girth``: a planted cycle, a random tree around it,
    optional extra edges that never close a cycle shorter than ``girth``, and
    ``hub_leaves`` pendant vertices on each of ``hubs`` evenly spaced cycle vertices.
    """
    if girth < 3 or not 1 <= hubs <= girth or girth + hubs * hub_leaves > n:
        raise GraphFormatError("planted girth instance does not fit in n vertices")
    r = rng.stream(seed, rng.GRAPH, 3)
    perm = [int(v) for v in r.permutation(n)]
    cyc = perm[:girth]
    hub_vertices = [cyc[(i * girth) // hubs] for i in range(hubs)]
    adj: list[set[int]] = [set() for _ in range(n)]

    def add(u: int, v: int) -> None:
        adj[u].add(v)
        adj[v].add(u)

    for i in range(girth):
        add(cyc[i], cyc[(i + 1) % girth])
    rest = perm[girth:]
    leaves, others = rest[: hubs * hub_leaves], rest[hubs * hub_leaves :]
    for i, v in enumerate(leaves):
        add(hub_vertices[i // hub_leaves], v)
    attached = list(cyc) + list(leaves)
    for v in others:
        if connected or r.random() < 0.5:
            add(v, attached[int(r.integers(0, len(attached)))])
        attached.append(v)
    tries = 0
    added = 0
    while added < extra_edges and tries < 50 * (extra_edges + 1):
        tries += 1
        u, v = (int(x) for x in r.integers(0, n, 2))
        if u == v or v in adj[u]:
            continue
        if v in _bfs_dist(adj, u, girth - 2):
            continue
        add(u, v)
        added += 1
    return Graph(n, [sorted(s) for s in adj]), CycleWitness(tuple(cyc))
