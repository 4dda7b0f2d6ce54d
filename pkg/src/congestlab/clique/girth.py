"""Deterministic +1 girth approximation in the Congested Clique.

The driver runs three stages, each simulated node by node with every
communication step charged through :class:`~congestlab.engine.CliqueNetwork`:

* preprocessing: sparse graphs are gathered everywhere and solved locally;
  otherwise vertices that lie on no cycle are peeled off from one broadcast
  of ``(id, degree, xor of neighbor ids)`` per node;
* Phase I: every node learns a small hop-neighborhood (or the girth is found)
  by listing short paths inside families of edge segments;
* Phase II: neighborhoods are doubled until either a cycle becomes visible
  (exact answer) or the radius stalls just below half the girth, which pins
  the girth to one of two consecutive values.
"""
from __future__ import annotations

import enum
import itertools
import math
from collections import deque
from dataclasses import dataclass, field

from congestlab.engine import (
    CliqueNetwork,
    InvariantFault,
    RunMetrics,
    Topology,
    log2_ceil,
)
from congestlab.graph import CycleWitness, Edge, Graph, _norm
from congestlab.oracles import shortest_cycle
from congestlab.turan import SPARSE, girth_turan_k

C_SPARSE = 8  # gather threshold: m <= C_SPARSE * n


class RegimeError(InvariantFault):
    """Phase I was asked to run outside the parameter range its load bounds cover."""


class EstimateKind(enum.Enum):
    EXACT = "exact"
    PLUS_ONE = "plus_one"
    ACYCLIC = "acyclic"


@dataclass(frozen=True)
class GirthEstimate:
    """``EXACT``: girth == value. ``PLUS_ONE``: girth in {value, value + 1}."""

    kind: EstimateKind
    value: int | None = None
    witness: CycleWitness | None = None

    @classmethod
    def exact(cls, witness: CycleWitness) -> "GirthEstimate":
        return cls(EstimateKind.EXACT, witness.length, witness)

    @classmethod
    def plus_one(cls, a: int) -> "GirthEstimate":
        return cls(EstimateKind.PLUS_ONE, a)

    @classmethod
    def acyclic(cls) -> "GirthEstimate":
        return cls(EstimateKind.ACYCLIC)

    def consistent_with(self, girth: object) -> bool:
        if self.kind is EstimateKind.ACYCLIC:
            return not isinstance(girth, int)
        if not isinstance(girth, int):
            return False
        if self.kind is EstimateKind.EXACT:
            return girth == self.value
        assert self.value is not None
        return girth in (self.value, self.value + 1)

    def __str__(self) -> str:
        if self.kind is EstimateKind.EXACT:
            return f"Exact({self.value})"
        if self.kind is EstimateKind.PLUS_ONE:
            return f"PlusOne({self.value})"
        return "Acyclic"


class _Tree:
    """A node's view of its known neighborhood, rooted at the node."""

    def __init__(self, root: int, edges: set[Edge]):
        self.root = root
        self.edges = edges
        adj: dict[int, list[int]] = {root: []}
        for a, b in edges:
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        self.adj = adj
        dist = {root: 0}
        first: dict[int, int] = {root: -1}
        q = deque([root])
        while q:
            x = q.popleft()
            for y in adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    first[y] = y if x == root else first[x]
                    q.append(y)
        self.dist = dist
        self.first = first

    def is_tree(self) -> bool:
        return len(self.edges) == len(self.dist) - 1 and len(self.dist) == len(self.adj)

    def front(self, a: int) -> list[int]:
        return sorted(x for x, d in self.dist.items() if d == a)

    def annotated(self) -> list[tuple[Edge, int, int]]:
        """Each edge with its depth (closer endpoint's distance) and first-hop branch."""
        out = []
        for e in self.edges:
            a, b = e
            near = a if self.dist[a] <= self.dist[b] else b
            far = b if near == a else a
            out.append((e, self.dist[near], self.first[far]))
        return out


@dataclass
class NeighborhoodState:
    """Every node ``v`` knows ``known[v]``, the edge set of N_radius(v)."""

    radius: int
    known: list[set[Edge]]

    def vertices(self, v: int) -> set[int]:
        out = {v}
        for a, b in self.known[v]:
            out.add(a)
            out.add(b)
        return out


class StateKind(enum.Enum):
    EXACT = "exact"
    STATE1 = "state1"
    STATE2 = "state2"


@dataclass
class PhaseResult:
    kind: StateKind
    state: NeighborhoodState | None = None
    witness: CycleWitness | None = None
    b: int | None = None


@dataclass
class GirthTrace:
    """Diagnostics from one ``girth_plus_one`` run."""

    path: list[str] = field(default_factory=list)
    phase2_calls: int = 0
    metrics: RunMetrics = field(default_factory=RunMetrics)

    @property
    def primitive_calls(self) -> int:
        return self.metrics.routing_calls + self.metrics.broadcast_calls


def _edge_word(e: Edge) -> tuple[int, int]:
    return (e[0], e[1])


def _local_shortest(n: int, edges: set[Edge]) -> CycleWitness | None:
    if not edges:
        return None
    return shortest_cycle(Graph.from_edges(n, sorted(edges)))


def _broadcast_min_cycle(
    net: CliqueNetwork, g: Graph, views: list[set[Edge]]
) -> CycleWitness | None:
    """Every node broadcasts the length of the shortest cycle it sees; min wins."""
    seen: list[CycleWitness | None] = [_local_shortest(g.n, views[v]) for v in range(g.n)]
    vals = [(w.length if w else 0,) for w in seen]
    net.broadcast_all(vals)
    best = None
    for w in seen:
        if w is not None and (best is None or w.length < best.length):
            best = w
    return best


def preprocess(g: Graph, net: CliqueNetwork | None = None) -> GirthEstimate | Graph:
    """Sparse shortcut or 1-degenerate peeling. Returns an early estimate or the pruned graph."""
    net = net or CliqueNetwork(Topology.clique(g))
    n = g.n
    deg = [g.degree(v) for v in range(n)]
    up = [sum(1 for u in g.adj[v] if u > v) for v in range(n)]
    net.broadcast_all([(deg[v], up[v]) for v in range(n)])
    m = sum(deg) // 2
    if m <= C_SPARSE * n:
        return _gather(g, net)
    # each node announces (id, degree, xor of neighbor ids); everyone replays the peeling
    words = []
    for v in range(n):
        x = 0
        for u in g.adj[v]:
            x ^= u
        words.append((v, deg[v], x))
    table = net.broadcast_all(words)
    alive = _replay_peeling(n, table)
    return g.induced(v for v in range(n) if alive[v])


def _replay_peeling(n: int, table: list[tuple[int, ...]]) -> list[bool]:
    deg = [t[1] for t in table]
    xor = [t[2] for t in table]
    alive = [True] * n
    stack = [v for v in range(n) if deg[v] < 2]
    while stack:
        v = stack.pop()
        if not alive[v]:
            continue
        alive[v] = False
        if deg[v] == 1:
            u = xor[v]
            deg[u] -= 1
            xor[u] ^= v
            deg[v] = 0
            if alive[u] and deg[u] < 2:
                stack.append(u)
    return alive


def _gather(g: Graph, net: CliqueNetwork) -> GirthEstimate:
    """Every node learns every edge through one charged routing call."""
    n = g.n
    if g.m:
        owned = [[(v, u) for u in g.adj[v] if u > v] for v in range(n)]
        bits = max(len(o) for o in owned) * 2 * log2_ceil(n)
        net.gather_all(owned, bits, max_load=C_SPARSE)
    w = shortest_cycle(g)
    return GirthEstimate.exact(w) if w else GirthEstimate.acyclic()


def _radius_one_state(g: Graph) -> NeighborhoodState:
    return NeighborhoodState(1, [{_norm(v, u) for u in g.adj[v]} for v in range(g.n)])


def phase1_path_listing(
    g: Graph, net: CliqueNetwork | None = None, strict_regime: bool = True
) -> tuple[CycleWitness | None, NeighborhoodState]:
    """Phase I. Returns (witness of the girth or None, neighborhood knowledge).

    With ``strict_regime`` the segment family and per-node edge sets must fit
    the load bounds of the analysis; otherwise oversized loads are charged.
    """
    net = net or CliqueNetwork(Topology.clique(g))
    n, m = g.n, g.m
    k = girth_turan_k(n, m) if n >= 2 else SPARSE
    if k == SPARSE or k <= 4:
        return None, _radius_one_state(g)
    assert isinstance(k, int)
    r = k // 4
    segs = max(1, math.ceil(k * n ** (2 / k) / (20 * math.e)))
    size_r = min(r, segs)
    family = list(itertools.combinations(range(segs), size_r))
    if strict_regime and len(family) > n:
        raise RegimeError(f"{len(family)} segment subsets exceed n={n}")
    # edge i (in owner order) lies in segment floor(i * segs / m)
    edges = list(g.edges())
    seg_of = [i * segs // m for i in range(m)]
    by_seg: list[list[int]] = [[] for _ in range(segs)]
    for i, s in enumerate(seg_of):
        by_seg[s].append(i)
    holder = [idx % n for idx in range(len(family))]  # lexicographic rank = node id
    requests = []
    views: list[set[Edge]] = [set() for _ in range(n)]
    for idx, subset in enumerate(family):
        node = holder[idx]
        for s in subset:
            for i in by_seg[s]:
                e = edges[i]
                requests.append((e[0], node, _edge_word(e)))
                views[node].add(e)
    load = max((len(v) for v in views), default=0)
    if strict_regime and load > n:
        raise RegimeError(f"edge subset of size {load} exceeds n={n}")
    owned_max = max((sum(1 for u in g.adj[v] if u > v) for v in range(n)), default=0)
    net.route_load_balanced(requests, 2 * owned_max * log2_ceil(n))
    # a witnessed cycle is reported only when every cycle that short is covered
    covered_all = segs <= r
    reports: list[CycleWitness | None] = []
    for v in range(n):
        w = _local_shortest(n, views[v])
        if w is not None and not (covered_all or w.length <= r):
            w = None
        reports.append(w)
    net.broadcast_all([(w.length if w else 0,) for w in reports])
    found = [w for w in reports if w is not None]
    if found:
        return min(found, key=lambda w: w.length), _radius_one_state(g)
    rho = r // 2
    if rho <= 1:
        return None, _radius_one_state(g)
    return None, _phase1_redistribute(g, net, views, rho)


def _phase1_redistribute(
    g: Graph, net: CliqueNetwork, views: list[set[Edge]], rho: int
) -> NeighborhoodState:
    """Step 2 of Phase I: each v learns N_rho(v) from the listed paths."""
    n = g.n
    # every view-holder lists its paths of length <= rho; lowest holder id owns each path
    owner: dict[tuple[int, int], tuple[int, int]] = {}
    for w in range(n):
        if not views[w]:
            continue
        t = Graph.from_edges(n, sorted(views[w]))
        for src in range(n):
            if not t.adj[src]:
                continue
            dist = {src: 0}
            q = deque([src])
            while q:
                x = q.popleft()
                if dist[x] == rho:
                    continue
                for y in t.adj[x]:
                    if y not in dist:
                        dist[y] = dist[x] + 1
                        q.append(y)
            for dst, d in dist.items():
                key = (src, dst)
                if key not in owner or owner[key][0] > w:
                    owner[key] = (w, d)
    for v in range(n):
        owner[(v, v)] = (v, 0)
    requests = [(w, v, (u, d)) for (v, u), (w, d) in owner.items()]
    net.route_load_balanced(requests, n * log2_ceil(n))
    # v asks every member within rho - 1 hops for its incident edges
    near: list[list[int]] = [[] for _ in range(n)]
    for (v, u), (_, d) in owner.items():
        if d <= rho - 1:
            near[v].append(u)
    net.route_load_balanced(((v, u, (v,)) for v in range(n) for u in near[v]), n * log2_ceil(n))
    replies = ((u, v, _edge_word(_norm(u, x))) for v in range(n) for u in near[v] for x in g.adj[u])
    net.route_load_balanced(replies, 2 * g.max_degree * log2_ceil(n))
    known = [{_norm(u, x) for u in near[v] for x in g.adj[u]} for v in range(n)]
    return NeighborhoodState(rho, known)


def _contributions(tree: _Tree, radius: int) -> tuple[int, dict[int, int], list[tuple[Edge, int, int]]]:
    """Edges of N_radius(u) per first-hop branch; returns (total, per-branch, annotated)."""
    ann = [x for x in tree.annotated() if x[1] <= radius - 1]
    per_branch: dict[int, int] = {}
    for _, _, br in ann:
        per_branch[br] = per_branch.get(br, 0) + 1
    return len(ann), per_branch, ann


def phase2_double(
    g: Graph, state: NeighborhoodState, net: CliqueNetwork | None = None
) -> PhaseResult:
    """Phase II: double every node's known radius, or certify the girth to within one."""
    net = net or CliqueNetwork(Topology.clique(g))
    n, a = g.n, state.radius
    trees = [_Tree(v, state.known[v]) for v in range(n)]
    for t in trees:
        if not t.is_tree():
            raise InvariantFault(f"known neighborhood of node {t.root} is not a tree")
    fronts = [t.front(a) for t in trees]
    bits = n * log2_ceil(n)
    # u -> v for each v with u in F_a(v): the size of u's contribution
    totals = []
    branch = []
    for u in range(n):
        tot, per, _ = _contributions(trees[u], a)
        totals.append(tot)
        branch.append(per)

    def contrib(u: int, v: int) -> int:
        return totals[u] - branch[u].get(trees[u].first[v], 0)

    counts = [(u, v, (contrib(u, v),)) for v in range(n) for u in fronts[v]]
    net.route_load_balanced(counts, bits, max_load=1)
    sums = [0] * n
    for u, v, (c,) in counts:
        sums[v] += c
    table = net.broadcast_all([(sums[v], len(fronts[v])) for v in range(n)])
    if all(s < n for s, _ in table):
        new_known = _learn(g, net, trees, fronts, a, state)
        new_state = NeighborhoodState(2 * a, new_known)
        w = _broadcast_min_cycle(net, g, new_known)
        if w is not None:
            return PhaseResult(StateKind.EXACT, new_state, w)
        return PhaseResult(StateKind.STATE1, new_state)
    # State 2: find the largest extension i' whose contributions still fit
    fmax = max(f for _, f in table)
    vmax = min(v for v in range(n) if table[v][1] == fmax)  # ties by node id
    d = n // table[vmax][1]
    depth = min(d, a - 1)
    prefix_words = []
    prefix_sums = [[0] * (depth + 1) for _ in range(n)]
    if depth > 0:
        ann = [_contributions(trees[u], a)[2] for u in range(n)]
        for v in range(n):
            for u in fronts[v]:
                w_br = trees[u].first[v]
                cnt = [0] * (depth + 1)
                for _, dep, br in ann[u]:
                    if br != w_br and dep + 1 <= depth:
                        cnt[dep + 1] += 1
                run = 0
                for j in range(1, depth + 1):
                    run += cnt[j]
                    prefix_words.append((u, v, (j, run)))
                    prefix_sums[v][j] += run
        net.route_load_balanced(prefix_words, bits, max_load=1)
    own = []
    for v in range(n):
        best = 0
        for j in range(1, depth + 1):
            if prefix_sums[v][j] < n:
                best = j
            else:
                break
        own.append((best,))
    chosen = min(x for (x,) in net.broadcast_all(own))
    if chosen > 0:
        new_known = _learn(g, net, trees, fronts, chosen, state)
    else:
        new_known = [set(k) for k in state.known]
    b = a + chosen
    new_state = NeighborhoodState(b, new_known)
    w = _broadcast_min_cycle(net, g, new_known)
    if w is not None:
        return PhaseResult(StateKind.EXACT, new_state, w)
    return PhaseResult(StateKind.STATE2, new_state, b=b)


def _learn(
    g: Graph,
    net: CliqueNetwork,
    trees: list[_Tree],
    fronts: list[list[int]],
    radius: int,
    state: NeighborhoodState,
) -> list[set[Edge]]:
    """Each u in F_a(v) ships its radius-``radius`` edges outside its branch toward v."""
    n = g.n
    ann = [_contributions(trees[u], radius)[2] for u in range(n)]
    requests = []
    new_known = [set(k) for k in state.known]
    for v in range(n):
        for u in fronts[v]:
            w_br = trees[u].first[v]
            for e, _, br in ann[u]:
                if br != w_br:
                    requests.append((u, v, _edge_word(e)))
                    new_known[v].add(e)
    net.route_load_balanced(requests, n * log2_ceil(n), max_load=1)
    return new_known


def girth_plus_one(
    g: Graph, strict_regime: bool = False, trace: GirthTrace | None = None
) -> GirthEstimate:
    """+1 girth approximation; ``trace`` (if given) receives path and metrics."""
    trace = trace if trace is not None else GirthTrace()
    net = CliqueNetwork(Topology.clique(g))
    net.metrics = trace.metrics
    early = preprocess(g, net)
    if isinstance(early, GirthEstimate):
        trace.path.append("gather")
        return early
    pruned = early
    if pruned.m == 0:
        trace.path.append("pruned-empty")
        return GirthEstimate.acyclic()
    if pruned.m <= C_SPARSE * pruned.n:
        trace.path.append("gather-pruned")
        return _gather(pruned, net)
    witness, state = phase1_path_listing(pruned, net, strict_regime=strict_regime)
    trace.path.append(f"phase1(radius={state.radius})")
    if witness is not None:
        return GirthEstimate.exact(witness)
    cap = log2_ceil(g.n) + 1
    for _ in range(cap):
        res = phase2_double(pruned, state, net)
        trace.phase2_calls += 1
        trace.path.append(f"{res.kind.value}(radius={res.state.radius if res.state else '-'})")
        if res.kind is StateKind.EXACT:
            assert res.witness is not None
            return GirthEstimate.exact(res.witness)
        assert res.state is not None
        if res.kind is StateKind.STATE2:
            assert res.b is not None
            return GirthEstimate.plus_one(2 * res.b + 1)
        state = res.state
    raise InvariantFault(f"neighborhood doubling did not settle within {cap} rounds of doubling")
