"""Deterministic subgraph listing in the Congested Clique via H-partition trees.

A partition tree splits the work of finding copies of a p-node pattern H among
the nodes: each leaf part is owned by one node, which learns only the edges
between its part chain and enumerates H locally. The per-part edge counters
(Conditions 1 and 2) keep every node's share of edges small.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from congestlab import kernels
from congestlab.engine import CliqueNetwork, InvariantFault, RunMetrics, Topology, log2_ceil
from congestlab.graph import CycleWitness, Graph, Instance, SubgraphPattern
from congestlab.oracles import shortest_cycle
from congestlab.turan import SPARSE, girth_turan_k, turan_c2k_gate

C1 = 8
C2 = 32
C_LIST = 160

Interval = tuple[int, int]  # half-open vertex-id range [lo, hi)


def choose_x(n: int, p: int) -> int:
    return max(2, round(n ** (1.0 / p)))


def edges_between(g: Graph, a: Interval, b: Interval) -> int:
    """|E(A, B)| as ordered pairs: sum over vertices of A of their neighbors in B."""
    lo, hi = b
    total = 0
    for v in range(*a):
        for u in g.adj[v]:
            if lo <= u < hi:
                total += 1
    return total


def volume(g: Graph, a: Interval) -> int:
    return sum(g.degree(v) for v in range(*a))


@dataclass
class PartitionTree:
    """Layered partitions of V, keyed by the index chain of parent parts."""

    p: int
    x: int
    m: int
    n: int
    pattern: SubgraphPattern
    root: list[Interval]
    refinements: dict[tuple[int, ...], list[Interval]]  # multiset of root parts -> partition
    partitions: dict[tuple[int, ...], list[Interval]] = field(default_factory=dict)

    @property
    def m_tilde(self) -> int:
        return max(self.m, self.n * self.x)

    @property
    def threshold1(self) -> float:
        return C1 * self.m / self.x + self.n

    def threshold2(self, ell: int) -> float:
        return C2 * ell * self.m_tilde / self.x**2 + self.n

    def root_part_of(self, part: Interval) -> int:
        for j, (lo, hi) in enumerate(self.root):
            if lo <= part[0] and part[1] <= hi:
                return j
        raise InvariantFault(f"part {part} not inside one root part")

    def chains(self) -> list[tuple[int, ...]]:
        """All full index chains (j_0, ..., j_{p-1}): one per leaf part."""
        out: list[tuple[int, ...]] = []

        def rec(prefix: tuple[int, ...]) -> None:
            part = self.partitions[prefix]
            for j in range(len(part)):
                nxt = prefix + (j,)
                if len(nxt) == self.p:
                    out.append(nxt)
                else:
                    rec(nxt)

        rec(())
        return out

    def part_chain(self, chain: tuple[int, ...]) -> list[Interval]:
        return [self.partitions[chain[:i]][chain[i]] for i in range(len(chain))]

    def leaf_prefixes(self) -> list[tuple[int, ...]]:
        return sorted(k for k in self.partitions if len(k) == self.p - 1)


def _greedy(
    n: int,
    weights1: list[int],
    limit1: float,
    weights2: list[int] | None = None,
    limit2: float = math.inf,
) -> list[Interval]:
    """Scan vertices in id order; open a new part when a counter would exceed its limit."""
    parts: list[Interval] = []
    if n == 0:
        return parts
    start = 0
    c1 = c2 = 0
    for v in range(n):
        w1 = weights1[v]
        w2 = weights2[v] if weights2 is not None else 0
        if v > start and (c1 + w1 > limit1 or c2 + w2 > limit2):
            parts.append((start, v))
            start = v
            c1 = c2 = 0
        c1 += w1
        c2 += w2
    parts.append((start, n))
    return parts


def _split(parts: list[Interval], root: list[Interval]) -> list[Interval]:
    """Cut every part at root-part boundaries so the result refines ``root``."""
    cuts = sorted({lo for lo, _ in root})
    out = []
    for lo, hi in parts:
        inner = [c for c in cuts if lo < c < hi]
        bounds = [lo] + inner + [hi]
        out.extend((bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1))
    return out


def build_partition_tree(
    g: Graph, h: SubgraphPattern, net: CliqueNetwork | None = None
) -> PartitionTree:
    """Construct an H-partition tree; all counters and bounds are asserted."""
    net = net or CliqueNetwork(Topology.clique(g))
    n, m, p = g.n, g.m, h.p
    x = choose_x(n, p)
    tree = PartitionTree(p, x, m, n, h, [], {})
    deg = [g.degree(v) for v in range(n)]
    bits = 2 * g.max_degree * log2_ceil(n) + log2_ceil(n)
    # builders of R collect every degree, then broadcast the parts
    root_builders = list(range(min(x, n)))
    net.route_load_balanced(
        ((v, b, (deg[v],)) for v in range(n) for b in root_builders), bits, max_load=1
    )
    root = _greedy(n, deg, tree.threshold1)
    if len(root) > max(1, x // 2):
        raise InvariantFault(f"root partition has {len(root)} parts > x/2 = {x / 2}")
    tree.root = root
    _broadcast_parts(net, n, [root], root_builders)
    # every node now computes its degree into each root part
    root_of = [0] * n
    for j, (lo, hi) in enumerate(root):
        for v in range(lo, hi):
            root_of[v] = j
    into = [[0] * len(root) for _ in range(n)]
    for v in range(n):
        for u in g.adj[v]:
            into[v][root_of[u]] += 1
    keys: list[tuple[int, ...]] = []
    for ell in range(1, p):
        keys.extend(itertools.combinations_with_replacement(range(len(root)), ell))
    # builder roles wrap round-robin when x * (#partitions) exceeds n
    requests = []
    for idx, key in enumerate(keys):
        builders = [(x * (idx + 1) + b) % n for b in range(x)]
        for v in range(n):
            s = sum(into[v][j] for j in key)
            for b in builders:
                requests.append((v, b, (deg[v], s)))
    if requests:
        net.route_load_balanced(requests, bits)
    refinements: dict[tuple[int, ...], list[Interval]] = {}
    for key in keys:
        weights2 = [sum(into[v][j] for j in key) for v in range(n)]
        parts = _split(_greedy(n, deg, tree.threshold1, weights2, tree.threshold2(len(key))), root)
        if len(parts) > x:
            raise InvariantFault(f"refinement {key} has {len(parts)} parts > x = {x}")
        refinements[key] = parts
    tree.refinements = refinements
    if keys:
        _broadcast_parts(net, n, list(refinements.values()), list(range(n)))
    _assemble(tree)
    return tree


def _broadcast_parts(net: CliqueNetwork, n: int, partitions: list[list[Interval]], builders: list[int]) -> None:
    """Builders announce part descriptors (first, last vertex) in broadcast slots."""
    descriptors = [(lo, hi - 1) for parts in partitions for lo, hi in parts]
    slots = max(1, len(builders))
    rounds = math.ceil(len(descriptors) / slots) if descriptors else 0
    for r in range(rounds):
        chunk = descriptors[r * slots : (r + 1) * slots]
        words = [(0, 0)] * n
        for i, d in enumerate(chunk):
            words[builders[i] % n] = d
        net.broadcast_all(words)


def _assemble(tree: PartitionTree) -> None:
    """Local replay: layer i uses the refinement keyed by its H-neighbors' root parts."""
    h = tree.pattern
    tree.partitions = {(): tree.root}

    def rec(prefix: tuple[int, ...], root_parts: tuple[int, ...]) -> None:
        i = len(prefix)
        if i == tree.p:
            return
        part_list = tree.partitions[prefix]
        for j, part in enumerate(part_list):
            nxt = prefix + (j,)
            rp = root_parts + (tree.root_part_of(part),)
            if len(nxt) == tree.p:
                continue
            key = tuple(sorted(rp[t] for t in h.back[len(nxt)]))
            tree.partitions[nxt] = tree.refinements[key] if key else tree.root
            rec(nxt, rp)

    rec((), ())


@dataclass
class TreeCertificate:
    violations: list[str]
    max_parts: int
    root_parts: int

    @property
    def ok(self) -> bool:
        return not self.violations


def certify_tree(g: Graph, tree: PartitionTree) -> TreeCertificate:
    """Recompute Conditions 1 and 2 and the part-count bounds from scratch."""
    bad: list[str] = []
    n = g.n
    h = tree.pattern
    for prefix, parts in tree.partitions.items():
        covered = []
        for lo, hi in parts:
            covered.extend(range(lo, hi))
        if covered != list(range(n)):
            bad.append(f"partition {prefix} does not cover V exactly")
        if len(parts) > tree.x:
            bad.append(f"partition {prefix} has {len(parts)} parts > x")
        for part in parts:
            if volume(g, part) > tree.threshold1:
                bad.append(f"condition 1 fails for {part} in {prefix}")
            if prefix:
                try:
                    tree.root_part_of(part)
                except InvariantFault:
                    bad.append(f"partition {prefix} does not refine the root")
    if len(tree.root) > max(1, tree.x // 2):
        bad.append("root partition exceeds x/2 parts")
    for chain in tree.chains():
        parts = tree.part_chain(chain)
        for i in range(1, tree.p):
            back = h.back[i]
            total = sum(edges_between(g, parts[i], parts[t]) for t in back)
            if total > tree.threshold2(len(back)) and back:
                bad.append(f"condition 2 fails at layer {i} of chain {chain}")
    max_parts = max(len(p) for p in tree.partitions.values())
    return TreeCertificate(bad, max_parts, len(tree.root))


@dataclass
class ListingReport:
    instances: set[Instance]
    tree: PartitionTree
    metrics: RunMetrics
    max_learned: int


def list_with_tree(
    g: Graph, h: SubgraphPattern, tree: PartitionTree, net: CliqueNetwork | None = None
) -> tuple[set[Instance], int]:
    """List all copies of H given a valid tree. Returns (instances, max edges learned by a node)."""
    net = net or CliqueNetwork(Topology.clique(g))
    n, p = g.n, h.p
    leaves = tree.leaf_prefixes()
    # leaf part j of the leaf partition with rank r goes to node (r x + j) mod n
    assignment: list[tuple[int, list[Interval]]] = []
    for rank, prefix in enumerate(leaves):
        for j in range(len(tree.partitions[prefix])):
            assignment.append(((rank * tree.x + j) % n, tree.part_chain(prefix + (j,))))
    bound = C2 * h.k * tree.m_tilde / tree.x**2 + p * n
    requests = []
    learned: list[set[tuple[int, int]]] = []
    for node, chain in assignment:
        es: set[tuple[int, int]] = set()
        for i in range(p):
            lo_i, hi_i = chain[i]
            for t in h.back[i]:
                lo_t, hi_t = chain[t]
                for a in range(lo_i, hi_i):
                    for b in g.adj[a]:
                        if lo_t <= b < hi_t:
                            es.add((a, b) if a < b else (b, a))
                            requests.append((a, node, (a, b)))
        if len(es) > bound:
            raise InvariantFault(f"leaf role at node {node} learns {len(es)} edges > bound {bound:.0f}")
        learned.append(es)
    net.route_load_balanced(requests, 2 * g.max_degree * log2_ceil(n))
    found: set[Instance] = set()
    back = [list(b) for b in h.back]
    for (_, chain), es in zip(assignment, learned):
        if len(es) >= h.k:
            found.update(_enumerate_local(n, es, h, back, chain))
    return found, max((len(e) for e in learned), default=0)


def _enumerate_local(
    n: int, es: set[tuple[int, int]], h: SubgraphPattern, back: list[list[int]], chain: list[Interval]
) -> set[Instance]:
    adj = np.zeros((n, n), dtype=np.uint8)
    lists: list[list[int]] = [[] for _ in range(n)]
    for a, b in es:
        adj[a, b] = adj[b, a] = 1
        lists[a].append(b)
        lists[b].append(a)
    indptr = np.zeros(n + 1, dtype=np.int64)
    for v in range(n):
        indptr[v + 1] = indptr[v] + len(lists[v])
    indices = np.fromiter((u for l in lists for u in sorted(l)), dtype=np.int64, count=int(indptr[-1]))
    cand = np.zeros((h.p, n), dtype=np.uint8)
    for i, (lo, hi) in enumerate(chain):
        cand[i, lo:hi] = 1
    maps = kernels.match_pattern(adj, indptr, indices, back, cand, 0)
    return {Instance.from_mapping(h, mp) for mp in maps}


def list_subgraph(g: Graph, h: SubgraphPattern, report: bool = False):
    """All copies of H in G. With ``report`` returns a :class:`ListingReport`."""
    net = CliqueNetwork(Topology.clique(g))
    if h.p > g.n or (h.k > g.m):
        tree = build_partition_tree(g, h, net) if h.p <= g.n else None
        found: set[Instance] = set()
        if report:
            return ListingReport(found, tree, net.metrics, 0)  # type: ignore[arg-type]
        return found
    tree = build_partition_tree(g, h, net)
    found, max_learned = list_with_tree(g, h, tree, net)
    budget = C_LIST * (h.k * tree.m_tilde / g.n ** (1 + 2 / h.p) + h.p)
    if net.metrics.rounds > budget:
        raise InvariantFault(f"listing used {net.metrics.rounds} rounds > budget {budget:.1f}")
    if report:
        return ListingReport(found, tree, net.metrics, max_learned)
    return found


class DetectKind(enum.Enum):
    FOUND = "found"
    GUARANTEED = "guaranteed_exists"
    FREE = "free"


@dataclass(frozen=True)
class DetectResult:
    kind: DetectKind
    witness: CycleWitness | None = None


def detect_c2k(g: Graph, k: int) -> DetectResult:
    """Turan gate first; otherwise list 2k-cycles."""
    if turan_c2k_gate(g.n, g.m, k):
        return DetectResult(DetectKind.GUARANTEED)
    found = list_subgraph(g, SubgraphPattern.cycle(2 * k))
    if not found:
        return DetectResult(DetectKind.FREE)
    inst = min(found, key=lambda i: i.vertices)
    w = CycleWitness(inst.mapping)
    if not w.is_valid(g, 2 * k):
        raise InvariantFault("listed cycle fails validation")
    return DetectResult(DetectKind.FOUND, w)


def exact_girth_sparse(g: Graph, known_lower: int) -> int | object:
    """Exact girth given a certified lower bound: girth > known_lower."""
    from congestlab.graph import INF

    n, m = g.n, g.m
    k = girth_turan_k(n, m) if n >= 2 else SPARSE
    if k == SPARSE:
        w = shortest_cycle(g)  # whole-graph gather
        if w is None:
            return INF
        if w.length <= known_lower:
            raise InvariantFault(f"girth {w.length} violates the lower bound {known_lower}")
        return w.length
    assert isinstance(k, int)
    for length in range(3, 2 * k + 1):
        if list_subgraph(g, SubgraphPattern.cycle(length)):
            if length <= known_lower:
                raise InvariantFault(f"cycle of length {length} violates the lower bound {known_lower}")
            return length
    if list_subgraph(g, SubgraphPattern.cycle(2 * k + 1)):
        return 2 * k + 1
    if list_subgraph(g, SubgraphPattern.cycle(2 * k + 2)):
        return 2 * k + 2
    raise InvariantFault("no cycle up to 2k+2 despite the edge-count guarantee")
