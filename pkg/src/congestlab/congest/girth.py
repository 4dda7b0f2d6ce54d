"""Phased exact girth computation in CONGEST.

Phase 3 exchanges neighbour lists. Phase k >= 4 runs a light BFS among
low-degree nodes, then heavy sampling: a k-round BFS from a sampled node s
and a one-token-per-node BFS from its neighbours. Once k exceeds ceil(log2 n) the
whole graph is gathered instead.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from congestlab import rng
from congestlab.congest import thresholds as th
from congestlab.congest.programs import (
    GirthLightBfs,
    GirthNeighborBfs,
    GirthSelfBfs,
    TriangleExchange,
)
from congestlab.engine import InvariantFault, RunMetrics, Topology, log2_ceil, run
from congestlab.graph import INF, CycleWitness, GirthInf, Graph
from congestlab.oracles import shortest_cycle


@dataclass
class PhaseRecord:
    k: int
    halted: bool
    halted_by: str | None
    rounds: int
    samples: int = 0
    simulated_samples: int = 0
    skipped_samples: int = 0


@dataclass
class CongestGirthResult:
    girth: int | GirthInf
    witness: CycleWitness | None
    halted_phase: int | None
    fallback: bool
    rounds: int
    trace: list[PhaseRecord] = field(default_factory=list)
    metrics: RunMetrics = field(default_factory=RunMetrics)

    def phases_without_halt(self) -> list[int]:
        return [p.k for p in self.trace if not p.halted]


def cycle_in_walk(walk: list[int]) -> list[int] | None:
    """First simple cycle (length >= 3) inside a closed walk."""
    seen: dict[int, int] = {}
    for i, v in enumerate(walk):
        if v in seen and i - seen[v] >= 3:
            return walk[seen[v] : i]
        seen[v] = i
    return None


def _chain(origin: int, start: int, preds) -> list[int]:
    path = [start]
    while path[-1] != origin:
        path.append(preds(path[-1]))
        if len(path) > 10_000:
            raise InvariantFault("predecessor chain does not terminate")
    return path


def _double_receipt_walk(programs, origin: int, u: int, w_lo: int, w_hi: int) -> list[int]:
    """origin -> ... -> w_lo -> u -> w_hi -> ... -> origin as a closed walk."""

    def pred_of(v: int) -> int:
        return programs[v].pred[origin]

    a = _chain(origin, w_lo, pred_of)
    b = _chain(origin, w_hi, pred_of)
    return list(reversed(a)) + [u] + b


def _witness_from_walk(g: Graph, walk: list[int], k: int) -> CycleWitness:
    cyc = cycle_in_walk(walk)
    if cyc is None or len(cyc) > k:
        raise InvariantFault(f"detection in phase {k} without a cycle of length <= {k}")
    w = CycleWitness(tuple(cyc))
    if not w.is_valid(g):
        raise InvariantFault(f"reconstructed cycle {cyc} is not a cycle of the graph")
    return w


def triangle_phase(g: Graph) -> tuple[CycleWitness | None, RunMetrics]:
    programs = [TriangleExchange() for _ in range(g.n)]
    outputs, metrics = run(Topology.congest(g), programs, max(1, g.max_degree) + 2)
    for u, out in enumerate(outputs):
        if out is not None:
            v, w = out
            return CycleWitness((u, v, w)), metrics
    return None, metrics


def light_phase(g: Graph, k: int) -> tuple[CycleWitness | None, RunMetrics]:
    n = g.n
    depth = (k + 1) // 2
    windows = [1] + [th.girth_light_window(n, k, t + 1) for t in range(1, depth)] + [0]
    participants = [th.girth_light_degree_ok(g.degree(v), n, k) for v in range(n)]
    programs = [GirthLightBfs(k, participants[v], windows) for v in range(n)]
    outputs, metrics = run(Topology.congest(g), programs, sum(windows) + 1, schedule=lambda t: windows[t])
    hits = sorted((u, out) for u, out in enumerate(outputs) if out is not None)
    if not hits:
        return None, metrics
    u, (origin, w_lo, w_hi) = hits[0]
    walk = _double_receipt_walk(programs, origin, u, w_lo, w_hi)
    return _witness_from_walk(g, walk, k), metrics


def heavy_sample(g: Graph, k: int, s: int) -> tuple[CycleWitness | None, str | None, RunMetrics]:
    """Self-BFS from s, then the neighbour BFS; both on fixed schedules."""
    n = g.n
    topo = Topology.congest(g)
    metrics = RunMetrics()
    selfs = [GirthSelfBfs(k, v == s) for v in range(n)]
    sched = [1] * k + [0]
    outputs, m = run(topo, selfs, k + 1, schedule=lambda t: sched[t])
    metrics.absorb(m)
    if outputs[s] is not None:

        def pred_of(v: int) -> int:
            return selfs[v].pred

        closers = sorted(v for v in range(n) if selfs[v].closing is not None and v != s)
        for x in closers:
            w2, _ = selfs[x].closing
            walk = list(reversed(_chain(s, x, pred_of))) + _chain(s, w2, pred_of)
            cyc = cycle_in_walk(walk)
            if cyc is not None and len(cyc) <= k:
                w = CycleWitness(tuple(cyc))
                if w.is_valid(g):
                    return w, "self", metrics
        raise InvariantFault("self-BFS halted without a reconstructible cycle")
    depth = (k + 1) // 2
    nbrs = set(g.adj[s])
    progs = [GirthNeighborBfs(k, v in nbrs) for v in range(n)]
    sched2 = [1] * depth + [0]
    outputs, m = run(topo, progs, depth + 1, schedule=lambda t: sched2[t])
    metrics.absorb(m)
    hits = sorted((u, out) for u, out in enumerate(outputs) if out is not None)
    if not hits:
        return None, None, metrics
    u, (origin, w_lo, w_hi) = hits[0]
    walk = _double_receipt_walk(progs, origin, u, w_lo, w_hi)
    return _witness_from_walk(g, walk, k), "neighbour", metrics


def local_cycle_bounds(g: Graph, limit: int) -> list[int]:
    """r(v): shortest closed walk found by a BFS from v (capped at ``limit``).

    r(v) <= L whenever v lies on a cycle of length L, and r(v) <= L always
    certifies a cycle of length <= L within distance L/2 of v.
    """
    n = g.n
    out = [limit + 1] * n
    for v in range(n):
        best = limit + 1
        dist = {v: 0}
        parent = {v: -1}
        frontier = [v]
        d = 0
        while frontier and 2 * d + 1 < best:
            nxt = []
            for x in frontier:
                for y in g.adj[x]:
                    if y == parent[x]:
                        continue
                    if y in dist:
                        best = min(best, dist[x] + dist[y] + 1)
                    else:
                        dist[y] = d + 1
                        parent[y] = x
                        nxt.append(y)
            frontier = nxt
            d += 1
        out[v] = best
    return out


def quiet_samples(g: Graph, k: int, bounds: list[int]) -> set[int]:
    """Nodes s with no r(v) <= k within distance k.

    Every halt in a heavy sample from s closes a non-backtracking walk of
    length <= k inside the radius-k ball around s, which would put a cycle of
    length <= k (and so a node with r(v) <= k) in that ball. Samples from
    quiet nodes therefore cannot halt.
    """
    sources = [v for v in range(g.n) if bounds[v] <= k]
    dist = {v: 0 for v in sources}
    frontier = sources
    for d in range(1, k + 1):
        nxt = []
        for x in frontier:
            for y in g.adj[x]:
                if y not in dist:
                    dist[y] = d
                    nxt.append(y)
        frontier = nxt
    return {v for v in range(g.n) if v not in dist}


def gather_rounds(g: Graph) -> int:
    return g.m + g.n


def exact_girth_congest(
    g: Graph,
    seed: int = 0,
    fast_forward: bool = True,
    samples: int | None = None,
) -> CongestGirthResult:
    """Run the phases until some node halts, or gather once k exceeds ceil(log2 n)."""
    n = g.n
    total = RunMetrics()
    trace: list[PhaseRecord] = []
    rounds = 0

    def finish(girth, witness, phase, fallback=False) -> CongestGirthResult:
        return CongestGirthResult(girth, witness, phase, fallback, rounds, trace, total)

    w, m = triangle_phase(g)
    total.absorb(m)
    rounds += m.rounds
    trace.append(PhaseRecord(3, w is not None, "triangle" if w else None, m.rounds))
    if w is not None:
        return finish(3, w, 3)
    cap = log2_ceil(n)
    bounds: list[int] | None = None
    k = 4
    while True:
        if k > cap:
            extra = gather_rounds(g)
            rounds += extra
            total.rounds += extra
            cyc = shortest_cycle(g)
            trace.append(PhaseRecord(k, True, "gather", extra))
            if cyc is None:
                return finish(INF, None, None, fallback=True)
            return finish(cyc.length, cyc, None, fallback=True)
        w, m = light_phase(g, k)
        total.absorb(m)
        rounds += m.rounds
        if w is not None:
            trace.append(PhaseRecord(k, True, "light", m.rounds))
            return finish(k, w, k)
        rec = PhaseRecord(k, False, None, m.rounds)
        R = th.girth_heavy_samples(n, k) if samples is None else samples
        per_sample = k + (k + 1) // 2
        draws = rng.stream(seed, rng.GIRTH, k).integers(0, n, R) if n else np.zeros(0, dtype=np.int64)
        cache: dict[int, tuple[CycleWitness | None, str | None]] = {}
        if fast_forward:
            if bounds is None:
                bounds = local_cycle_bounds(g, cap)
            cache = {v: (None, None) for v in quiet_samples(g, k, bounds)}
        rec.samples = R
        for s in draws.tolist():
            if s in cache and fast_forward:
                w, how = cache[s]
                if w is None:
                    rec.skipped_samples += 1
                    rounds += per_sample
                    rec.rounds += per_sample
                    continue
                sim_rounds = per_sample
            else:
                w, how, m = heavy_sample(g, k, s)
                total.absorb(m)
                sim_rounds = m.rounds
                rec.simulated_samples += 1
                cache[s] = (w, how)
            rounds += sim_rounds
            rec.rounds += sim_rounds
            if w is not None:
                rec.halted, rec.halted_by = True, how
                trace.append(rec)
                return finish(k, w, k)
        trace.append(rec)
        k += 1
