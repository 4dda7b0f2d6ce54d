"""C6 detection reduced to directed-triangle detection.

After heavy 6-cycle iterations come up empty, high-degree nodes are dropped
and every node draws a color in [6]. An arc u -> v of G' means some w has
c(w) = c(u) + 1 and c(v) = c(u) + 2 (mod 6) with u - w - v a path in G.
G' has a directed triangle exactly when G has a C6 whose colors step by +1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from congestlab import rng
from congestlab.congest.detect import DetectionReport, detect_heavy_c2k
from congestlab.engine import log2_ceil
from congestlab.graph import CycleWitness, DirectedGraph, Graph
from congestlab.oracles import enumerate_cycles


@dataclass
class EarlyFound:
    witness: CycleWitness
    report: DetectionReport


@dataclass
class Reduction:
    graph: DirectedGraph
    colors: np.ndarray
    kept: np.ndarray  # vertices of degree < sqrt(n)
    simulation_overhead: int  # rounds of G per round of G'
    report: DetectionReport


def reduction_iterations(n: int) -> int:
    return math.ceil(math.sqrt(n) * log2_ceil(n))


def prune_high_degree(g: Graph) -> tuple[Graph, np.ndarray]:
    """Drop every vertex with deg >= sqrt(n) (ids are kept, dropped ones isolated)."""
    n = g.n
    keep = np.array([g.degree(v) ** 2 < n for v in range(n)], dtype=bool)
    edges = [(u, v) for u, v in g.edges() if keep[u] and keep[v]]
    return Graph.from_edges(n, edges), keep


def build_reduction_graph(g: Graph, colors) -> DirectedGraph:
    c = np.asarray(colors, dtype=np.int64) % 6
    arcs = set()
    for w in range(g.n):
        for u in g.adj[w]:
            if c[w] != (c[u] + 1) % 6:
                continue
            for v in g.adj[w]:
                if v != u and c[v] == (c[u] + 2) % 6:
                    arcs.add((u, v))
    return DirectedGraph.from_arcs(g.n, sorted(arcs))


def reduce_c6_to_directed_triangles(
    g: Graph, seed: int = 0, iterations: int | None = None
) -> Reduction | EarlyFound:
    R = reduction_iterations(g.n) if iterations is None else iterations
    report = detect_heavy_c2k(g, 3, iterations=R, seed=seed)
    if report.witness is not None:
        return EarlyFound(report.witness, report)
    pruned, keep = prune_high_degree(g)
    colors = rng.stream(seed, rng.REDUCTION).integers(0, 6, g.n)
    dg = build_reduction_graph(pruned, colors)
    return Reduction(dg, colors, keep, max(1, pruned.max_degree), report)


def directed_triangles(dg: DirectedGraph) -> list[tuple[int, int, int]]:
    """All directed triangles u -> v -> w -> u, each once (u smallest)."""
    out_sets = [set(o) for o in dg.out]
    found = []
    for u in range(dg.n):
        for v in dg.out[u]:
            if v <= u:
                continue
            for w in dg.out[v]:
                if w > u and u in out_sets[w]:
                    found.append((u, v, w))
    return found


def well_colored_c6(g: Graph, colors) -> list[tuple[int, ...]]:
    """6-cycles whose colors increase by one (mod 6) in some orientation."""
    c = np.asarray(colors, dtype=np.int64) % 6
    hits = []
    for cyc in enumerate_cycles(g, 6):
        for order in (cyc, (cyc[0],) + tuple(reversed(cyc[1:]))):
            if all(c[order[(i + 1) % 6]] == (c[order[i]] + 1) % 6 for i in range(6)):
                hits.append(order)
                break
    return hits
