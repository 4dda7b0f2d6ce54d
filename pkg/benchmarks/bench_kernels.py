"""Compare the compiled kernels against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--sizes 64 128 256] [--repeat 3] [--json out.json]
"""
from __future__ import annotations

import argparse
import json
import time
from dataclasses import asdict, dataclass

import numpy as np

from congestlab import _kernels_py as pure
from congestlab import graph as gr
from congestlab.graph import SubgraphPattern

try:
    from congestlab import _kernels as compiled
except ImportError:  # pragma: no cover - depends on the build
    compiled = None


@dataclass
class Row:
    kernel: str
    n: int
    m: int
    python_s: float
    cython_s: float | None

    @property
    def speedup(self) -> float | None:
        if self.cython_s is None or self.cython_s == 0:
            return None
        return self.python_s / self.cython_s


def best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def dense_adj(g) -> np.ndarray:
    adj = np.zeros((g.n, g.n), dtype=np.uint8)
    for u, v in g.edges():
        adj[u, v] = adj[v, u] = 1
    return adj


def cases(n: int, seed: int):
    g = gr.gen_random(n, 4.0 / n, seed)
    indptr, indices = g.csr
    yield "shortest_cycle", g, lambda impl: impl.shortest_cycle(indptr, indices)
    yield "cycles_of_length(6)", g, lambda impl: impl.cycles_of_length(indptr, indices, 6, 0)
    h = SubgraphPattern.cycle(5)
    adj = dense_adj(g)
    back = [list(b) for b in h.back]
    cand = np.ones((h.p, g.n), dtype=np.uint8)
    yield "match_pattern(C5)", g, lambda impl: impl.match_pattern(adj, indptr, indices, back, cand, 0)


def bench(sizes: list[int], repeat: int, seed: int) -> list[Row]:
    rows = []
    for n in sizes:
        for name, g, call in cases(n, seed):
            py = best_of(lambda: call(pure), repeat)
            cy = best_of(lambda: call(compiled), repeat) if compiled is not None else None
            rows.append(Row(name, g.n, g.m, py, cy))
    return rows


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[64, 128, 256])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", help="also write rows to this file")
    args = ap.parse_args(argv)
    rows = bench(args.sizes, args.repeat, args.seed)
    print(f"{'kernel':<22}{'n':>6}{'m':>7}{'python [s]':>13}{'cython [s]':>13}{'speedup':>9}")
    for r in rows:
        cy = f"{r.cython_s:13.5f}" if r.cython_s is not None else f"{'n/a':>13}"
        sp = f"{r.speedup:8.1f}x" if r.speedup is not None else f"{'n/a':>9}"
        print(f"{r.kernel:<22}{r.n:>6}{r.m:>7}{r.python_s:13.5f}{cy}{sp}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump([asdict(r) | {"speedup": r.speedup} for r in rows], fh, indent=2, sort_keys=True)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
