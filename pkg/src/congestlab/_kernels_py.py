"""Pure-Python kernels; same contract as the compiled ``_kernels`` module."""
from __future__ import annotations

from collections import deque

import numpy as np


def shortest_cycle(indptr: np.ndarray, indices: np.ndarray) -> tuple[int, int, int, int]:
    ip = indptr.tolist()
    ix = indices.tolist()
    n = len(ip) - 1
    best, broot, bx, by = 0, -1, -1, -1
    for r in range(n):
        dist = [-1] * n
        par = [-1] * n
        dist[r] = 0
        q = deque([r])
        while q:
            v = q.popleft()
            dv = dist[v]
            if best and 2 * dv + 1 >= best:
                break
            for e in range(ip[v], ip[v + 1]):
                u = ix[e]
                if dist[u] < 0:
                    dist[u] = dv + 1
                    par[u] = v
                    q.append(u)
                elif u != par[v]:
                    cand = dist[u] + dv + 1
                    if best == 0 or cand < best:
                        best, broot, bx, by = cand, r, v, u
    return best, broot, bx, by


def cycles_of_length(indptr: np.ndarray, indices: np.ndarray, length: int, limit: int) -> list:
    ip = indptr.tolist()
    ix = indices.tolist()
    n = len(ip) - 1
    out: list[tuple[int, ...]] = []
    if length < 3 or n < length:
        return out
    adj = [ix[ip[v] : ip[v + 1]] for v in range(n)]
    used = [False] * n
    for s in range(n):
        path = [s]
        used[s] = True
        stack = [iter(adj[s])]
        while stack:
            nxt = next(stack[-1], None)
            if nxt is None:
                stack.pop()
                v = path.pop()
                if path:
                    used[v] = False
                continue
            u = nxt
            if u <= s or used[u]:
                continue
            if len(path) == length - 1:
                if u > path[1] and s in adj[u]:
                    out.append(tuple(path) + (u,))
                    if 0 < limit <= len(out):
                        return out
                continue
            path.append(u)
            used[u] = True
            stack.append(iter(adj[u]))
        used[s] = False
    return out


def match_pattern(
    adj: np.ndarray,
    indptr: np.ndarray,
    indices: np.ndarray,
    back: list,
    cand: np.ndarray,
    limit: int,
) -> list:
    n = adj.shape[0]
    p = len(back)
    if p == 0:
        return [()]
    ip = indptr.tolist()
    ix = indices.tolist()
    am = adj.astype(bool).tolist()
    cm = cand.astype(bool).tolist()
    out: list[tuple[int, ...]] = []
    phi = [0] * p
    used = [False] * n

    def options(i: int):
        if not back[i]:
            return range(n)
        w = phi[back[i][0]]
        return ix[ip[w] : ip[w + 1]]

    def rec(i: int) -> bool:
        for v in options(i):
            if used[v] or not cm[i][v]:
                continue
            if any(not am[phi[t]][v] for t in back[i][1:]):
                continue
            phi[i] = v
            if i == p - 1:
                out.append(tuple(phi))
                if 0 < limit <= len(out):
                    return True
                continue
            used[v] = True
            stop = rec(i + 1)
            used[v] = False
            if stop:
                return True
        return False

    rec(0)
    return out
