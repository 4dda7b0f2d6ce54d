# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Semantics mirror congestlab._kernels_py exactly."""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()

ctypedef cnp.int64_t i64


def shortest_cycle(const i64[:] indptr, const i64[:] indices):
    """Return (girth, root, x, y); girth 0 means acyclic.

    The cycle is the BFS tree path root->x, edge (x, y), tree path y->root.
    """
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef i64 best = 0, broot = -1, bx = -1, by = -1
    cdef i64 *dist
    cdef i64 *par
    cdef i64 *queue
    cdef Py_ssize_t r, head, tail, e
    cdef i64 v, u, cand
    if n <= 0:
        return 0, -1, -1, -1
    dist = <i64 *> malloc(n * sizeof(i64))
    par = <i64 *> malloc(n * sizeof(i64))
    queue = <i64 *> malloc(n * sizeof(i64))
    try:
        for r in range(n):
            for e in range(n):
                dist[e] = -1
            dist[r] = 0
            par[r] = -1
            head = 0
            tail = 1
            queue[0] = r
            while head < tail:
                v = queue[head]
                head += 1
                if best and 2 * dist[v] + 1 >= best:
                    break
                for e in range(indptr[v], indptr[v + 1]):
                    u = indices[e]
                    if dist[u] < 0:
                        dist[u] = dist[v] + 1
                        par[u] = v
                        queue[tail] = u
                        tail += 1
                    elif u != par[v]:
                        cand = dist[u] + dist[v] + 1
                        if best == 0 or cand < best:
                            best = cand
                            broot = r
                            bx = v
                            by = u
    finally:
        free(dist)
        free(par)
        free(queue)
    return int(best), int(broot), int(bx), int(by)


def cycles_of_length(const i64[:] indptr, const i64[:] indices, int length, long limit):
    """All simple cycles of the given length, canonical: min vertex first, v1 < v_last."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef list out = []
    cdef list row
    cdef i64 *path
    cdef i64 *pos
    cdef char *used
    cdef Py_ssize_t depth, s, e, i
    cdef i64 v, u
    if length < 3 or n < length:
        return out
    path = <i64 *> malloc(length * sizeof(i64))
    pos = <i64 *> malloc(length * sizeof(i64))
    used = <char *> malloc(n)
    try:
        for e in range(n):
            used[e] = 0
        for s in range(n):
            path[0] = s
            used[s] = 1
            depth = 0
            pos[0] = indptr[s]
            while depth >= 0:
                v = path[depth]
                if pos[depth] >= indptr[v + 1]:
                    if depth > 0:
                        used[v] = 0
                    depth -= 1
                    continue
                u = indices[pos[depth]]
                pos[depth] += 1
                if u <= s or used[u]:
                    continue
                if depth + 1 == length - 1:
                    # close the cycle back to s, keep one orientation
                    if u > path[1]:
                        for e in range(indptr[u], indptr[u + 1]):
                            if indices[e] == s:
                                row = []
                                for i in range(length - 1):
                                    row.append(int(path[i]))
                                row.append(int(u))
                                out.append(tuple(row))
                                if limit > 0 and len(out) >= limit:
                                    return out
                                break
                    continue
                depth += 1
                path[depth] = u
                used[u] = 1
                pos[depth] = indptr[u]
            used[s] = 0
    finally:
        free(path)
        free(pos)
        free(used)
    return out


def match_pattern(const unsigned char[:, :] adj, const i64[:] indptr, const i64[:] indices,
                  list back, const unsigned char[:, :] cand, long limit):
    """Injective maps phi of pattern nodes 0..p-1 into the host.

    phi(i) must satisfy cand[i, phi(i)] and be adjacent to phi(t) for every t in back[i].
    """
    cdef Py_ssize_t n = adj.shape[0]
    cdef Py_ssize_t p = len(back)
    cdef list out = []
    cdef list row
    cdef i64 *phi
    cdef i64 *pos
    cdef i64 *end
    cdef char *used
    cdef i64 **bk
    cdef i64 *nbk
    cdef Py_ssize_t depth, i, j, anchor
    cdef i64 v, w
    cdef bint ok
    if p == 0:
        return [()]
    phi = <i64 *> malloc(p * sizeof(i64))
    pos = <i64 *> malloc(p * sizeof(i64))
    end = <i64 *> malloc(p * sizeof(i64))
    nbk = <i64 *> malloc(p * sizeof(i64))
    bk = <i64 **> malloc(p * sizeof(i64 *))
    used = <char *> malloc(n if n > 0 else 1)
    try:
        for i in range(n):
            used[i] = 0
        for i in range(p):
            nbk[i] = len(back[i])
            bk[i] = <i64 *> malloc((nbk[i] if nbk[i] > 0 else 1) * sizeof(i64))
            for j in range(nbk[i]):
                bk[i][j] = back[i][j]
        depth = 0
        # pos/end iterate over candidate slots: neighbor list of the anchor or all vertices
        if nbk[0] == 0:
            pos[0] = 0
            end[0] = n
        while depth >= 0:
            if pos[depth] >= end[depth]:
                depth -= 1
                if depth >= 0:
                    used[phi[depth]] = 0
                continue
            if nbk[depth] == 0:
                v = pos[depth]
            else:
                v = indices[pos[depth]]
            pos[depth] += 1
            if used[v] or not cand[depth, v]:
                continue
            ok = True
            for j in range(1, nbk[depth]):
                if not adj[phi[bk[depth][j]], v]:
                    ok = False
                    break
            if not ok:
                continue
            phi[depth] = v
            if depth == p - 1:
                row = []
                for i in range(p):
                    row.append(int(phi[i]))
                out.append(tuple(row))
                if limit > 0 and len(out) >= limit:
                    return out
                continue
            used[v] = 1
            depth += 1
            if nbk[depth] == 0:
                pos[depth] = 0
                end[depth] = n
            else:
                w = phi[bk[depth][0]]
                pos[depth] = indptr[w]
                end[depth] = indptr[w + 1]
    finally:
        for i in range(p):
            free(bk[i])
        free(bk)
        free(nbk)
        free(phi)
        free(pos)
        free(end)
        free(used)
    return out
