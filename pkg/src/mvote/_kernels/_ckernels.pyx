# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled max-flow and bipartite-matching kernels.

Same API and same traversal order as ``_pykernels``; capacities must fit in a
signed 64-bit integer (the dispatcher in ``__init__`` checks this).
"""

from libc.stdlib cimport malloc, free


def max_flow(cap, Py_ssize_t s, Py_ssize_t t):
    cdef Py_ssize_t n = len(cap)
    cdef Py_ssize_t u, v, head, tail, k
    cdef long long push, r, value = 0
    cdef long long *c = <long long *> malloc(n * n * sizeof(long long))
    cdef long long *f = <long long *> malloc(n * n * sizeof(long long))
    cdef Py_ssize_t *parent = <Py_ssize_t *> malloc(n * sizeof(Py_ssize_t))
    cdef Py_ssize_t *queue = <Py_ssize_t *> malloc(n * sizeof(Py_ssize_t))
    cdef Py_ssize_t *nbr = <Py_ssize_t *> malloc(n * n * sizeof(Py_ssize_t))
    cdef Py_ssize_t *deg = <Py_ssize_t *> malloc(n * sizeof(Py_ssize_t))
    if not (c and f and parent and queue and nbr and deg):
        free(c); free(f); free(parent); free(queue); free(nbr); free(deg)
        raise MemoryError()
    try:
        for u in range(n):
            row = cap[u]
            for v in range(n):
                c[u * n + v] = row[v]
                f[u * n + v] = 0
        for u in range(n):
            deg[u] = 0
            for v in range(n):
                if c[u * n + v] > 0 or c[v * n + u] > 0:
                    nbr[u * n + deg[u]] = v
                    deg[u] += 1
        while True:
            for u in range(n):
                parent[u] = -1
            parent[s] = s
            head = 0
            tail = 0
            queue[tail] = s
            tail += 1
            while head < tail and parent[t] < 0:
                u = queue[head]
                head += 1
                for k in range(deg[u]):
                    v = nbr[u * n + k]
                    if parent[v] < 0 and c[u * n + v] - f[u * n + v] > 0:
                        parent[v] = u
                        queue[tail] = v
                        tail += 1
            if parent[t] < 0:
                break
            push = -1
            v = t
            while v != s:
                u = parent[v]
                r = c[u * n + v] - f[u * n + v]
                if push < 0 or r < push:
                    push = r
                v = u
            v = t
            while v != s:
                u = parent[v]
                f[u * n + v] += push
                f[v * n + u] -= push
                v = u
            value += push
        flow = [[f[u * n + v] for v in range(n)] for u in range(n)]
        source_side = [parent[u] >= 0 for u in range(n)]
        return value, flow, source_side
    finally:
        free(c); free(f); free(parent); free(queue); free(nbr); free(deg)


def bipartite_matching(adj, Py_ssize_t n_right):
    cdef Py_ssize_t n_left = len(adj)
    cdef Py_ssize_t total = 0, u, v, k, root, depth, d, i
    cdef bint descended
    for u in range(n_left):
        total += len(adj[u])
    cdef Py_ssize_t *start = <Py_ssize_t *> malloc((n_left + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *edges = <Py_ssize_t *> malloc((total + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *mr = <Py_ssize_t *> malloc((n_right + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *ml = <Py_ssize_t *> malloc((n_left + 1) * sizeof(Py_ssize_t))
    cdef char *seen = <char *> malloc(n_right + 1)
    cdef Py_ssize_t *frames = <Py_ssize_t *> malloc((n_left + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *pos = <Py_ssize_t *> malloc((n_left + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *via = <Py_ssize_t *> malloc((n_left + 1) * sizeof(Py_ssize_t))
    if not (start and edges and mr and ml and seen and frames and pos and via):
        free(start); free(edges); free(mr); free(ml); free(seen)
        free(frames); free(pos); free(via)
        raise MemoryError()
    try:
        k = 0
        for u in range(n_left):
            start[u] = k
            for v in adj[u]:
                edges[k] = v
                k += 1
        start[n_left] = k
        for v in range(n_right):
            mr[v] = -1
        for u in range(n_left):
            ml[u] = -1
        for root in range(n_left):
            for v in range(n_right):
                seen[v] = 0
            depth = 1
            frames[0] = root
            pos[0] = 0
            while depth > 0:
                u = frames[depth - 1]
                k = pos[depth - 1]
                descended = False
                while start[u] + k < start[u + 1]:
                    v = edges[start[u] + k]
                    k += 1
                    if seen[v]:
                        continue
                    seen[v] = 1
                    pos[depth - 1] = k
                    if mr[v] < 0:
                        via[depth - 1] = v
                        for d in range(depth):
                            mr[via[d]] = frames[d]
                            ml[frames[d]] = via[d]
                        depth = 0
                        descended = True
                        break
                    via[depth - 1] = v
                    frames[depth] = mr[v]
                    pos[depth] = 0
                    depth += 1
                    descended = True
                    break
                if not descended:
                    depth -= 1
        return [ml[i] for i in range(n_left)]
    finally:
        free(start); free(edges); free(mr); free(ml); free(seen)
        free(frames); free(pos); free(via)
