"""Pure-Python max-flow and bipartite-matching kernels.

Reference implementation of the API in ``_ckernels.pyx``; both must return
identical results for identical inputs.
"""

from collections import deque


def max_flow(cap, s, t):
    """Edmonds-Karp on a dense integer capacity matrix.

    Returns ``(value, flow, source_side)`` where ``flow`` is the (antisymmetric)
    flow matrix and ``source_side[v]`` is True iff ``v`` is reachable from
    ``s`` in the final residual graph.
    """
    n = len(cap)
    flow = [[0] * n for _ in range(n)]
    nbrs = [[v for v in range(n) if cap[u][v] > 0 or cap[v][u] > 0] for u in range(n)]
    value = 0
    while True:
        parent = [-1] * n
        parent[s] = s
        q = deque([s])
        while q and parent[t] < 0:
            u = q.popleft()
            for v in nbrs[u]:
                if parent[v] < 0 and cap[u][v] - flow[u][v] > 0:
                    parent[v] = u
                    q.append(v)
        if parent[t] < 0:
            break
        push = None
        v = t
        while v != s:
            u = parent[v]
            r = cap[u][v] - flow[u][v]
            if push is None or r < push:
                push = r
            v = u
        v = t
        while v != s:
            u = parent[v]
            flow[u][v] += push
            flow[v][u] -= push
            v = u
        value += push
    source_side = [p >= 0 for p in parent]
    return value, flow, source_side


def bipartite_matching(adj, n_right):
    """Kuhn's augmenting-path matching, left vertices in index order.

    ``adj[u]`` lists right neighbours of left vertex ``u``. Returns
    ``match_left`` with ``-1`` for unmatched left vertices.
    """
    n_left = len(adj)
    match_right = [-1] * n_right
    match_left = [-1] * n_left
    for root in range(n_left):
        seen = [False] * n_right
        # explicit DFS stack: frames[k] is a left vertex, via[k] the right
        # vertex used to leave frames[k]
        frames = [root]
        pos = [0]
        via = []
        while frames:
            u = frames[-1]
            nb = adj[u]
            k = pos[-1]
            descended = False
            while k < len(nb):
                v = nb[k]
                k += 1
                if seen[v]:
                    continue
                seen[v] = True
                pos[-1] = k
                if match_right[v] < 0:
                    via.append(v)
                    for uu, vv in zip(frames, via):
                        match_right[vv] = uu
                        match_left[uu] = vv
                    frames = []
                    descended = True
                    break
                via.append(v)
                frames.append(match_right[v])
                pos.append(0)
                descended = True
                break
            if not descended:
                frames.pop()
                pos.pop()
                if via:
                    via.pop()
    return match_left
