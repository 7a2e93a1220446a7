"""Independent reference implementations used only by the tests.

Each oracle recomputes a quantity from first principles by exhaustive
enumeration, sharing no code with the package beyond the Election type.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


def hall_matchable(rankings, a, p, q):
    """Fractional perfect matching exists iff every voter subset passes Hall."""
    n = len(rankings)
    for size in range(1, n + 1):
        for subset in itertools.combinations(range(n), size):
            reach = set()
            for i in subset:
                r = rankings[i]
                reach.update(r[r.index(a):])
            if sum(q[c] for c in reach) < sum(p[i] for i in subset):
                return False
    return True


def has_perfect_matching(adj_sets, n):
    """Try every permutation; adj_sets[i] is the set of right vertices of i."""
    return any(all(perm[i] in adj_sets[i] for i in range(n)) for perm in itertools.permutations(range(n)))


def integral_adjacency(rankings, a):
    tops = [r[0] for r in rankings]
    out = []
    for r in rankings:
        beaten = set(r[r.index(a):])
        out.append({j for j, t in enumerate(tops) if t in beaten})
    return out


def separation_adjacency(rankings, a, b):
    out = []
    for r in rankings:
        below_a = set(r[r.index(a):])
        out.append({j for j, s in enumerate(rankings) if any(c in below_a for c in s[: s.index(b) + 1])})
    return out


def shortest_paths(points, edges):
    """Exact all-pairs shortest paths by repeated relaxation."""
    inf = None
    d = [[inf] * points for _ in range(points)]
    for x in range(points):
        d[x][x] = Fraction(0)
    for u, v, w in edges:
        w = Fraction(w)
        if d[u][v] is None or w < d[u][v]:
            d[u][v] = d[v][u] = w
    changed = True
    while changed:
        changed = False
        for x in range(points):
            for y in range(points):
                for z in range(points):
                    if d[x][y] is None or d[y][z] is None:
                        continue
                    via = d[x][y] + d[y][z]
                    if d[x][z] is None or via < d[x][z]:
                        d[x][z] = via
                        changed = True
    return d


def smart_dictatorship_weights(plu, n, alpha):
    """Unnormalized lottery weights plu/(n - 2 plu/(1+alpha)), or None at the threshold."""
    alpha = Fraction(alpha)
    for c, s in enumerate(plu):
        if 2 * s >= (1 + alpha) * n:
            return c
    return [Fraction(s) / (n - Fraction(2 * s) / (1 + alpha)) for s in plu]


def squares_rule(pa, pb, alpha):
    """Two-candidate proportional-to-squares probability of the first candidate."""
    alpha = Fraction(alpha)
    wa = (1 + alpha) * pa * pa - (1 - alpha) * pa * pb
    wb = (1 + alpha) * pb * pb - (1 - alpha) * pa * pb
    return wa / (wa + wb)


def pairwise_margin(rankings, x, y):
    return sum(1 for r in rankings if r.index(x) < r.index(y))


def all_profiles(n, m):
    """Every profile of n strict rankings over m candidates, up to voter order."""
    perms = list(itertools.permutations(range(m)))
    return itertools.combinations_with_replacement(perms, n)
