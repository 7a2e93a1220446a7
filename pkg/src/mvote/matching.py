"""Domination and separation graphs, and exact matchability checks.

A (p, q)-domination graph of candidate ``a`` joins voter ``i`` to every
candidate that ``a`` weakly defeats in ``i``'s vote. It admits a fractional
perfect matching iff the flow network

    source --p(i)--> voter i --inf--> candidate c --q(c)--> sink

saturates the source. Capacities are scaled to integers by the LCM of all
denominators, so the verdict is exact; a failing instance yields the voter
set on the source side of a minimum cut, which violates Hall's condition.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from . import _kernels
from .core import Election, defeated_set, plurality_weights, uniform_weights, weight_vector

__all__ = [
    "DominationGraph",
    "IntegralDominationGraph",
    "SeparationGraph",
    "MatchingCertificate",
    "build_domination_graph",
    "check_fractional_matching",
    "brute_force_hall",
    "build_integral_domination_graph",
    "build_separation_graph",
    "perfect_matching",
    "in_matching_uncovered_set",
    "graph_to_json",
    "BRUTE_FORCE_MAX_VOTERS",
]

BRUTE_FORCE_MAX_VOTERS = 20


@dataclass(frozen=True)
class DominationGraph:
    election: Election
    a: int
    p: tuple[Fraction, ...]
    q: tuple[Fraction, ...]
    adjacency: tuple[frozenset[int], ...]

    def neighbours(self, voters) -> frozenset[int]:
        out: set[int] = set()
        for i in voters:
            out |= self.adjacency[i]
        return frozenset(out)


@dataclass(frozen=True)
class IntegralDominationGraph:
    election: Election
    a: int
    adjacency: tuple[frozenset[int], ...]


@dataclass(frozen=True)
class SeparationGraph:
    election: Election
    a: int
    b: int
    adjacency: tuple[frozenset[int], ...]


@dataclass(frozen=True)
class MatchingCertificate:
    """Verdict plus witness.

    Exactly one of ``matching`` (edge weights of a fractional perfect
    matching) and ``violating_set`` (a Hall-violating voter set) is set,
    except that the brute-force oracle never produces a matching.
    """

    matchable: bool
    matching: dict[tuple[int, int], Fraction] | None = None
    violating_set: frozenset[int] | None = None

    def validate(self, g: DominationGraph) -> bool:
        if self.matchable:
            if self.matching is None:
                return True
            for (i, c), w in self.matching.items():
                if w < 0 or c not in g.adjacency[i]:
                    return False
            n, m = g.election.n, g.election.m
            row = [Fraction(0)] * n
            col = [Fraction(0)] * m
            for (i, c), w in self.matching.items():
                row[i] += w
                col[c] += w
            return tuple(row) == g.p and tuple(col) == g.q
        S = self.violating_set
        if S is None:
            return False
        p_s = sum((g.p[i] for i in S), Fraction(0))
        q_a = sum((g.q[c] for c in g.neighbours(S)), Fraction(0))
        return q_a < p_s


def build_domination_graph(e: Election, a: int, p=None, q=None) -> DominationGraph:
    """(p, q)-domination graph of ``a``; ``p``/``q`` default to uniform/plurality."""
    if not 0 <= a < e.m:
        raise IndexError(f"candidate {a} out of range")
    p = uniform_weights(e.n) if p is None else weight_vector(p, e.n)
    q = plurality_weights(e) if q is None else weight_vector(q, e.m)
    adjacency = tuple(defeated_set(e, a, (i,)) for i in e.voters)
    return DominationGraph(e, a, p, q, adjacency)


def check_fractional_matching(g: DominationGraph, backend: str | None = None) -> MatchingCertificate:
    """Decide fractional perfect matchability with an exact integer max-flow."""
    n, m = g.election.n, g.election.m
    scale = lcm(*(w.denominator for w in g.p + g.q))
    p_int = [int(w * scale) for w in g.p]
    q_int = [int(w * scale) for w in g.q]
    # scaled totals are both `scale`; anything above acts as infinity
    inf = scale + 1
    size = n + m + 2
    s, t = 0, size - 1
    cap = [[0] * size for _ in range(size)]
    for i in range(n):
        cap[s][1 + i] = p_int[i]
        for c in g.adjacency[i]:
            cap[1 + i][1 + n + c] = inf
    for c in range(m):
        cap[1 + n + c][t] = q_int[c]
    value, flow, source_side = _kernels.max_flow(cap, s, t, backend=backend)
    if value == scale:
        matching = {}
        for i in range(n):
            for c in sorted(g.adjacency[i]):
                f = flow[1 + i][1 + n + c]
                if f > 0:
                    matching[(i, c)] = Fraction(f, scale)
        return MatchingCertificate(True, matching=matching)
    violating = frozenset(i for i in range(n) if source_side[1 + i])
    cert = MatchingCertificate(False, violating_set=violating)
    if not cert.validate(g):
        raise AssertionError("min-cut witness does not violate Hall's condition")
    return cert


def brute_force_hall(g: DominationGraph) -> MatchingCertificate:
    """Check the weighted Hall condition over every voter subset.

    Exponential; intended as an independent test oracle. Returns the first
    violating subset in bitmask order.
    """
    n = g.election.n
    if n > BRUTE_FORCE_MAX_VOTERS:
        raise ValueError(f"brute force limited to n <= {BRUTE_FORCE_MAX_VOTERS}, got {n}")
    masks = [0] * n
    for i in range(n):
        for c in g.adjacency[i]:
            masks[i] |= 1 << c
    for S in range(1, 1 << n):
        p_s = Fraction(0)
        nb = 0
        for i in range(n):
            if S >> i & 1:
                p_s += g.p[i]
                nb |= masks[i]
        q_nb = sum((g.q[c] for c in range(g.election.m) if nb >> c & 1), Fraction(0))
        if q_nb < p_s:
            return MatchingCertificate(False, violating_set=frozenset(i for i in range(n) if S >> i & 1))
    return MatchingCertificate(True)


def build_integral_domination_graph(e: Election, a: int) -> IntegralDominationGraph:
    """Voter-voter graph with edge (i, j) iff ``a`` weakly defeats ``j``'s top in vote ``i``."""
    if not 0 <= a < e.m:
        raise IndexError(f"candidate {a} out of range")
    tops = e.tops()
    adjacency = []
    for i in e.voters:
        pa = e.position[i][a]
        adjacency.append(frozenset(j for j in e.voters if pa <= e.position[i][tops[j]]))
    return IntegralDominationGraph(e, a, tuple(adjacency))


def build_separation_graph(e: Election, a: int, b: int) -> SeparationGraph:
    """Edge (i, j) iff some c has a weakly above c for i and c weakly above b for j."""
    for x in (a, b):
        if not 0 <= x < e.m:
            raise IndexError(f"candidate {x} out of range")
    below_a = [frozenset(e.rankings[i][e.position[i][a]:]) for i in e.voters]
    above_b = [frozenset(e.rankings[j][: e.position[j][b] + 1]) for j in e.voters]
    adjacency = tuple(
        frozenset(j for j in e.voters if not below_a[i].isdisjoint(above_b[j])) for i in e.voters
    )
    return SeparationGraph(e, a, b, adjacency)


def perfect_matching(g, backend: str | None = None) -> tuple[int, ...] | None:
    """A perfect matching of a voter-voter graph as a bijection, or None.

    ``g`` is any object with an ``adjacency`` sequence, or the sequence
    itself. Left vertices are augmented in index order and neighbours are
    tried in increasing index, so the result is deterministic.
    """
    adjacency = getattr(g, "adjacency", g)
    adj = [sorted(nb) for nb in adjacency]
    match = _kernels.bipartite_matching(adj, len(adj), backend=backend)
    if any(v < 0 for v in match):
        return None
    return tuple(match)


def in_matching_uncovered_set(e: Election, a: int) -> bool:
    return all(perfect_matching(build_separation_graph(e, a, b)) is not None for b in e.candidates)


def graph_to_json(g) -> str:
    """Adjacency-list JSON for debugging; not a stable format."""
    doc: dict = {"kind": type(g).__name__, "n": g.election.n, "m": g.election.m, "a": g.a}
    if isinstance(g, SeparationGraph):
        doc["b"] = g.b
    if isinstance(g, DominationGraph):
        doc["p"] = [str(w) for w in g.p]
        doc["q"] = [str(w) for w in g.q]
    doc["adjacency"] = [sorted(nb) for nb in g.adjacency]
    return json.dumps(doc, sort_keys=True)

