"""Pseudometrics over voters and candidates.

Points are indexed voters ``0..n-1`` then candidates ``n..n+m-1``. All
distances are exact rationals; distinct entities may sit at distance 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import Election, parse_rational
from .rules import Lottery

__all__ = [
    "MetricError",
    "AsymmetryError",
    "NegativeDistanceError",
    "DiagonalError",
    "TriangleViolationError",
    "DisconnectedGraphError",
    "InconsistentMetricError",
    "MetricSpace",
    "WeightedGraphSpec",
    "validate_metric",
    "from_weighted_graph",
    "consistent_with",
    "induced_profile",
    "is_alpha_decisive",
    "minimal_alpha",
    "social_cost",
    "expected_social_cost",
    "phi_k",
    "parse_metric",
    "serialize_metric",
    "parse_graph",
    "serialize_graph",
    "random_l1_instance",
]


class MetricError(ValueError):
    pass


class AsymmetryError(MetricError):
    def __init__(self, x: int, y: int):
        super().__init__(f"d({x},{y}) != d({y},{x})")
        self.pair = (x, y)


class NegativeDistanceError(MetricError):
    def __init__(self, x: int, y: int):
        super().__init__(f"d({x},{y}) is negative")
        self.pair = (x, y)


class DiagonalError(MetricError):
    def __init__(self, x: int):
        super().__init__(f"d({x},{x}) is not zero")
        self.point = x


class TriangleViolationError(MetricError):
    def __init__(self, x: int, y: int, z: int):
        super().__init__(f"d({x},{y}) + d({y},{z}) < d({x},{z})")
        self.witness = (x, y, z)


class DisconnectedGraphError(MetricError):
    pass


class InconsistentMetricError(MetricError):
    pass


@dataclass(frozen=True)
class MetricSpace:
    n: int
    m: int
    d: tuple[tuple[Fraction, ...], ...]

    @property
    def size(self) -> int:
        return self.n + self.m

    def cand(self, c: int) -> int:
        """Point index of candidate ``c``."""
        return self.n + c

    def vc(self, i: int, c: int) -> Fraction:
        """Distance from voter ``i`` to candidate ``c``."""
        return self.d[i][self.n + c]

    def cc(self, a: int, b: int) -> Fraction:
        return self.d[self.n + a][self.n + b]

    def scaled(self, factor) -> "MetricSpace":
        f = parse_rational(factor)
        return MetricSpace(self.n, self.m, tuple(tuple(x * f for x in row) for row in self.d))

    def to_json(self) -> list[list[str]]:
        return [[str(x) for x in row] for row in self.d]


def validate_metric(d: Sequence[Sequence], n: int, m: int) -> MetricSpace:
    """Check a distance matrix and wrap it; raise the specific violation found first."""
    size = n + m
    if n < 1 or m < 1:
        raise MetricError("need at least one voter and one candidate")
    if len(d) != size or any(len(row) != size for row in d):
        raise MetricError(f"expected a {size}x{size} matrix")
    mat = tuple(tuple(parse_rational(x) for x in row) for row in d)
    for x in range(size):
        if mat[x][x] != 0:
            raise DiagonalError(x)
        for y in range(size):
            if mat[x][y] < 0:
                raise NegativeDistanceError(x, y)
            if mat[x][y] != mat[y][x]:
                raise AsymmetryError(x, y)
    for y in range(size):
        row_y = mat[y]
        for x in range(size):
            dxy = mat[x][y]
            row_x = mat[x]
            for z in range(size):
                if dxy + row_y[z] < row_x[z]:
                    raise TriangleViolationError(x, y, z)
    return MetricSpace(n, m, mat)


@dataclass(frozen=True)
class WeightedGraphSpec:
    """Undirected weighted graph whose points carry voters and/or candidates.

    ``voters[p]`` and ``candidates[p]`` list the entities placed at point
    ``p``; colocated entities share a point. Edge weights may be zero.
    """

    n: int
    m: int
    voters: tuple[tuple[int, ...], ...]
    candidates: tuple[tuple[int, ...], ...]
    edges: tuple[tuple[int, int, Fraction], ...]
    labels: tuple[str, ...] = ()

    @property
    def points(self) -> int:
        return len(self.voters)

    def __post_init__(self):
        if len(self.candidates) != len(self.voters):
            raise MetricError("voter and candidate placements must cover the same points")
        placed_v = sorted(i for pt in self.voters for i in pt)
        placed_c = sorted(c for pt in self.candidates for c in pt)
        if placed_v != list(range(self.n)):
            raise MetricError("every voter must be placed at exactly one point")
        if placed_c != list(range(self.m)):
            raise MetricError("every candidate must be placed at exactly one point")
        edges = []
        for u, v, w in self.edges:
            w = parse_rational(w)
            if not (0 <= u < self.points and 0 <= v < self.points):
                raise MetricError(f"edge ({u},{v}) references an unknown point")
            if w < 0:
                raise MetricError(f"edge ({u},{v}) has negative weight")
            edges.append((u, v, w))
        object.__setattr__(self, "edges", tuple(edges))
        if self.labels and len(self.labels) != self.points:
            raise MetricError("one label per point")

    def point_of_voter(self, i: int) -> int:
        return next(p for p, vs in enumerate(self.voters) if i in vs)

    def point_of_candidate(self, c: int) -> int:
        return next(p for p, cs in enumerate(self.candidates) if c in cs)


def from_weighted_graph(g: WeightedGraphSpec) -> MetricSpace:
    """All-pairs shortest paths (Floyd-Warshall), expanded to entities."""
    P = g.points
    inf = None
    dist: list[list[Fraction | None]] = [[inf] * P for _ in range(P)]
    for p in range(P):
        dist[p][p] = Fraction(0)
    for u, v, w in g.edges:
        if dist[u][v] is None or w < dist[u][v]:
            dist[u][v] = dist[v][u] = w
    for k in range(P):
        dk = dist[k]
        for i in range(P):
            dik = dist[i][k]
            if dik is None:
                continue
            di = dist[i]
            for j in range(P):
                dkj = dk[j]
                if dkj is None:
                    continue
                alt = dik + dkj
                if di[j] is None or alt < di[j]:
                    di[j] = alt
    if any(x is None for row in dist for x in row):
        raise DisconnectedGraphError("graph is not connected")
    where = [g.point_of_voter(i) for i in range(g.n)] + [g.point_of_candidate(c) for c in range(g.m)]
    mat = tuple(tuple(dist[where[x]][where[y]] for y in range(len(where))) for x in range(len(where)))
    return MetricSpace(g.n, g.m, mat)


def _check_dims(d: MetricSpace, e: Election) -> None:
    if (d.n, d.m) != (e.n, e.m):
        raise MetricError(f"metric is {d.n}x{d.m} but election is {e.n}x{e.m}")


def consistent_with(d: MetricSpace, e: Election) -> bool:
    """Every voter's ranking is non-decreasing in distance."""
    _check_dims(d, e)
    for i, ranking in enumerate(e.rankings):
        for a, b in zip(ranking, ranking[1:]):
            if d.vc(i, a) > d.vc(i, b):
                return False
    return True


def induced_profile(d: MetricSpace) -> Election:
    """Rank candidates by distance, equidistant ones by index."""
    return Election(tuple(tuple(sorted(range(d.m), key=lambda c: (d.vc(i, c), c))) for i in range(d.n)))


def is_alpha_decisive(d: MetricSpace, e: Election, alpha) -> bool:
    alpha = parse_rational(alpha)
    if not consistent_with(d, e):
        raise InconsistentMetricError("metric is not consistent with the election")
    for i, ranking in enumerate(e.rankings):
        top = d.vc(i, ranking[0])
        for c in ranking[1:]:
            if top > alpha * d.vc(i, c):
                return False
    return True


def minimal_alpha(d: MetricSpace, e: Election) -> Fraction:
    """Smallest alpha for which (d, e) is alpha-decisive (0 when m = 1)."""
    if not consistent_with(d, e):
        raise InconsistentMetricError("metric is not consistent with the election")
    best = Fraction(0)
    for i, ranking in enumerate(e.rankings):
        top = d.vc(i, ranking[0])
        for c in ranking[1:]:
            # d(i,c) = 0 forces top = 0, which any alpha accepts
            dc = d.vc(i, c)
            if dc > 0 and top / dc > best:
                best = top / dc
    return best


def social_cost(d: MetricSpace, c: int) -> Fraction:
    if not 0 <= c < d.m:
        raise IndexError(f"candidate {c} out of range")
    return sum((d.vc(i, c) for i in range(d.n)), Fraction(0))


def expected_social_cost(d: MetricSpace, lottery: Lottery) -> Fraction:
    if lottery.m != d.m:
        raise MetricError("lottery and metric disagree on the number of candidates")
    return sum((pr * social_cost(d, c) for c, pr in enumerate(lottery.probs) if pr), Fraction(0))


def phi_k(d: MetricSpace, c: int, k: int) -> Fraction:
    """Sum of the ``k`` largest voter distances to candidate ``c``."""
    if not 1 <= k <= d.n:
        raise ValueError(f"k must lie in [1, {d.n}], got {k}")
    if not 0 <= c < d.m:
        raise IndexError(f"candidate {c} out of range")
    costs = sorted((d.vc(i, c) for i in range(d.n)), reverse=True)
    return sum(costs[:k], Fraction(0))


def _content_lines(text: str) -> list[list[str]]:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(line.split())
    return out


def parse_metric(text: str) -> MetricSpace:
    lines = _content_lines(text)
    if not lines or lines[0][0] != "metric" or len(lines[0]) != 3:
        raise MetricError("expected header 'metric <n> <m>'")
    try:
        n, m = int(lines[0][1]), int(lines[0][2])
    except ValueError as exc:
        raise MetricError("bad metric header") from exc
    rows = lines[1:]
    if len(rows) != n + m:
        raise MetricError(f"expected {n + m} rows, got {len(rows)}")
    try:
        mat = [[parse_rational(tok) for tok in row] for row in rows]
    except (ValueError, ZeroDivisionError) as exc:
        raise MetricError(str(exc)) from exc
    return validate_metric(mat, n, m)


def serialize_metric(d: MetricSpace) -> str:
    lines = [f"metric {d.n} {d.m}"]
    lines += [" ".join(str(x) for x in row) for row in d.d]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> WeightedGraphSpec:
    """Parse ``graph <P> <E>`` / ``point`` / ``edge`` lines.

    Point ids are arbitrary tokens; voter and candidate counts are inferred
    from the largest index placed.
    """
    lines = _content_lines(text)
    if not lines or lines[0][0] != "graph" or len(lines[0]) != 3:
        raise MetricError("expected header 'graph <P> <E>'")
    try:
        P, E = int(lines[0][1]), int(lines[0][2])
    except ValueError as exc:
        raise MetricError("bad graph header") from exc
    body = lines[1:]
    if len(body) != P + E:
        raise MetricError(f"expected {P} point lines and {E} edge lines")
    ids: dict[str, int] = {}
    voters, cands = [], []
    for toks in body[:P]:
        if toks[0] != "point" or len(toks) < 2 or len(toks) % 2 != 0:
            raise MetricError(f"bad point line: {' '.join(toks)}")
        if toks[1] in ids:
            raise MetricError(f"duplicate point id {toks[1]}")
        ids[toks[1]] = len(ids)
        vs, cs = [], []
        for kind, idx in zip(toks[2::2], toks[3::2]):
            if not idx.isdigit():
                raise MetricError(f"bad entity index {idx!r}")
            if kind == "voter":
                vs.append(int(idx))
            elif kind == "cand":
                cs.append(int(idx))
            else:
                raise MetricError(f"unknown entity kind {kind!r}")
        voters.append(tuple(vs))
        cands.append(tuple(cs))
    edges = []
    for toks in body[P:]:
        if toks[0] != "edge" or len(toks) != 4:
            raise MetricError(f"bad edge line: {' '.join(toks)}")
        if toks[1] not in ids or toks[2] not in ids:
            raise MetricError(f"edge references unknown point: {' '.join(toks)}")
        try:
            w = parse_rational(toks[3])
        except (ValueError, ZeroDivisionError) as exc:
            raise MetricError(f"bad edge weight {toks[3]!r}") from exc
        edges.append((ids[toks[1]], ids[toks[2]], w))
    n = 1 + max((i for vs in voters for i in vs), default=-1)
    m = 1 + max((c for cs in cands for c in cs), default=-1)
    return WeightedGraphSpec(n, m, tuple(voters), tuple(cands), tuple(edges), tuple(ids))


def serialize_graph(g: WeightedGraphSpec) -> str:
    names = list(g.labels) if g.labels else [f"p{k}" for k in range(g.points)]
    lines = [f"graph {g.points} {len(g.edges)}"]
    for k in range(g.points):
        toks = ["point", names[k]]
        toks += [f"voter {i}" for i in g.voters[k]]
        toks += [f"cand {c}" for c in g.candidates[k]]
        lines.append(" ".join(toks))
    for u, v, w in g.edges:
        lines.append(f"edge {names[u]} {names[v]} {w}")
    return "\n".join(lines) + "\n"


def random_l1_instance(n: int, m: int, dim: int, seed: int, denominator: int = 10**6):
    """Sample points in [0,1]^dim, round to ``1/denominator``, use the L1 distance.

    L1 keeps every distance an exact rational. Returns ``(metric, election)``
    with the profile induced by index tie-break.
    """
    if n < 1 or m < 1 or dim < 1:
        raise ValueError("n, m and dim must be positive")
    rng = np.random.default_rng(seed)
    raw = np.rint(rng.random((n + m, dim)) * denominator).astype(np.int64)
    pts = [[Fraction(int(x), denominator) for x in row] for row in raw]
    size = n + m
    mat = [[Fraction(0)] * size for _ in range(size)]
    for x in range(size):
        for y in range(x + 1, size):
            dist = sum((abs(a - b) for a, b in zip(pts[x], pts[y])), Fraction(0))
            mat[x][y] = mat[y][x] = dist
    d = MetricSpace(n, m, tuple(tuple(row) for row in mat))
    return d, induced_profile(d)
