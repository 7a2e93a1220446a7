"""Parameterised lower-bound and counterexample instances.

Every instance bundles an election, one or more witness metrics given as
weighted graphs, and facts (exact rationals) that can be recomputed from
the bundle. Surplus candidates are placed far away: each gets its own point
joined to an anchor point by an edge of ten times the diameter of the rest,
and is ranked last (by index) by every voter.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Callable

from .core import Election, parse_rational, serialize_election
from .metric import (
    MetricSpace,
    WeightedGraphSpec,
    from_weighted_graph,
    serialize_graph,
    social_cost,
)
from .rules import Lottery

__all__ = [
    "Fact",
    "NamedInstance",
    "ConstructionError",
    "construct",
    "list_constructions",
    "catalog_json",
    "write_instance",
    "load_schema",
    "thm2_mirror_graph",
    "CONSTRUCTION_NAMES",
]


class ConstructionError(ValueError):
    pass


@dataclass(frozen=True)
class Fact:
    """A quantity with its exact value.

    ``kind`` selects how the value is recomputed from the bundle:
    ``sc`` (args: candidate), ``ratio`` (numerator and denominator
    candidates), ``lottery_ratio`` (probabilities, reference candidate) or
    ``asymptotic`` (a limit, not recomputable on a finite instance).
    """

    name: str
    value: Fraction
    kind: str
    args: tuple = ()
    graph: str = "primary"

    def recompute(self, inst: "NamedInstance") -> Fraction | None:
        if self.kind == "asymptotic":
            return None
        d = inst.metric(self.graph)
        if self.kind == "sc":
            return social_cost(d, self.args[0])
        if self.kind == "ratio":
            return social_cost(d, self.args[0]) / social_cost(d, self.args[1])
        if self.kind == "lottery_ratio":
            probs, ref = self.args
            lot = Lottery(probs)
            num = sum((p * social_cost(d, c) for c, p in enumerate(lot.probs) if p), Fraction(0))
            return num / social_cost(d, ref)
        raise ConstructionError(f"unknown fact kind {self.kind!r}")

    def to_dict(self) -> dict:
        args = [[str(p) for p in a] if isinstance(a, tuple) else a for a in self.args]
        return {"name": self.name, "value": str(self.value), "kind": self.kind, "args": args, "graph": self.graph}


@dataclass(frozen=True)
class NamedInstance:
    name: str
    params: dict
    election: Election
    graphs: dict[str, WeightedGraphSpec]
    facts: tuple[Fact, ...]
    candidate_labels: tuple[str, ...] = ()
    _metrics: dict = field(default_factory=dict, compare=False, repr=False)

    def metric(self, graph: str = "primary") -> MetricSpace:
        if graph not in self._metrics:
            self._metrics[graph] = from_weighted_graph(self.graphs[graph])
        return self._metrics[graph]

    def fact(self, name: str) -> Fact:
        for f in self.facts:
            if f.name == name:
                return f
        raise KeyError(name)

    def facts_json(self) -> str:
        doc = {
            "name": self.name,
            "params": {k: str(v) for k, v in sorted(self.params.items())},
            "candidate_labels": list(self.candidate_labels),
            "facts": [f.to_dict() for f in self.facts],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


class _Builder:
    """Accumulates points and edges, then pads with far-away candidates."""

    def __init__(self):
        self.voters: list[list[int]] = []
        self.cands: list[list[int]] = []
        self.labels: list[str] = []
        self.edges: list[tuple[int, int, Fraction]] = []

    def point(self, label: str, voters=(), cands=()) -> int:
        self.voters.append(list(voters))
        self.cands.append(list(cands))
        self.labels.append(label)
        return len(self.labels) - 1

    def edge(self, u: int, v: int, w) -> None:
        self.edges.append((u, v, Fraction(w)))

    def build(self, n: int, m: int, anchor: int, extra: int = 0) -> WeightedGraphSpec:
        """Finish the graph, adding ``extra`` far candidates numbered from ``m``."""
        if extra:
            core = WeightedGraphSpec(n, m, self._t(self.voters), self._t(self.cands), tuple(self.edges))
            diameter = max(max(row) for row in from_weighted_graph(core).d)
            if diameter <= 0:
                raise ConstructionError("cannot pad a construction with zero diameter")
            for k in range(extra):
                p = self.point(f"far{k}", cands=(m + k,))
                self.edge(anchor, p, 10 * diameter)
        return WeightedGraphSpec(
            n, m + extra, self._t(self.voters), self._t(self.cands), tuple(self.edges), tuple(self.labels)
        )

    @staticmethod
    def _t(lists):
        return tuple(tuple(x) for x in lists)


def _pad_rankings(rankings, m: int, extra: int):
    tail = tuple(range(m, m + extra))
    return tuple(tuple(r) + tail for r in rankings)


def _alpha(params) -> Fraction:
    alpha = parse_rational(params.get("alpha", 1))
    if not 0 <= alpha <= 1:
        raise ConstructionError(f"alpha must lie in [0, 1], got {alpha}")
    return alpha


def _int_param(params, key: str, default: int, minimum: int) -> int:
    raw = params.get(key, default)
    try:
        value = int(raw)
    except (TypeError, ValueError):
        raise ConstructionError(f"{key} must be an integer, got {raw!r}") from None
    if value != parse_rational(raw) or value < minimum:
        raise ConstructionError(f"{key} must be an integer >= {minimum}, got {raw!r}")
    return value


# -- individual constructions ------------------------------------------------


def _thm1(params) -> NamedInstance:
    alpha = _alpha(params)
    m = _int_param(params, "m", 3, 3)
    a, b, c = 0, 1, 2
    g = _Builder()
    pa = g.point("a", cands=(a,))
    p1 = g.point("v0", voters=(0,))
    p2c = g.point("v1+c", voters=(1,), cands=(c,))
    pb = g.point("b", cands=(b,))
    g.edge(pa, p1, alpha)
    g.edge(p1, p2c, 1)
    g.edge(p1, pb, 1)
    g.edge(pb, p2c, 1 + alpha)
    graph = g.build(2, 3, anchor=p1, extra=m - 3)
    e = Election(_pad_rankings(((a, b, c), (c, b, a)), 3, m - 3))
    facts = (
        Fact("SC(b)", 2 + alpha, "sc", (b,)),
        Fact("SC(c)", Fraction(1), "sc", (c,)),
        Fact("ratio SC(b)/SC(c)", 2 + alpha, "ratio", (b, c)),
    )
    labels = ("a", "b", "c") + tuple(f"far{k}" for k in range(m - 3))
    return NamedInstance("thm1-tight", {"alpha": alpha, "m": m}, e, {"primary": graph}, facts, labels)


def _thm2_parts(params):
    alpha = _alpha(params)
    m = _int_param(params, "m", 4, 2)
    half = m // 2
    A = list(range(half))
    B = list(range(half, 2 * half))
    rankings = []
    for i in A:
        rankings.append([i] + [x for x in A if x != i] + B)
    for j in B:
        rankings.append([j] + [x for x in B if x != j] + A)
    extra = m - 2 * half
    e = Election(_pad_rankings(rankings, 2 * half, extra))
    return alpha, m, half, A, B, extra, e


def _thm2_graph(alpha, half, near, far, extra) -> WeightedGraphSpec:
    # voters in ``near`` sit next to their own candidate; everything in
    # ``far`` (its voters and candidates) shares one point
    g = _Builder()
    cand_pts = [g.point(f"cand{x}", cands=(x,)) for x in near]
    voter_pts = [g.point(f"v{i}", voters=(i,)) for i in near]
    pool = g.point("pool", voters=tuple(far), cands=tuple(far))
    for vp, i in zip(voter_pts, near):
        for cp, x in zip(cand_pts, near):
            g.edge(vp, cp, alpha if x == i else 1)
        g.edge(vp, pool, 1)
    return g.build(2 * half, 2 * half, anchor=pool, extra=extra)


def thm2_mirror_graph(params) -> WeightedGraphSpec:
    """Theorem-2 style metric with the roles of the two halves swapped."""
    alpha, m, half, A, B, extra, _ = _thm2_parts(params)
    return _thm2_graph(alpha, half, B, A, extra)


def _thm2_facts(alpha, m, half, A, B):
    even = 2 * half
    cost_near = alpha + (half - 1) + half * (1 + alpha)
    target = 2 + alpha - 2 * (1 - alpha) / Fraction(even)
    facts = [
        Fact("SC(a_1)", cost_near, "sc", (A[0],)),
        Fact("SC(b_1)", Fraction(half), "sc", (B[0],)),
        Fact("ratio SC(a_1)/SC(b_1)", target, "ratio", (A[0], B[0])),
    ]
    return facts, target


def _thm2(params) -> NamedInstance:
    alpha, m, half, A, B, extra, e = _thm2_parts(params)
    graph = _thm2_graph(alpha, half, A, B, extra)
    facts, _ = _thm2_facts(alpha, m, half, A, B)
    return NamedInstance("thm2-lower", {"alpha": alpha, "m": m}, e, {"primary": graph}, tuple(facts), _ab_labels(half, extra))


def _thm6(params) -> NamedInstance:
    alpha, m, half, A, B, extra, e = _thm2_parts(params)
    graphs = {
        "primary": _thm2_graph(alpha, half, A, B, extra),
        "mirror": _thm2_graph(alpha, half, B, A, extra),
    }
    facts, target = _thm2_facts(alpha, m, half, A, B)
    facts += [
        Fact("mirror SC(b_1)", facts[0].value, "sc", (B[0],), "mirror"),
        Fact("mirror ratio SC(b_1)/SC(a_1)", target, "ratio", (B[0], A[0]), "mirror"),
        # half the mass on each side: one of the two metrics costs this much
        Fact(
            "even split ratio under mirror",
            (3 + alpha) / 2 - (1 - alpha) / Fraction(2 * half),
            "lottery_ratio",
            (tuple(Fraction(1, 2) if x in (A[0], B[0]) else Fraction(0) for x in range(m)), A[0]),
            "mirror",
        ),
    ]
    return NamedInstance("thm6-rand", {"alpha": alpha, "m": m}, e, graphs, tuple(facts), _ab_labels(half, extra))


def _ab_labels(half, extra):
    return (
        tuple(f"a{k + 1}" for k in range(2 * half)) + tuple(f"far{k}" for k in range(extra))
    )


def _prop2(params) -> NamedInstance:
    alpha = _alpha(params)
    m = _int_param(params, "m", 5, 5)
    a, b, c, d, e_ = range(5)
    rankings = ((b, e_, c, a, d), (c, d, b, a, e_), (d, a, c, b, e_))
    g = _Builder()
    hub = g.point("v1+c", voters=(1,), cands=(c,))
    v0 = g.point("v0", voters=(0,))
    v2 = g.point("v2", voters=(2,))
    pb = g.point("b", cands=(b,))
    pd = g.point("d", cands=(d,))
    pe = g.point("e", cands=(e_,))
    pa = g.point("a", cands=(a,))
    g.edge(hub, v2, 1)
    g.edge(v2, pd, alpha)
    g.edge(pd, pa, 1 - alpha)
    g.edge(pa, pe, 1 + alpha)
    g.edge(pe, pb, 1 - alpha)
    g.edge(pb, v0, alpha)
    g.edge(v0, hub, 1)
    graph = g.build(3, 5, anchor=hub, extra=m - 5)
    e = Election(_pad_rankings(rankings, 5, m - 5))
    facts = (
        Fact("SC(a)", 5 + alpha, "sc", (a,)),
        Fact("SC(c)", Fraction(2), "sc", (c,)),
        Fact("ratio SC(a)/SC(c)", (5 + alpha) / 2, "ratio", (a, c)),
    )
    labels = ("a", "b", "c", "d", "e") + tuple(f"far{k}" for k in range(m - 5))
    return NamedInstance("prop2-muc", {"alpha": alpha, "m": m}, e, {"primary": graph}, facts, labels)


def _prop3(params) -> NamedInstance:
    alpha = _alpha(params)
    k = _int_param(params, "k", 2, 1)
    a, b = 0, 1
    cs = [2 + r for r in range(k)]
    rankings = [(a, *cs, b)] * 2 + [(b, *cs, a)] * k
    for r, cr in enumerate(cs):
        rankings.append((cr, a, b, *[x for x in cs if x != cr]))
    n = 2 + k + k
    g = _Builder()
    pa = g.point("a", cands=(a,))
    pva = g.point("Va", voters=(0, 1))
    pb = g.point("b+Vb", voters=tuple(range(2, 2 + k)), cands=(b,))
    for r, cr in enumerate(cs):
        p = g.point(f"c{r + 1}+V{r + 1}", voters=(2 + k + r,), cands=(cr,))
        g.edge(pva, p, 1)
        g.edge(p, pb, 1 + alpha)
    g.edge(pa, pva, alpha)
    graph = g.build(n, 2 + k, anchor=pva)
    e = Election(tuple(rankings))
    sc_a = 3 * k + (3 * k + 2) * alpha
    sc_b = k + 4 + (k + 2) * alpha
    facts = (
        Fact("SC(a)", sc_a, "sc", (a,)),
        Fact("SC(b)", sc_b, "sc", (b,)),
        Fact("ratio SC(a)/SC(b)", sc_a / sc_b, "ratio", (a, b)),
    )
    labels = ("a", "b") + tuple(f"c{r + 1}" for r in range(k))
    return NamedInstance("prop3-condorcet", {"alpha": alpha, "k": k}, e, {"primary": graph}, facts, labels)


def _thm5(params) -> NamedInstance:
    alpha = _alpha(params)
    m = _int_param(params, "m", 3, 2)
    star = 0  # the candidate the adversary makes optimal
    rankings = [tuple(range(m))]
    for i in range(1, m):
        rankings.append((i, star) + tuple(x for x in range(1, m) if x != i))
    g = _Builder()
    hub = g.point("v0+c0", voters=(0,), cands=(star,))
    for i in range(1, m):
        pv = g.point(f"v{i}", voters=(i,))
        pc = g.point(f"c{i}", cands=(i,))
        g.edge(pv, hub, 1)
        g.edge(pv, pc, alpha)
    graph = g.build(m, m, anchor=hub)
    e = Election(tuple(rankings))
    sc_star = Fraction(m - 1)
    sc_other = alpha + (1 + alpha) + (m - 2) * (2 + alpha)
    # Pr[c*] = 1/m with the rest spread evenly, i.e. the uniform lottery
    lottery = (Fraction(1, m),) * m
    facts = (
        Fact("SC(c*)", sc_star, "sc", (star,)),
        Fact("SC(b)", sc_other, "sc", (1,)),
        Fact("lottery ratio with Pr[c*]=1/m", 2 + alpha - Fraction(2, m), "lottery_ratio", (lottery, star)),
    )
    labels = ("c*",) + tuple(f"c{i}" for i in range(1, m))
    return NamedInstance("thm5-plurality", {"alpha": alpha, "m": m}, e, {"primary": graph}, facts, labels)


def _thm7(params) -> NamedInstance:
    alpha = _alpha(params)
    m = _int_param(params, "m", 4, 3)
    k = _int_param(params, "k", 3, 1)
    ell = m - 2
    groups = list(range(ell))  # candidates a_1..a_ell
    last = ell  # a_{ell+1}
    star = ell + 1  # a*
    rankings = []
    for j in groups:
        middle = tuple(x for x in groups if x != j)
        rankings += [(j, star) + middle + (last,)] * k
    rankings.append((last,) + tuple(groups) + (star,))
    n = k * ell + 1
    g = _Builder()
    pstar = g.point("a*", cands=(star,))
    plast_v = g.point(f"V{ell + 1}", voters=(n - 1,))
    plast_c = g.point(f"a{ell + 1}", cands=(last,))
    g.edge(plast_v, plast_c, alpha)
    for j in groups:
        pv = g.point(f"V{j + 1}", voters=tuple(range(j * k, (j + 1) * k)))
        pc = g.point(f"a{j + 1}", cands=(j,))
        g.edge(pstar, pv, 1)
        g.edge(pv, pc, alpha)
        g.edge(plast_v, pc, 2)
    graph = g.build(n, m, anchor=pstar)
    e = Election(tuple(rankings))
    sc_star = k * ell + 3 + alpha
    sc_a1 = ell * k * alpha + 2 * (ell - 1) * k + 2
    facts = (
        Fact("SC(a*)", sc_star, "sc", (star,)),
        Fact("SC(a_1)", sc_a1, "sc", (0,)),
        Fact("ratio SC(a_1)/SC(a*)", sc_a1 / sc_star, "ratio", (0, star)),
        Fact("limit ratio as k grows", 2 + alpha - Fraction(2, m - 2), "asymptotic"),
    )
    labels = tuple(f"a{j + 1}" for j in range(ell + 1)) + ("a*",)
    return NamedInstance("thm7-mix", {"alpha": alpha, "m": m, "k": k}, e, {"primary": graph}, facts, labels)


def _appB(params) -> NamedInstance:
    a, b, c, d = range(4)
    rankings = (
        (b, a, c, d),
        (b, a, c, d),
        (c, a, b, d),
        (c, a, b, d),
        (d, a, b, c),
        (d, a, b, c),
        (b, c, d, a),
    )
    return NamedInstance("appB-condorcet", {}, Election(rankings), {}, (), ("a", "b", "c", "d"))


def _appC(params) -> NamedInstance:
    alpha = _alpha(params)
    k = _int_param(params, "k", 1, 1)
    m = _int_param(params, "m", 3, 3)
    a, b, c = 0, 1, 2
    rankings = [(a, b, c)] * k + [(c, b, a)] * k + [(b, a, c), (b, c, a)]
    n = 2 * k + 2
    g = _Builder()
    pa = g.point("a", cands=(a,))
    pv = g.point("Va", voters=tuple(range(k)))
    pb = g.point("b+Vb", voters=(2 * k, 2 * k + 1), cands=(b,))
    pc = g.point("c+Vc", voters=tuple(range(k, 2 * k)), cands=(c,))
    g.edge(pa, pv, alpha)
    g.edge(pv, pb, 1)
    g.edge(pv, pc, 1)
    g.edge(pb, pc, 1 + alpha)
    graph = g.build(n, 3, anchor=pv, extra=m - 3)
    e = Election(_pad_rankings(rankings, 3, m - 3))
    sc_b = k * (2 + alpha)
    # shortest paths put voters 2k+1, 2k+2 at distance 1+alpha from c
    sc_c = k + 2 * (1 + alpha)
    facts = (
        Fact("SC(b)", sc_b, "sc", (b,)),
        Fact("SC(c)", sc_c, "sc", (c,)),
        Fact("ratio SC(b)/SC(c)", sc_b / sc_c, "ratio", (b, c)),
        Fact("limit ratio as k grows", 2 + alpha, "asymptotic"),
    )
    labels = ("a", "b", "c") + tuple(f"far{k_}" for k_ in range(m - 3))
    return NamedInstance("appC-ties", {"alpha": alpha, "k": k, "m": m}, e, {"primary": graph}, facts, labels)


# -- catalog -------------------------------------------------------------------

_ALPHA = {"type": "rational", "min": "0", "max": "1", "default": "1"}


def _int(default, minimum):
    return {"type": "integer", "min": minimum, "default": default}


_CATALOG: dict[str, tuple[Callable, dict, list[str]]] = {
    "thm1-tight": (_thm1, {"alpha": _ALPHA, "m": _int(3, 3)}, ["SC(b)", "SC(c)", "ratio SC(b)/SC(c)"]),
    "thm2-lower": (_thm2, {"alpha": _ALPHA, "m": _int(4, 2)}, ["SC(a_1)", "SC(b_1)", "ratio SC(a_1)/SC(b_1)"]),
    "prop2-muc": (_prop2, {"alpha": _ALPHA, "m": _int(5, 5)}, ["SC(a)", "SC(c)", "ratio SC(a)/SC(c)"]),
    "prop3-condorcet": (_prop3, {"alpha": _ALPHA, "k": _int(2, 1)}, ["SC(a)", "SC(b)", "ratio SC(a)/SC(b)"]),
    "thm5-plurality": (
        _thm5,
        {"alpha": _ALPHA, "m": _int(3, 2)},
        ["SC(c*)", "SC(b)", "lottery ratio with Pr[c*]=1/m"],
    ),
    "thm6-rand": (
        _thm6,
        {"alpha": _ALPHA, "m": _int(4, 2)},
        [
            "SC(a_1)",
            "SC(b_1)",
            "ratio SC(a_1)/SC(b_1)",
            "mirror SC(b_1)",
            "mirror ratio SC(b_1)/SC(a_1)",
            "even split ratio under mirror",
        ],
    ),
    "thm7-mix": (
        _thm7,
        {"alpha": _ALPHA, "m": _int(4, 3), "k": _int(3, 1)},
        ["SC(a*)", "SC(a_1)", "ratio SC(a_1)/SC(a*)", "limit ratio as k grows"],
    ),
    "appB-condorcet": (_appB, {}, []),
    "appC-ties": (
        _appC,
        {"alpha": _ALPHA, "k": _int(1, 1), "m": _int(3, 3)},
        ["SC(b)", "SC(c)", "ratio SC(b)/SC(c)", "limit ratio as k grows"],
    ),
}

CONSTRUCTION_NAMES = tuple(_CATALOG)


def construct(name: str, **params) -> NamedInstance:
    """Build a named instance; unknown parameters are rejected."""
    try:
        fn, domain, _ = _CATALOG[name]
    except KeyError:
        raise ConstructionError(
            f"unknown construction {name!r}; known: {', '.join(CONSTRUCTION_NAMES)}"
        ) from None
    params = {k: v for k, v in params.items() if v is not None}
    unknown = sorted(set(params) - set(domain))
    if unknown:
        raise ConstructionError(f"{name} does not take parameter(s) {', '.join(unknown)}")
    return fn(params)


def list_constructions() -> list[dict]:
    return [
        {"name": name, "params": domain, "facts": facts}
        for name, (_, domain, facts) in _CATALOG.items()
    ]


def catalog_json() -> str:
    return json.dumps(list_constructions(), indent=2, sort_keys=True) + "\n"


def load_schema(name: str) -> dict:
    return json.loads(resources.files("mvote").joinpath("schemas", name).read_text())


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_instance(inst: NamedInstance, out_dir: str) -> list[str]:
    """Write election, graph(s) and facts into ``out_dir``; returns the paths."""
    os.makedirs(out_dir, exist_ok=True)
    files = {"election.elec": serialize_election(inst.election), "facts.json": inst.facts_json()}
    for gname, g in inst.graphs.items():
        files[f"{gname}.graph"] = serialize_graph(g)
    paths = []
    for fname in sorted(files):
        path = os.path.join(out_dir, fname)
        _atomic_write(path, files[fname])
        paths.append(path)
    return paths
