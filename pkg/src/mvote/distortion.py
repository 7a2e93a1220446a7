"""Worst-case social-cost ratio of an outcome via an adversarial LP.

The adversary picks a pseudometric over voters and candidates, consistent
with the rankings and alpha-decisive, to maximise the outcome's expected
social cost relative to a reference candidate. With one variable per
unordered pair of points every constraint is linear:

* triangle: d(x,z) <= d(x,y) + d(y,z) for each pair {x,z} and each other y
* consistency: d(i, r_k) <= d(i, r_{k+1}) along voter i's ranking
* decisiveness: d(i, top) <= alpha * d(i, c) for each non-top c

The objective is homogeneous, so the reference cost is pinned to a constant.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import lp
from .core import Election, parse_rational, plurality_scores
from .metric import MetricSpace, consistent_with, is_alpha_decisive, social_cost, validate_metric
from .rules import Lottery

__all__ = [
    "LpModel",
    "DistortionResult",
    "build_model",
    "worst_case_ratio",
    "distortion_of_outcome",
    "lemma3_bound",
    "check_prop4",
    "check_summation_bound",
    "NotApplicable",
    "SOLVERS",
]


@dataclass(frozen=True)
class LpModel:
    """Constraint system over folded pair variables.

    ``pair_index[(x, y)]`` (x < y) is the column of d(x, y); rows are all of
    the form ``row . d <= 0``.
    """

    n: int
    m: int
    alpha: Fraction
    pairs: tuple[tuple[int, int], ...]
    pair_index: dict[tuple[int, int], int]
    rows: tuple[dict[int, Fraction], ...]
    row_kinds: tuple[str, ...]

    @property
    def num_vars(self) -> int:
        return len(self.pairs)

    def var(self, x: int, y: int) -> int:
        return self.pair_index[(x, y) if x < y else (y, x)]

    def cost_row(self, c: int) -> dict[int, Fraction]:
        """Coefficients of SC(c) = sum_i d(i, c)."""
        return {self.var(i, self.n + c): Fraction(1) for i in range(self.n)}

    def lottery_row(self, lottery: Lottery) -> dict[int, Fraction]:
        row: dict[int, Fraction] = {}
        for c, pr in enumerate(lottery.probs):
            if pr:
                for j, v in self.cost_row(c).items():
                    row[j] = row.get(j, Fraction(0)) + pr * v
        return row

    def metric_from(self, x: Sequence) -> list[list]:
        size = self.n + self.m
        mat = [[0] * size for _ in range(size)]
        for k, (a, b) in enumerate(self.pairs):
            mat[a][b] = mat[b][a] = x[k]
        return mat


def build_model(e: Election, alpha) -> LpModel:
    alpha = parse_rational(alpha)
    n, m = e.n, e.m
    size = n + m
    pairs = tuple((x, y) for x in range(size) for y in range(x + 1, size))
    index = {p: k for k, p in enumerate(pairs)}

    def var(x, y):
        return index[(x, y) if x < y else (y, x)]

    rows: list[dict[int, Fraction]] = []
    kinds: list[str] = []
    one = Fraction(1)
    for (x, z) in pairs:
        vxz = index[(x, z)]
        for y in range(size):
            if y == x or y == z:
                continue
            rows.append({vxz: one, var(x, y): -one, var(y, z): -one})
            kinds.append("triangle")
    for i, ranking in enumerate(e.rankings):
        for a, b in zip(ranking, ranking[1:]):
            rows.append({var(i, n + a): one, var(i, n + b): -one})
            kinds.append("consistency")
        top = ranking[0]
        for c in ranking[1:]:
            row = {var(i, n + top): one}
            if alpha:
                row[var(i, n + c)] = -alpha
            rows.append(row)
            kinds.append("decisiveness")
    return LpModel(n, m, alpha, pairs, index, tuple(rows), tuple(kinds))


@dataclass(frozen=True)
class DistortionResult:
    status: str  # "bounded", "unbounded" or "degenerate"
    value: Fraction | None
    reference: int
    witness: MetricSpace | None = None
    solver: str = "exact"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "value": None if self.value is None else str(self.value),
            "reference": self.reference,
            "witness_metric": None if self.witness is None else self.witness.to_json(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


SOLVERS = ("exact", "exact-primal", "float")


def _witness(model: LpModel, x, solver: str) -> MetricSpace:
    mat = model.metric_from(x)
    if solver != "float":
        return validate_metric(mat, model.n, model.m)
    # float solutions are snapped to nearby rationals for reporting only
    snapped = [[Fraction(v).limit_denominator(10**9) for v in row] for row in mat]
    return MetricSpace(model.n, model.m, tuple(tuple(row) for row in snapped))


def _dot(row, x) -> Fraction:
    return sum((v * x[j] for j, v in row.items()), Fraction(0))


def _certify(model: LpModel, x, ref, obj, ref_value, obj_value) -> None:
    # exact audit of a point claimed feasible for the pair-variable system
    if any(v < 0 for v in x) or any(_dot(row, x) > 0 for row in model.rows):
        raise AssertionError("LP point violates a metric constraint")
    if _dot(ref, x) != ref_value or _dot(obj, x) != obj_value:
        raise AssertionError("LP point misses its normalisation")


def _primal_route(model, ref, obj, scale, solver):
    solve = lp.simplex if solver == "exact-primal" else lp.highs
    nv = model.num_vars
    zeros = [0] * len(model.rows)
    feas = solve({}, nv, model.rows, zeros, [ref, obj], [0, 1])
    if feas.status == "optimal":
        return "unbounded", None, feas.x
    res = solve(obj, nv, model.rows, zeros, [ref], [scale])
    if res.status == "infeasible":
        return "degenerate", Fraction(1), None
    if res.status != "optimal":
        raise RuntimeError(f"LP unexpectedly {res.status} after feasibility check")
    if solver == "float":
        return "bounded", Fraction(res.value / float(scale)).limit_denominator(10**9), res.x
    return "bounded", res.value / scale, res.x


def _dual_route(model, ref, obj, scale):
    """Solve through the LP dual, which has one row per pair variable.

    Dual: minimise scale * t over y >= 0, t free with A^T y + t ref >= obj.
    Its feasibility region is shared by the unboundedness program, so
    Phase 1 infeasibility yields a Farkas vector x >= 0 with A x <= 0,
    ref.x = 0, obj.x > 0: exactly a point of {SC(b) = 0, E = 1} after
    scaling. Otherwise the optimal dual of the dual is the worst metric.
    """
    nv = model.num_vars
    R = len(model.rows)
    tp, tm = R, R + 1
    cols: list[dict[int, Fraction]] = [{} for _ in range(nv)]
    for r, row in enumerate(model.rows):
        for j, v in row.items():
            cols[j][r] = -v
    for j, v in ref.items():
        cols[j][tp] = -v
        cols[j][tm] = v
    rhs = [-obj.get(j, 0) for j in range(nv)]
    res = lp.simplex({tp: -scale, tm: scale}, R + 2, cols, rhs)
    if res.status == "infeasible":
        w = res.duals
        total = _dot(obj, w)
        x = tuple(v / total for v in w)
        _certify(model, x, ref, obj, 0, 1)
        return "unbounded", None, x
    if res.status == "unbounded":
        return "degenerate", Fraction(1), None
    value = -res.value / scale
    x = res.duals
    _certify(model, x, ref, obj, scale, value * scale)
    return "bounded", value, x


def worst_case_ratio(
    e: Election,
    outcome: Lottery,
    b: int,
    alpha,
    scale=1,
    solver: str = "exact",
    model: LpModel | None = None,
) -> DistortionResult:
    """Supremum of E[SC(outcome)] / SC(b) over admissible metrics.

    Unbounded when SC(b) = 0 with E[SC(outcome)] = 1 is feasible; otherwise
    E[SC(outcome)] is maximised with SC(b) pinned to ``scale``. If SC(b) is
    forced to 0 the status is degenerate with conventional value 1.

    ``solver`` is ``exact`` (rational simplex on the dual), ``exact-primal``
    (rational simplex on the primal programs) or ``float`` (HiGHS on the
    primal programs).
    """
    if solver not in SOLVERS:
        raise ValueError(f"unknown solver {solver!r}; choose from {', '.join(SOLVERS)}")
    if outcome.m != e.m:
        raise ValueError("lottery and election disagree on the number of candidates")
    if not 0 <= b < e.m:
        raise IndexError(f"candidate {b} out of range")
    scale = parse_rational(scale)
    if scale <= 0:
        raise ValueError("scale must be positive")
    model = model or build_model(e, alpha)
    ref = model.cost_row(b)
    obj = model.lottery_row(outcome)
    if solver == "exact":
        status, value, x = _dual_route(model, ref, obj, scale)
    else:
        status, value, x = _primal_route(model, ref, obj, scale, solver)
    witness = None if x is None else _witness(model, x, solver)
    return DistortionResult(status, value, b, witness, solver)


def distortion_of_outcome(
    e: Election, outcome: Lottery, alpha, solver: str = "exact", threads: int = 1
) -> DistortionResult:
    """Maximise ``worst_case_ratio`` over every reference candidate."""
    model = build_model(e, alpha)
    refs = list(e.candidates)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(lambda b: worst_case_ratio(e, outcome, b, alpha, solver=solver, model=model), refs))
    else:
        results = [worst_case_ratio(e, outcome, b, alpha, solver=solver, model=model) for b in refs]
    for r in results:
        if r.status == "unbounded":
            return r
    best = None
    for r in results:
        if best is None or (r.value > best.value) or (r.value == best.value and best.status == "degenerate"):
            best = r
    return best


class NotApplicable(Exception):
    """The bound's denominator vanishes on this instance."""


def _optimal_check(d: MetricSpace, e: Election, alpha, c_star: int) -> Fraction:
    if not consistent_with(d, e):
        raise ValueError("metric is not consistent with the election")
    if not is_alpha_decisive(d, e, alpha):
        raise ValueError("metric is not alpha-decisive")
    sc = [social_cost(d, c) for c in e.candidates]
    if sc[c_star] != min(sc):
        raise ValueError(f"candidate {c_star} is not optimal")
    return sc[c_star]


def lemma3_bound(d: MetricSpace, e: Election, lottery: Lottery, alpha, c_star: int) -> Fraction:
    """Upper bound on the lottery's cost ratio from plurality scores and d(a, c*).

    1 + (1+alpha) sum_a Pr[a] (n - 2 plu(a)/(1+alpha)) d(a,c*) / sum_a plu(a) d(a,c*)

    Raises ``NotApplicable`` when the denominator is 0.
    """
    alpha = parse_rational(alpha)
    _optimal_check(d, e, alpha, c_star)
    plu = plurality_scores(e)
    shrink = 2 / (1 + alpha)
    den = sum((plu[a] * d.cc(a, c_star) for a in e.candidates), Fraction(0))
    if den == 0:
        raise NotApplicable("sum of plu(a) d(a, c*) is zero")
    num = sum(
        (lottery[a] * (e.n - shrink * plu[a]) * d.cc(a, c_star) for a in e.candidates), Fraction(0)
    )
    return 1 + (1 + alpha) * num / den


def check_prop4(d: MetricSpace, e: Election, a: int, c_star: int, alpha) -> bool:
    """SC(a) <= SC(c*) + (n - 2 plu(a)/(1+alpha)) d(a, c*), exactly."""
    alpha = parse_rational(alpha)
    sc_star = _optimal_check(d, e, alpha, c_star)
    plu = plurality_scores(e)[a]
    return social_cost(d, a) <= sc_star + (e.n - 2 * plu / (1 + alpha)) * d.cc(a, c_star)


def check_summation_bound(x: Sequence, w, n) -> bool:
    """sum_i x_i / (n - w x_i) >= m / (m - w) for feasible x."""
    x = [parse_rational(v) for v in x]
    w = parse_rational(w)
    n = parse_rational(n)
    m = len(x)
    if not 0 < w <= 1:
        raise ValueError("w must lie in (0, 1]")
    if m == 0 or sum(x, Fraction(0)) != n:
        raise ValueError("entries must sum to n")
    if any(v < 0 or w * v >= n for v in x):
        raise ValueError("each entry must lie in [0, n/w)")
    lhs = sum((v / (n - w * v) for v in x), Fraction(0))
    return lhs >= Fraction(m) / (m - w)
