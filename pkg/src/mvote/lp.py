"""Linear programming backends.

``simplex`` is an exact two-phase tableau simplex with sparse rows. It
computes in gmpy2's ``mpq`` when installed and in ``Fraction`` otherwise;
results are always returned as ``Fraction``. Pricing is Dantzig's rule;
after a run of degenerate pivots it switches to Bland's rule and stays
there until the objective strictly improves, which rules out cycling.
``highs`` wraps scipy's HiGHS solver and serves as a floating-point
cross-check.

Both solve

    maximize c.x  subject to  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0

with constraint rows given sparsely as ``{column: coefficient}`` dicts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

try:
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover - exercised only without gmpy2
    _Q = Fraction

__all__ = ["LpSolution", "simplex", "highs", "DEGENERATE_RUN"]

# consecutive degenerate pivots tolerated before switching to Bland's rule
DEGENERATE_RUN = 50

Row = Mapping[int, Fraction]


@dataclass(frozen=True)
class LpSolution:
    status: str  # "optimal", "infeasible" or "unbounded"
    value: Fraction | float | None = None
    x: tuple | None = None
    pivots: int = 0
    # one entry per inequality row: optimal duals, or for an infeasible
    # problem without equality rows a Farkas vector y >= 0 with
    # y.A_ub >= 0 and y.b_ub < 0
    duals: tuple | None = None


def _q(v):
    if isinstance(v, Fraction):
        return _Q(v.numerator, v.denominator)
    return _Q(v)


def _frac(v) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


class _Tableau:
    def __init__(self, rows: list[dict], rhs: list, basis: list[int], ncols: int):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.ncols = ncols
        self.obj: dict = {}
        self.z = _Q(0)
        self.pivots = 0

    def set_objective(self, cost: Mapping[int, Fraction]) -> None:
        # express the objective in terms of the nonbasic columns
        obj = {j: _q(v) for j, v in cost.items() if v}
        z = _Q(0)
        for r, b in enumerate(self.basis):
            f = obj.get(b)
            if not f:
                continue
            for j, a in self.rows[r].items():
                v = obj.get(j, 0) - f * a
                if v:
                    obj[j] = v
                else:
                    obj.pop(j, None)
            z += f * self.rhs[r]
        self.obj = obj
        self.z = z

    def pivot(self, r: int, j: int) -> None:
        row = self.rows[r]
        piv = row[j]
        if piv != 1:
            inv = 1 / piv
            for k in row:
                row[k] *= inv
            self.rhs[r] *= inv
        row[j] = _Q(1)
        br = self.rhs[r]
        for k, other in enumerate(self.rows):
            if k == r:
                continue
            f = other.get(j)
            if not f:
                continue
            for col, a in row.items():
                v = other.get(col, 0) - f * a
                if v:
                    other[col] = v
                else:
                    del other[col]
            self.rhs[k] -= f * br
        f = self.obj.get(j)
        if f:
            obj = self.obj
            for col, a in row.items():
                v = obj.get(col, 0) - f * a
                if v:
                    obj[col] = v
                else:
                    obj.pop(col, None)
            self.z += f * br
        self.basis[r] = j
        self.pivots += 1

    def _ratio(self, j: int) -> int | None:
        best = None
        best_ratio = None
        for r, row in enumerate(self.rows):
            a = row.get(j)
            if a is None or a <= 0:
                continue
            ratio = self.rhs[r] / a
            if best is None or ratio < best_ratio or (ratio == best_ratio and self.basis[r] < self.basis[best]):
                best, best_ratio = r, ratio
        return best

    def optimize(self, blocked: set[int]) -> str:
        bland = False
        degenerate = 0
        while True:
            candidates = [(j, v) for j, v in self.obj.items() if v > 0 and j not in blocked]
            if not candidates:
                return "optimal"
            if bland:
                j = min(candidates)[0]
            else:
                j = max(candidates, key=lambda jv: (jv[1], -jv[0]))[0]
            r = self._ratio(j)
            if r is None:
                return "unbounded"
            before = self.z
            self.pivot(r, j)
            if self.z > before:
                degenerate = 0
                bland = False
            else:
                degenerate += 1
                if degenerate >= DEGENERATE_RUN:
                    bland = True


def simplex(
    c: Row,
    n: int,
    a_ub: Sequence[Row] = (),
    b_ub: Sequence = (),
    a_eq: Sequence[Row] = (),
    b_eq: Sequence = (),
) -> LpSolution:
    """Exact two-phase simplex; ``n`` is the number of structural variables."""
    rows: list[dict] = []
    rhs: list = []
    basis: list[int] = []
    col = n
    artificials: list[int] = []
    pending: list[int] = []  # rows awaiting an artificial

    for row, b in zip(a_ub, b_ub):
        b = _q(b)
        sign = -1 if b < 0 else 1
        r = {j: sign * _q(v) for j, v in row.items() if v}
        r[col] = _Q(sign)
        rows.append(r)
        rhs.append(sign * b)
        if sign > 0:
            basis.append(col)
        else:
            basis.append(-1)
            pending.append(len(rows) - 1)
        col += 1
    for row, b in zip(a_eq, b_eq):
        b = _q(b)
        sign = -1 if b < 0 else 1
        rows.append({j: sign * _q(v) for j, v in row.items() if v})
        rhs.append(sign * b)
        basis.append(-1)
        pending.append(len(rows) - 1)
    for r in pending:
        rows[r][col] = _Q(1)
        basis[r] = col
        artificials.append(col)
        col += 1

    n_ub = len(b_ub)
    t = _Tableau(rows, rhs, basis, col)
    art = set(artificials)

    def slack_duals():
        # the dual of a row is minus the reduced cost of its slack
        return tuple(_frac(-t.obj.get(n + k, 0)) for k in range(n_ub))

    if artificials:
        t.set_objective({j: -1 for j in artificials})
        t.optimize(blocked=set())
        if t.z < 0:
            return LpSolution("infeasible", pivots=t.pivots, duals=slack_duals())
        # drive zero-level artificials out of the basis; drop redundant rows
        r = 0
        while r < len(t.rows):
            if t.basis[r] in art:
                j = next((k for k in sorted(t.rows[r]) if k not in art), None)
                if j is None:
                    del t.rows[r], t.rhs[r], t.basis[r]
                    continue
                t.pivot(r, j)
            r += 1
        for row in t.rows:
            for j in art & row.keys():
                del row[j]
    t.set_objective(c)
    status = t.optimize(blocked=art)
    if status == "unbounded":
        return LpSolution("unbounded", pivots=t.pivots)
    x = [Fraction(0)] * n
    for r, b in enumerate(t.basis):
        if b < n:
            x[b] = _frac(t.rhs[r])
    return LpSolution("optimal", _frac(t.z), tuple(x), t.pivots, slack_duals())


def highs(
    c: Row,
    n: int,
    a_ub: Sequence[Row] = (),
    b_ub: Sequence = (),
    a_eq: Sequence[Row] = (),
    b_eq: Sequence = (),
) -> LpSolution:
    """Floating-point solve via scipy's HiGHS; feasibility tolerance 1e-9."""
    from scipy.optimize import linprog
    from scipy.sparse import lil_matrix

    def dense(rows):
        mat = lil_matrix((len(rows), n))
        for r, row in enumerate(rows):
            for j, v in row.items():
                mat[r, j] = float(v)
        return mat.tocsr()

    cost = np.zeros(n)
    for j, v in c.items():
        cost[j] = -float(v)
    kwargs = {}
    if a_ub:
        kwargs["A_ub"] = dense(a_ub)
        kwargs["b_ub"] = np.array([float(b) for b in b_ub])
    if a_eq:
        kwargs["A_eq"] = dense(a_eq)
        kwargs["b_eq"] = np.array([float(b) for b in b_eq])
    res = linprog(
        cost,
        bounds=(0, None),
        method="highs",
        options={"primal_feasibility_tolerance": 1e-9, "dual_feasibility_tolerance": 1e-9},
        **kwargs,
    )
    if res.status == 2:
        return LpSolution("infeasible")
    if res.status == 3:
        return LpSolution("unbounded")
    if res.status != 0:
        raise RuntimeError(f"HiGHS failed: {res.message}")
    return LpSolution("optimal", -float(res.fun), tuple(float(v) for v in res.x))
