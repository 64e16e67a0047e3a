"""Exact two-phase simplex over the rationals with Bland's rule.

Rows are sparse ``{column: coefficient}`` dicts.  Arithmetic runs on
``gmpy2.mpq`` (exact, C speed); inputs and outputs are ``Fraction``.  There is
no floating point anywhere on the pivoting path, so results are reproducible
bit for bit.

Infeasibility comes with a Farkas certificate: multipliers ``z`` on the
original rows such that combining them yields ``c.x <= d`` with ``c >= 0``
and ``d < 0``, which no ``x >= 0`` satisfies.  :func:`certificate_holds`
re-derives that combination from the raw rows without touching the tableau.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from gmpy2 import mpq

from .rational import to_fraction

__all__ = ["Row", "LPResult", "solve", "certificate_holds", "combine"]

RELATIONS = ("=", "<=", ">=")


@dataclass(frozen=True)
class Row:
    coeffs: Mapping[int, Fraction]
    rel: str
    rhs: Fraction
    label: str = ""

    def __post_init__(self):
        if self.rel not in RELATIONS:
            raise ValueError(f"relation must be one of {RELATIONS}, got {self.rel!r}")


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: list[Fraction] = field(default_factory=list)
    value: Fraction | None = None
    farkas: dict[int, Fraction] = field(default_factory=dict)
    pivots: int = 0

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"


def _q(v) -> mpq:
    return v if isinstance(v, type(mpq())) else mpq(to_fraction(v))


def _f(v: mpq) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


class _Tableau:
    def __init__(self, rows: list[dict], rhs: list, basis: list[int]):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.pivots = 0

    def pivot(self, r: int, j: int, obj: dict, obj_val: list) -> None:
        row = self.rows[r]
        a = row[j]
        if a != 1:
            inv = 1 / a
            for k in row:
                row[k] *= inv
            self.rhs[r] *= inv
        b = self.rhs[r]
        for k, other in enumerate(self.rows):
            if k == r:
                continue
            f = other.get(j)
            if f is None:
                continue
            for col, v in row.items():
                nv = other.get(col, 0) - f * v
                if nv:
                    other[col] = nv
                else:
                    other.pop(col, None)
            self.rhs[k] -= f * b
        f = obj.get(j)
        if f is not None:
            for col, v in row.items():
                nv = obj.get(col, 0) - f * v
                if nv:
                    obj[col] = nv
                else:
                    obj.pop(col, None)
            obj_val[0] -= f * b
        self.basis[r] = j
        self.pivots += 1

    def run(self, obj: dict, obj_val: list, allowed) -> str:
        """Minimize; ``obj`` holds reduced costs.  Bland: lowest index enters and leaves."""
        while True:
            entering = min((j for j, d in obj.items() if d < 0 and allowed(j)), default=None)
            if entering is None:
                return "optimal"
            best = None
            for r, row in enumerate(self.rows):
                a = row.get(entering)
                if a is None or a <= 0:
                    continue
                ratio = self.rhs[r] / a
                key = (ratio, self.basis[r])
                if best is None or key < best[0]:
                    best = (key, r)
            if best is None:
                return "unbounded"
            self.pivot(best[1], entering, obj, obj_val)


def solve(num_vars: int, rows: Sequence[Row], maximize: Mapping[int, object] | None = None) -> LPResult:
    """Find ``x >= 0`` satisfying ``rows``; optionally maximize ``maximize . x``."""
    m = len(rows)
    n_slack = sum(1 for r in rows if r.rel != "=")
    art0 = num_vars + n_slack
    t_rows: list[dict] = []
    rhs: list = []
    signs: list[int] = []
    slack = num_vars
    for i, r in enumerate(rows):
        d = {j: _q(v) for j, v in r.coeffs.items() if v}
        for j in d:
            if not 0 <= j < num_vars:
                raise ValueError(f"row {r.label!r} references variable {j} outside 0..{num_vars - 1}")
        if r.rel == "<=":
            d[slack] = mpq(1)
            slack += 1
        elif r.rel == ">=":
            d[slack] = mpq(-1)
            slack += 1
        b = _q(r.rhs)
        sign = -1 if b < 0 else 1
        if sign < 0:
            d = {j: -v for j, v in d.items()}
            b = -b
        d[art0 + i] = mpq(1)
        t_rows.append(d)
        rhs.append(b)
        signs.append(sign)
    tab = _Tableau(t_rows, rhs, [art0 + i for i in range(m)])

    # phase 1: minimize the sum of artificials
    obj: dict = {}
    for row in t_rows:
        for j, v in row.items():
            if j < art0:
                obj[j] = obj.get(j, 0) - v
    obj = {j: v for j, v in obj.items() if v}
    obj_val = [-sum(rhs, mpq(0))]
    tab.run(obj, obj_val, lambda j: True)
    infeasibility = -obj_val[0]
    if infeasibility > 0:
        farkas = {}
        for i in range(m):
            pi = 1 - obj.get(art0 + i, 0)  # simplex multiplier of row i
            z = -pi * signs[i]
            if z:
                farkas[i] = _f(z)
        return LPResult("infeasible", farkas=farkas, pivots=tab.pivots)

    # drive zero-level artificials out of the basis; drop redundant rows
    r = 0
    while r < len(tab.rows):
        if tab.basis[r] >= art0:
            j = min((j for j in tab.rows[r] if j < art0), default=None)
            if j is None:
                del tab.rows[r], tab.rhs[r], tab.basis[r]
                continue
            tab.pivot(r, j, {}, [0])
        r += 1
    for row in tab.rows:
        for j in [j for j in row if j >= art0]:
            del row[j]

    value = None
    if maximize:
        cost = {j: -_q(v) for j, v in maximize.items() if v}
        obj = dict(cost)
        obj_val = [mpq(0)]
        for r, b in enumerate(tab.basis):
            cb = cost.get(b)
            if cb:
                for j, v in tab.rows[r].items():
                    nv = obj.get(j, 0) - cb * v
                    if nv:
                        obj[j] = nv
                    else:
                        obj.pop(j, None)
                obj_val[0] -= cb * tab.rhs[r]
        status = tab.run(obj, obj_val, lambda j: j < art0)
        if status == "unbounded":
            return LPResult("unbounded", pivots=tab.pivots)
        value = _f(obj_val[0])  # min of -c.x is -obj_val; max c.x = obj_val

    x = [Fraction(0)] * num_vars
    for r, b in enumerate(tab.basis):
        if b < num_vars:
            x[b] = _f(tab.rhs[r])
    if value is None and maximize is not None:
        value = Fraction(0)
    return LPResult("optimal", x=x, value=value, pivots=tab.pivots)


def combine(rows: Sequence[Row], multipliers: Mapping[int, Fraction]) -> tuple[dict[int, Fraction], Fraction]:
    """``sum_i z_i * row_i`` as (coefficients, right-hand side)."""
    coeffs: dict[int, Fraction] = {}
    rhs = Fraction(0)
    for i, z in multipliers.items():
        z = to_fraction(z)
        for j, v in rows[i].coeffs.items():
            coeffs[j] = coeffs.get(j, Fraction(0)) + z * to_fraction(v)
        rhs += z * to_fraction(rows[i].rhs)
    return {j: v for j, v in coeffs.items() if v}, rhs


def certificate_holds(rows: Sequence[Row], multipliers: Mapping[int, Fraction]) -> bool:
    """True iff the multipliers prove ``rows`` (with ``x >= 0``) infeasible."""
    if not multipliers:
        return False
    for i, z in multipliers.items():
        rel = rows[i].rel
        if (rel == "<=" and z < 0) or (rel == ">=" and z > 0):
            return False
    coeffs, rhs = combine(rows, multipliers)
    return all(v >= 0 for v in coeffs.values()) and rhs < 0
