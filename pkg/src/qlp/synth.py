"""Synthesis of s_n-maps by exact linear feasibility.

The unknowns are the values of ``p`` on tuples of atoms.  On an atomistic
lattice every element is a join of mutually orthogonal atoms, so additivity
extends those values to all of ``L^n``; the extension is well defined exactly
when every alternative atom decomposition of an element gives the same sum in
every position.  Together with nonnegativity, normalization and the zero rule
for adjacent orthogonal atoms, these rows describe all s_n-maps.

Strict requirements (``p(t) != p(pi t)``) are handled by maximizing the gap
and testing it against zero exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import permutations, product
from typing import Iterable, Mapping, Sequence

from .errors import InternalError
from .lattice import Lattice, atom_decompositions
from .observables import State
from .rational import fmt, to_fraction
from .simplex import Row, certificate_holds, combine, solve
from .smap import PartialSMap, SMap, complete, validate

__all__ = [
    "FixedConstraint",
    "LinearConstraint",
    "ConstraintSet",
    "FeasibilityResult",
    "AtomSpace",
    "synthesize",
    "verify_certificate",
    "Asymmetry",
    "find_noncommutative",
    "MarginalViolation",
    "find_marginal_violation",
    "ConverseReport",
    "marginal_converse",
]


@dataclass(frozen=True)
class FixedConstraint:
    tuple: tuple
    rel: str
    value: Fraction


@dataclass(frozen=True)
class LinearConstraint:
    terms: tuple[tuple[Fraction, tuple], ...]
    rel: str
    value: Fraction


@dataclass
class ConstraintSet:
    """User goals on top of the axioms.

    ``symmetric``: ``None`` imposes nothing, ``True`` requires invariance
    under every permutation of arguments, ``False`` requires some asymmetry.
    """

    fixed: list[FixedConstraint] = field(default_factory=list)
    linear: list[LinearConstraint] = field(default_factory=list)
    diagonal: State | None = None
    symmetric: bool | None = None

    def fix(self, tup, value, rel: str = "=") -> "ConstraintSet":
        self.fixed.append(FixedConstraint(tuple(tup), rel, to_fraction(value)))
        return self

    def add_linear(self, terms: Iterable[tuple[object, Sequence]], rel: str, value) -> "ConstraintSet":
        self.linear.append(
            LinearConstraint(tuple((to_fraction(c), tuple(t)) for c, t in terms), rel, to_fraction(value))
        )
        return self

    def equal(self, t1: Sequence, t2: Sequence) -> "ConstraintSet":
        return self.add_linear([(1, t1), (-1, t2)], "=", 0)

    @classmethod
    def from_partial(cls, q: PartialSMap) -> "ConstraintSet":
        """Listed values and listed equalities of a sparse table."""
        C = cls()
        for t, v in q.entries.items():
            C.fix(t, v)
        for a, b in q.equalities:
            C.equal(a, b)
        return C


class AtomSpace:
    """Variable layout for one arity: one column per atom tuple that is not
    forced to zero by an adjacent orthogonal pair."""

    def __init__(self, L: Lattice, n: int, offset: int = 0, tag: str = ""):
        if n < 1:
            raise ValueError("arity must be >= 1")
        bare = [L.label(e) for e in L.elements if e != L.zero and not atom_decompositions(L, e)]
        if bare:
            raise ValueError(f"lattice is not atomistic: {bare[0]} is not a join of orthogonal atoms")
        self.lattice = L
        self.arity = n
        self.offset = offset
        self.tag = tag
        orth = L.orthogonal_table
        self.columns: dict[tuple[int, ...], int] = {}
        for t in product(L.atoms, repeat=n):
            if any(orth[t[i], t[i + 1]] for i in range(n - 1)):
                continue
            self.columns[t] = offset + len(self.columns)
        self.size = len(self.columns)

    def expand(self, tup: Sequence[int], coef: Fraction = Fraction(1), into: dict | None = None) -> dict[int, Fraction]:
        """Linear form of ``p(tup)`` over the columns (first decomposition of each entry)."""
        L = self.lattice
        out = {} if into is None else into
        parts = []
        for e in tup:
            decs = atom_decompositions(L, e)
            parts.append(sorted(decs[0]) if decs else [])
        for t in product(*parts):
            col = self.columns.get(t)
            if col is not None:
                out[col] = out.get(col, Fraction(0)) + coef
        return {k: v for k, v in out.items() if v} if into is None else out

    def structural_rows(self) -> list[Row]:
        return list(_structural_rows(self.lattice, self.arity, self.offset, self.tag))

    def show(self, t: Sequence[int]) -> str:
        return "p" + self.tag + "(" + ",".join(self.lattice.label(i) for i in t) + ")"

    def to_smap(self, x: Sequence[Fraction]) -> SMap:
        """Extend column values to a total table via completion, then re-validate."""
        L, n = self.lattice, self.arity
        entries = {t: x[self.columns[t]] if t in self.columns else Fraction(0) for t in product(L.atoms, repeat=n)}
        p = complete(PartialSMap(L, n, entries))
        report = validate(p)
        if not report.ok:
            raise InternalError(f"synthesized table fails {report.failed()[0].name}")
        return p


@lru_cache(maxsize=32)
def _structural_rows(L: Lattice, n: int, offset: int, tag: str) -> tuple[Row, ...]:
    space = _space(L, n, offset, tag)
    rows: list[Row] = []
    top = space.expand((L.one,) * n)
    rows.append(Row(top, "=", Fraction(1), f"normalization p{tag}(1,...,1)=1"))
    for e in L.elements:
        decs = [sorted(d) for d in atom_decompositions(L, e)]
        if len(decs) < 2:
            continue
        first = decs[0]
        for i in range(n):
            for ctx in product(L.atoms, repeat=n - 1):
                for other in decs[1:]:
                    coeffs: dict[int, Fraction] = {}
                    for sign, dec in ((1, first), (-1, other)):
                        for t in dec:
                            col = space.columns.get(ctx[:i] + (t,) + ctx[i:])
                            if col is not None:
                                coeffs[col] = coeffs.get(col, Fraction(0)) + sign
                    coeffs = {k: v for k, v in coeffs.items() if v}
                    if not coeffs:
                        continue
                    where = ",".join(L.label(c) for c in ctx[:i]) + ("," if i else "") + "*" + (
                        "," if i < n - 1 else "") + ",".join(L.label(c) for c in ctx[i:])
                    rows.append(Row(
                        coeffs, "=", Fraction(0),
                        f"well-defined p{tag}({where}) at *={L.label(e)}: "
                        f"{{{','.join(L.label(t) for t in first)}}} vs {{{','.join(L.label(t) for t in other)}}}",
                    ))
    return tuple(rows)


@lru_cache(maxsize=32)
def _space(L: Lattice, n: int, offset: int, tag: str) -> AtomSpace:
    return AtomSpace(L, n, offset, tag)


def _resolve(L: Lattice, tup) -> tuple[int, ...]:
    return tuple(L.index(x) for x in tup)


def _term(coef: Fraction, name: str, first: bool) -> str:
    sign = "-" if coef < 0 else ("" if first else "+")
    mag = abs(coef)
    body = name if mag == 1 else f"{fmt(mag)}*{name}"
    return (sign + body) if first else f" {sign} {body}"


def _constraint_rows(space: AtomSpace, C: ConstraintSet) -> list[Row]:
    L, n = space.lattice, space.arity
    rows: list[Row] = []
    for c in C.fixed:
        t = _resolve(L, c.tuple)
        if len(t) != n:
            raise ValueError(f"constraint tuple {c.tuple} does not have arity {n}")
        rows.append(Row(space.expand(t), c.rel, c.value, f"{space.show(t)} {c.rel} {fmt(c.value)}"))
    for c in C.linear:
        coeffs: dict[int, Fraction] = {}
        parts = []
        for coef, tup in c.terms:
            t = _resolve(L, tup)
            if len(t) != n:
                raise ValueError(f"constraint tuple {tup} does not have arity {n}")
            space.expand(t, coef, coeffs)
            parts.append(_term(coef, space.show(t), first=not parts))
        coeffs = {k: v for k, v in coeffs.items() if v}
        rows.append(Row(coeffs, c.rel, c.value, "".join(parts) + f" {c.rel} {fmt(c.value)}"))
    if C.diagonal is not None:
        for e in L.elements:
            t = (e,) * n
            rows.append(Row(space.expand(t), "=", C.diagonal.values[e],
                            f"diagonal {space.show(t)} = {fmt(C.diagonal.values[e])}"))
    if C.symmetric:
        for t in space.columns:
            for i in range(n - 1):
                s = t[:i] + (t[i + 1], t[i]) + t[i + 2:]
                if s <= t:
                    continue
                coeffs = space.expand(t)
                space.expand(s, Fraction(-1), coeffs)
                coeffs = {k: v for k, v in coeffs.items() if v}
                if coeffs:
                    rows.append(Row(coeffs, "=", Fraction(0), f"symmetry {space.show(t)} = {space.show(s)}"))
    return rows


@dataclass
class FeasibilityResult:
    status: str  # "feasible" | "infeasible"
    witness: SMap | None = None
    certificate: list[tuple[str, Fraction]] = field(default_factory=list)
    rows: list[Row] = field(default_factory=list)
    multipliers: dict[int, Fraction] = field(default_factory=dict)
    objective: Fraction | None = None
    note: str = ""

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"

    def certificate_rows(self) -> list[Row]:
        return [self.rows[i] for i in sorted(self.multipliers)]

    def to_dict(self) -> dict:
        out: dict = {"status": self.status}
        if self.objective is not None:
            out["objective"] = fmt(self.objective)
        if self.certificate:
            out["certificate"] = [{"constraint": lab, "multiplier": fmt(z)} for lab, z in self.certificate]
        if self.note:
            out["note"] = self.note
        return out


def verify_certificate(result: FeasibilityResult) -> bool:
    """Re-derive the contradiction from the certificate rows alone.

    The rows named by the certificate are combined with their multipliers;
    the result must read ``c . x <= d`` with every ``c_j >= 0`` and ``d < 0``.
    When every named row is an equality and ``c`` vanishes, the subset is
    also checked by rank comparison under Gaussian elimination.
    """
    if result.feasible or not result.multipliers:
        return False
    ok = certificate_holds(result.rows, result.multipliers)
    subset = result.certificate_rows()
    if ok and all(r.rel == "=" for r in subset):
        coeffs, _ = combine(result.rows, result.multipliers)
        if not coeffs:
            ok = _rank(subset, augmented=True) > _rank(subset, augmented=False)
    return ok


def _rank(rows: Sequence[Row], augmented: bool) -> int:
    cols = sorted({j for r in rows for j in r.coeffs})
    mat = [[to_fraction(r.coeffs.get(j, 0)) for j in cols] + ([to_fraction(r.rhs)] if augmented else []) for r in rows]
    rank = 0
    width = len(mat[0]) if mat else 0
    for c in range(width):
        piv = next((r for r in range(rank, len(mat)) if mat[r][c] != 0), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        for r in range(len(mat)):
            if r != rank and mat[r][c] != 0:
                f = mat[r][c] / mat[rank][c]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[rank])]
        rank += 1
    return rank


def _run(spaces: Sequence[AtomSpace], rows: list[Row], maximize: dict | None = None) -> FeasibilityResult:
    num = sum(s.size for s in spaces)
    lp = solve(num, rows, maximize)
    if not lp.feasible:
        cert = [(rows[i].label, z) for i, z in sorted(lp.farkas.items())]
        return FeasibilityResult("infeasible", certificate=cert, rows=rows, multipliers=dict(lp.farkas))
    if lp.status == "unbounded":
        raise InternalError("s-map polytope is bounded; the LP cannot be unbounded")
    result = FeasibilityResult("feasible", rows=rows, objective=lp.value)
    result.x = lp.x  # type: ignore[attr-defined]
    return result


def synthesize(
    L: Lattice,
    n: int,
    C: ConstraintSet | None = None,
    objective: Mapping[Sequence, object] | None = None,
) -> FeasibilityResult:
    """Find an s_n-map on ``L`` meeting ``C``, or certify that none exists.

    ``objective`` maps tuples to coefficients; when given, the witness
    maximizes ``sum coef * p(tuple)`` (a vertex of the feasible polytope).
    """
    C = C or ConstraintSet()
    space = _space(L, n, 0, "")
    rows = list(_structural_rows(L, n, 0, "")) + _constraint_rows(space, C)
    if C.symmetric is False:
        base = ConstraintSet(C.fixed, C.linear, C.diagonal, None)
        found = find_noncommutative(L, n, base)
        if found is None:
            res = _run([space], rows)
            if res.feasible:
                res.status = "infeasible"
                res.note = "every asymmetry gap has maximum 0 under the constraints"
            return res
        return FeasibilityResult("feasible", witness=found.smap, rows=rows, objective=found.gap)
    obj = None
    if objective:
        obj = {}
        for tup, coef in objective.items():
            space.expand(_resolve(L, tup), to_fraction(coef), obj)
        obj = {k: v for k, v in obj.items() if v}
    res = _run([space], rows, obj or None)
    if res.feasible:
        res.witness = space.to_smap(res.x)  # type: ignore[attr-defined]
    return res


def _candidate_tuples(L: Lattice, n: int) -> Iterable[tuple[int, ...]]:
    compat = L.compat_table
    for t in product(L.elements, repeat=n):
        if len(set(t)) < n:
            continue
        if any(compat[t[i], t[j]] for i in range(n) for j in range(i + 1, n)):
            continue
        yield t


@dataclass
class Asymmetry:
    smap: SMap
    tuple: tuple[str, ...]
    permuted: tuple[str, ...]
    gap: Fraction

    def to_dict(self) -> dict:
        return {"tuple": list(self.tuple), "permuted": list(self.permuted), "gap": fmt(self.gap)}


def find_noncommutative(L: Lattice, n: int, C: ConstraintSet | None = None) -> Asymmetry | None:
    """Maximize ``p(t) - p(pi t)`` over candidate pairs; first positive gap wins.

    Candidates are tuples of distinct, pairwise incompatible elements (any
    other tuple is permutation invariant for every s_n-map).
    """
    C = C or ConstraintSet()
    space = _space(L, n, 0, "")
    rows = list(_structural_rows(L, n, 0, "")) + _constraint_rows(space, C)
    for t in _candidate_tuples(L, n):
        for perm in sorted(set(permutations(range(n)))):
            s = tuple(t[k] for k in perm)
            if s <= t:
                continue
            obj = space.expand(t)
            space.expand(s, Fraction(-1), obj)
            obj = {k: v for k, v in obj.items() if v}
            if not obj:
                continue
            res = _run([space], rows, obj)
            if not res.feasible:
                return None
            if res.objective > 0:
                p = space.to_smap(res.x)  # type: ignore[attr-defined]
                return Asymmetry(p, p.labels(t), p.labels(s), res.objective)
    return None


@dataclass
class MarginalViolation:
    lower: SMap
    upper: SMap
    tuple: tuple[str, ...]
    gap: Fraction

    def to_dict(self) -> dict:
        return {"tuple": list(self.tuple), "gap": fmt(self.gap),
                "p_n": fmt(self.lower[self.tuple]),
                "p_n+1": fmt(self.upper[self.tuple + (self.lower.lattice.label(self.lower.lattice.one),)])}


def _paired(L: Lattice, n: int) -> tuple[AtomSpace, AtomSpace, list[Row]]:
    low = _space(L, n, 0, "")
    high = _space(L, n + 1, low.size, "'")
    rows = list(_structural_rows(L, n, 0, "")) + list(_structural_rows(L, n + 1, low.size, "'"))
    for t in L.atoms:
        coeffs = low.expand((t,) * n)
        high.expand((t,) * (n + 1), Fraction(-1), coeffs)
        coeffs = {k: v for k, v in coeffs.items() if v}
        if coeffs:
            rows.append(Row(coeffs, "=", Fraction(0), f"equal diagonal at {L.label(t)}"))
    return low, high, rows


def find_marginal_violation(L: Lattice, n: int) -> MarginalViolation | None:
    """Search for an s_n-map and an s_{n+1}-map with the same diagonal state
    but ``p_n(t) != p_{n+1}(t, 1)`` for some ``t``."""
    low, high, rows = _paired(L, n)
    for t in product(L.elements, repeat=n):
        if L.zero in t:
            continue
        diff = low.expand(t)
        high.expand(t + (L.one,), Fraction(-1), diff)
        diff = {k: v for k, v in diff.items() if v}
        if not diff:
            continue
        for sign in (1, -1):
            obj = {k: sign * v for k, v in diff.items()}
            res = _run([low, high], rows, obj)
            if not res.feasible:
                return None
            if res.objective > 0:
                x = res.x  # type: ignore[attr-defined]
                p_n = low.to_smap(x[: low.size])
                p_m = high.to_smap([Fraction(0)] * low.size + x[low.size:])
                return MarginalViolation(p_n, p_m, p_n.labels(t), res.objective)
    return None


@dataclass
class ConverseReport:
    """Outcome of searching for an asymmetric ``p_n`` equal to ``p_{n+1}(., 1)``."""

    found: bool
    witness: MarginalViolation | None
    candidates: int
    feasible_base: bool

    def to_dict(self) -> dict:
        out = {"asymmetric_marginal_found": self.found, "candidates_checked": self.candidates,
               "base_feasible": self.feasible_base}
        if self.witness is not None:
            out["witness"] = {"tuple": list(self.witness.tuple), "gap": fmt(self.witness.gap)}
        return out


def marginal_converse(L: Lattice, n: int) -> ConverseReport:
    """Constrain ``p_{n+1}(t, 1) = p_n(t)`` for every atom tuple and maximize an
    asymmetry gap of ``p_n``.  Reports whatever the LP finds."""
    low, high, rows = _paired(L, n)
    for t in product(L.atoms, repeat=n):
        coeffs = low.expand(t)
        high.expand(t + (L.one,), Fraction(-1), coeffs)
        coeffs = {k: v for k, v in coeffs.items() if v}
        if coeffs:
            rows.append(Row(coeffs, "=", Fraction(0), f"marginal {low.show(t)} = {high.show(t + (L.one,))}"))
    base = _run([low, high], rows)
    count = 0
    if not base.feasible:
        return ConverseReport(False, None, 0, False)
    for t in _candidate_tuples(L, n):
        for perm in sorted(set(permutations(range(n)))):
            s = tuple(t[k] for k in perm)
            if s <= t:
                continue
            obj = low.expand(t)
            low.expand(s, Fraction(-1), obj)
            obj = {k: v for k, v in obj.items() if v}
            if not obj:
                continue
            count += 1
            res = _run([low, high], rows, obj)
            if res.objective > 0:
                x = res.x  # type: ignore[attr-defined]
                p_n = low.to_smap(x[: low.size])
                p_m = high.to_smap([Fraction(0)] * low.size + x[low.size:])
                return ConverseReport(True, MarginalViolation(p_n, p_m, p_n.labels(t), res.objective), count, True)
    return ConverseReport(False, None, count, True)
