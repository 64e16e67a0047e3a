"""s_n-maps: dense tables over ``L^n`` with exact rational values.

A table ``p`` is an s_n-map when

* ``p(1, ..., 1) = 1``,
* ``p`` vanishes whenever two *adjacent* arguments are orthogonal, and
* ``p`` is additive in each argument over orthogonal joins.

:func:`validate` checks exactly those three conditions.  :func:`check_propositions`
checks the consequences that hold for every s_n-map (orthogonal-zero in any
positions, the diagonal state, bounds, compatible meet-collapse and the
permutation symmetries).  :func:`complete` closes a sparse listing under
derivation rules and re-validates the result.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .errors import InconsistencyError, StructuralError, UnderdeterminedError
from .lattice import Lattice, is_compatible
from .observables import State, check_state
from .rational import fmt, to_fraction
from .reports import Check, CheckBuilder, Report

__all__ = [
    "SMap",
    "PartialSMap",
    "validate",
    "complete",
    "derived_state",
    "check_propositions",
    "compatible_class_uncollapsed",
    "permutations_of",
    "replace_with",
    "permutation_class",
    "MarginalReport",
    "marginal_consistency",
    "InconsistencyReport",
]

Tuple = tuple[int, ...]


class SMap:
    """A total table ``L^n -> Q``; not necessarily valid until :func:`validate` says so."""

    def __init__(self, lattice: Lattice, arity: int, table: np.ndarray):
        if arity < 1:
            raise ValueError("arity must be >= 1")
        shape = (lattice.size,) * arity
        if table.shape != shape:
            raise StructuralError(f"table shape {table.shape} does not match {shape}")
        if any(v is None for v in table.flat):
            missing = next(idx for idx in np.ndindex(*shape) if table[idx] is None)
            raise StructuralError(
                f"table is partial; no value at {_labels(lattice, missing)}", witness=_labels(lattice, missing)
            )
        table = table.copy()
        table.setflags(write=False)
        self.lattice = lattice
        self.arity = arity
        self.table = table

    @classmethod
    def from_function(cls, L: Lattice, n: int, f) -> "SMap":
        table = np.empty((L.size,) * n, dtype=object)
        for idx in np.ndindex(*table.shape):
            table[idx] = to_fraction(f(idx))
        return cls(L, n, table)

    @classmethod
    def from_entries(cls, L: Lattice, n: int, entries: Mapping) -> "SMap":
        table = np.full((L.size,) * n, None, dtype=object)
        for key, val in entries.items():
            table[_resolve(L, n, key)] = to_fraction(val)
        return cls(L, n, table)

    def __getitem__(self, key) -> Fraction:
        return self.table[_resolve(self.lattice, self.arity, key)]

    def __call__(self, *items) -> Fraction:
        return self[items]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SMap)
            and other.lattice is self.lattice
            and other.arity == self.arity
            and bool((other.table == self.table).all())
        )

    def __repr__(self) -> str:
        return f"SMap(arity={self.arity}, cells={self.table.size})"

    def tuples(self) -> Iterable[Tuple]:
        return np.ndindex(*self.table.shape)

    def items(self):
        for idx in self.tuples():
            yield idx, self.table[idx]

    def labels(self, idx: Sequence[int]) -> tuple[str, ...]:
        return _labels(self.lattice, idx)


def _labels(L: Lattice, idx: Sequence[int]) -> tuple[str, ...]:
    return tuple(L.label(int(i)) for i in idx)


def _resolve(L: Lattice, n: int, key) -> Tuple:
    if not isinstance(key, tuple):
        key = tuple(key)
    if len(key) != n:
        raise StructuralError(f"tuple {key} has length {len(key)}, expected arity {n}")
    return tuple(L.index(k) for k in key)


def show(L: Lattice, idx: Sequence[int]) -> str:
    return "p(" + ",".join(_labels(L, idx)) + ")"


# -- validation ---------------------------------------------------------------


def validate(p: SMap) -> Report:
    """Exhaustive check of normalization, adjacent-orthogonal zero and additivity."""
    L, n, T = p.lattice, p.arity, p.table
    checks: list[Check] = []

    rng = CheckBuilder("range [0,1]")
    for idx in p.tuples():
        v = T[idx]
        rng.record(0 <= v <= 1, p.labels(idx), f"value {fmt(v)}")
    checks.append(rng.build())

    top = T[(L.one,) * n]
    checks.append(
        Check("(s1) normalization", top == 1, witness=None if top == 1 else p.labels((L.one,) * n),
              detail="" if top == 1 else f"p(1,...,1)={fmt(top)}", checked=1, failures=int(top != 1))
    )

    orth = L.orthogonal_table
    s2 = CheckBuilder("(s2) adjacent orthogonal zero")
    if n >= 2:
        for idx in p.tuples():
            if any(orth[idx[i], idx[i + 1]] for i in range(n - 1)):
                s2.record(T[idx] == 0, p.labels(idx), f"value {fmt(T[idx])}")
    checks.append(s2.build())

    s3 = CheckBuilder("(s3) additivity")
    pairs = [(u, v) for u in L.elements for v in L.elements if u <= v and orth[u, v]]
    failures = []
    for i in range(n):
        moved = np.moveaxis(T, i, 0)
        for u, v in pairs:
            w = L.join(u, v)
            ok = np.asarray(moved[w] == moved[u] + moved[v])
            s3.checked += ok.size
            if not ok.all():
                for ctx in np.argwhere(~ok) if n > 1 else [()]:
                    ctx = tuple(int(c) for c in ctx)
                    tup = ctx[:i] + (w,) + ctx[i:]
                    failures.append((tup, i, u, v))
    for tup, i, u, v in sorted(failures):
        s3.record(
            False,
            {"tuple": list(p.labels(tup)), "coordinate": i + 1, "split": [L.label(u), L.label(v)]},
            f"{show(L, tup)}={fmt(T[tup])} but parts sum to "
            f"{fmt(T[tup[:i] + (u,) + tup[i + 1:]] + T[tup[:i] + (v,) + tup[i + 1:]])}",
        )
    checks.append(s3.build())
    return Report(f"s_{n}-map axioms", checks)


def derived_state(p: SMap) -> State:
    """The diagonal ``a -> p(a, ..., a)``."""
    n = p.arity
    return State(p.lattice, tuple(p.table[(a,) * n] for a in p.lattice.elements))


# -- tuple combinatorics ------------------------------------------------------


def permutations_of(t: Sequence[Hashable]) -> set[tuple]:
    """Distinct rearrangements of ``t``."""
    return set(permutations(tuple(t)))


def replace_with(t: Sequence[Hashable], i: int, k: int) -> tuple:
    """``t`` with position ``i`` overwritten by the entry at position ``k`` (0-based)."""
    t = tuple(t)
    return t[:i] + (t[k],) + t[i + 1:]


def permutation_class(t: Sequence[Hashable], i: int) -> set[tuple]:
    """Union over ``k`` of all rearrangements of ``replace_with(t, i, k)``."""
    out: set[tuple] = set()
    for k in range(len(t)):
        out |= permutations_of(replace_with(t, i, k))
    return out


# -- consequences of the axioms -----------------------------------------------


def _collapse(L: Lattice, idx: Tuple, i: int, j: int) -> Tuple:
    m = L.meet(idx[i], idx[j])
    out = list(idx)
    out[i] = out[j] = m
    return tuple(out)


def check_propositions(p: SMap) -> Report:
    """Exhaustively verify the consequences every s_n-map must satisfy.

    Violations are surfaced with the lexicographically first witness; they
    mean either a bug or an invalid input table, never something to ignore.
    """
    L, n, T = p.lattice, p.arity, p.table
    orth = L.orthogonal_table
    compat = L.compat_table
    nu = derived_state(p)

    ortho_zero = CheckBuilder("orthogonal-zero")
    bound = CheckBuilder("diagonal-bound")
    collapse = CheckBuilder("compatible-meet-collapse")
    unit_rep = CheckBuilder("unit-replacement")
    rep_sym = CheckBuilder("repeat-symmetry")
    comp_sym = CheckBuilder("compatible-symmetry")
    unit_cls = CheckBuilder("unit-class")
    rep_cls = CheckBuilder("repeat-class")
    comp_cls = CheckBuilder("compatible-class")

    pos_pairs = list(combinations(range(n), 2))
    for idx in p.tuples():
        v = T[idx]
        lab = p.labels(idx)
        if any(orth[idx[i], idx[j]] for i, j in pos_pairs):
            ortho_zero.record(v == 0, lab, f"value {fmt(v)}")
        for i in range(n):
            bound.record(v <= nu(idx[i]), lab, f"exceeds diagonal at position {i + 1}")

        has_unit = L.one in idx
        has_repeat = len(set(idx)) < n
        compatible_pairs = [(i, j) for i, j in pos_pairs if compat[idx[i], idx[j]]]

        for i, j in compatible_pairs:
            c = _collapse(L, idx, i, j)
            collapse.record(v == T[c], lab, f"collapsed {show(L, c)}={fmt(T[c])}")

        if has_unit:
            for i in range(n):
                if idx[i] != L.one:
                    continue
                for j in range(n):
                    r = replace_with(idx, i, j)
                    unit_rep.record(v == T[r], lab, f"{show(L, r)}={fmt(T[r])}")
                _record_class(unit_cls, T, L, idx, idx, i, v)

        perms = None
        if has_repeat or compatible_pairs or has_unit:
            perms = permutations_of(idx)
        if has_repeat:
            for q in perms:
                rep_sym.record(v == T[q], lab, f"{show(L, q)}={fmt(T[q])}")
            for i, j in pos_pairs:
                if idx[i] == idx[j]:
                    _record_class(rep_cls, T, L, idx, idx, i, v)
                    _record_class(rep_cls, T, L, idx, idx, j, v)
        if compatible_pairs:
            for q in perms:
                comp_sym.record(v == T[q], lab, f"{show(L, q)}={fmt(T[q])}")
            for i, j in compatible_pairs:
                c = _collapse(L, idx, i, j)
                _record_class(comp_cls, T, L, idx, c, i, v)
                _record_class(comp_cls, T, L, idx, c, j, v)

    state_report = check_state(L, nu)
    diag = Check(
        "diagonal-state",
        state_report.ok,
        witness=None if state_report.ok else state_report.failed()[0].witness,
        detail="" if state_report.ok else state_report.failed()[0].name,
        checked=sum(c.checked for c in state_report.checks),
        failures=sum(c.failures for c in state_report.checks),
    )
    checks = [
        ortho_zero.build(),
        diag,
        bound.build(),
        collapse.build(),
        unit_rep.build(),
        rep_sym.build(),
        comp_sym.build(),
        unit_cls.build(),
        rep_cls.build(),
        comp_cls.build(),
    ]
    return Report(f"s_{n}-map consequences", checks)


def _record_class(builder: CheckBuilder, T, L, idx, base, i, v) -> None:
    for q in sorted(permutation_class(base, i)):
        builder.record(v == T[q], _labels(L, idx), f"position {i + 1}: {show(L, q)}={fmt(T[q])}")


def compatible_class_uncollapsed(p: SMap) -> Check:
    """The class statement for a compatible pair taken literally, without first
    collapsing the pair to its meet.  This is *not* a theorem; the check exists
    to exhibit counterexamples (e.g. any nondegenerate map on 2^2)."""
    L, n, T = p.lattice, p.arity, p.table
    compat = L.compat_table
    b = CheckBuilder("compatible-class-uncollapsed")
    for idx in p.tuples():
        for i, j in combinations(range(n), 2):
            if compat[idx[i], idx[j]] and idx[i] != idx[j] and L.one not in idx:
                _record_class(b, T, L, idx, idx, i, T[idx])
    return b.build()


# -- marginals across arities -------------------------------------------------


@dataclass
class MarginalReport:
    consistent: bool
    violations: list[tuple[tuple[str, ...], Fraction, Fraction]]
    induced: SMap
    induced_report: Report

    @property
    def induced_valid(self) -> bool:
        return self.induced_report.ok

    def to_dict(self) -> dict:
        return {
            "consistent": self.consistent,
            "violations": [{"tuple": list(t), "p_n": fmt(a), "p_m": fmt(b)} for t, a, b in self.violations],
            "induced_valid": self.induced_valid,
        }


def marginal_consistency(p_n: SMap, p_m: SMap) -> MarginalReport:
    """Compare ``p_n(a)`` with ``p_m(a, 1)`` on every tuple."""
    if p_m.lattice is not p_n.lattice:
        raise ValueError("maps live on different lattices")
    if p_m.arity != p_n.arity + 1:
        raise ValueError(f"arity mismatch: {p_n.arity} vs {p_m.arity}; expected a difference of 1")
    L = p_n.lattice
    induced_table = p_m.table[(Ellipsis, L.one)]
    induced = SMap(L, p_n.arity, induced_table)
    violations = [
        (p_n.labels(idx), p_n.table[idx], induced_table[idx])
        for idx in p_n.tuples()
        if p_n.table[idx] != induced_table[idx]
    ]
    return MarginalReport(not violations, violations, induced, validate(induced))


# -- completion ---------------------------------------------------------------


@dataclass
class PartialSMap:
    """Sparse listing: fixed values plus optional equalities between cells."""

    lattice: Lattice
    arity: int
    entries: dict[Tuple, Fraction] = field(default_factory=dict)
    equalities: list[tuple[Tuple, Tuple]] = field(default_factory=list)

    @classmethod
    def from_listing(cls, L: Lattice, n: int, entries: Iterable[tuple[Sequence, object]],
                     equalities: Iterable[tuple[Sequence, Sequence]] = ()) -> "PartialSMap":
        out: dict[Tuple, Fraction] = {}
        for key, val in entries:
            idx = _resolve(L, n, key)
            q = to_fraction(val)
            if not 0 <= q <= 1:
                raise StructuralError(f"{show(L, idx)}={fmt(q)} lies outside [0,1]", witness=_labels(L, idx))
            if idx in out and out[idx] != q:
                raise StructuralError(
                    f"{show(L, idx)} listed twice with values {fmt(out[idx])} and {fmt(q)}", witness=_labels(L, idx)
                )
            out[idx] = q
        eqs = [(_resolve(L, n, a), _resolve(L, n, b)) for a, b in equalities]
        return cls(L, n, out, eqs)


@dataclass(frozen=True)
class Reason:
    rule: str
    premises: tuple[int, ...] = ()
    note: str = ""


@dataclass
class InconsistencyReport:
    tuple: tuple[str, ...]
    first_value: Fraction
    first_chain: list[str]
    second_value: Fraction | None
    second_chain: list[str]
    description: str

    def summary(self) -> str:
        return f"inconsistent at p({','.join(self.tuple)}): {self.description}"

    def to_dict(self) -> dict:
        return {
            "tuple": list(self.tuple),
            "description": self.description,
            "first": {"value": fmt(self.first_value), "derivation": self.first_chain},
            "second": {
                "value": None if self.second_value is None else fmt(self.second_value),
                "derivation": self.second_chain,
            },
        }

    def to_text(self) -> str:
        lines = [self.summary(), "  derivation A:"]
        lines += ["    " + s for s in self.first_chain]
        lines.append("  derivation B:")
        lines += ["    " + s for s in self.second_chain]
        return "\n".join(lines)


@dataclass
class _Rules:
    tuples: list[Tuple]
    equalities: list[tuple[int, int, str]]
    additive: list[tuple[int, int, int, str]]
    zeros: list[tuple[int, str]]
    eq_of: list[list[int]]
    add_of: list[list[int]]
    top: int


@lru_cache(maxsize=16)
def _rules(L: Lattice, n: int) -> _Rules:
    m = L.size
    tuples = list(product(range(m), repeat=n))
    strides = [m ** (n - 1 - i) for i in range(n)]

    def cell(t):
        return sum(a * s for a, s in zip(t, strides))

    orth = L.orthogonal_table
    zeros = []
    equalities: list[tuple[int, int, str]] = []
    additive: list[tuple[int, int, int, str]] = []
    for c, t in enumerate(tuples):
        hit = next(((i, j) for i, j in combinations(range(n), 2) if orth[t[i], t[j]]), None)
        if hit is not None:
            i, j = hit
            zeros.append((c, f"{L.label(t[i])} and {L.label(t[j])} are orthogonal (positions {i + 1},{j + 1})"))
        for i in range(n):
            if t[i] != L.one:
                continue
            for j in range(n):
                if t[j] != L.one:
                    equalities.append((c, cell(replace_with(t, i, j)), f"unit at position {i + 1} replaced by position {j + 1}"))
        if len(set(t)) < n:
            for i in range(n - 1):
                if t[i] != t[i + 1]:
                    s = t[:i] + (t[i + 1], t[i]) + t[i + 2:]
                    if c < cell(s):
                        equalities.append((c, cell(s), f"repeated element: swap positions {i + 1},{i + 2}"))
    for i in range(n):
        for u, v in L.orthogonal_pairs():
            w = L.join(u, v)
            note = f"additivity in position {i + 1}: {L.label(w)} = {L.label(u)} v {L.label(v)}"
            for ctx in product(range(m), repeat=n - 1):
                base = ctx[:i]
                rest = ctx[i:]
                additive.append((cell(base + (w,) + rest), cell(base + (u,) + rest), cell(base + (v,) + rest), note))
    eq_of: list[list[int]] = [[] for _ in tuples]
    add_of: list[list[int]] = [[] for _ in tuples]
    for k, (a, b, _) in enumerate(equalities):
        eq_of[a].append(k)
        eq_of[b].append(k)
    for k, (w, u, v, _) in enumerate(additive):
        for c in (w, u, v):
            add_of[c].append(k)
    return _Rules(tuples, equalities, additive, zeros, eq_of, add_of, cell((L.one,) * n))


class _Conflict(Exception):
    def __init__(self, cell, value, reason, description):
        self.cell, self.value, self.reason, self.description = cell, value, reason, description


def complete(q: PartialSMap, order_seed: int | None = None, max_chain: int = 40) -> SMap:
    """Close ``q`` under the derivation rules and return the total table.

    Rules (each one a consequence of the axioms, applied as rewrites):
    normalization, zero on any orthogonal pair, additivity over every
    orthogonal split in every position, unit replacement, and permutation
    symmetry of tuples with a repeated entry; plus the caller's equalities.

    ``order_seed`` randomizes the worklist order; the result does not depend
    on it (tested).  Raises :class:`InconsistencyError` naming both derivation
    chains of the first conflicting cell, or :class:`UnderdeterminedError`.
    The closed table is re-validated against the axioms before returning.
    """
    L, n = q.lattice, q.arity
    R = _rules(L, n)
    m = L.size
    strides = [m ** (n - 1 - i) for i in range(n)]

    def cell(t):
        return sum(a * s for a, s in zip(t, strides))

    N = len(R.tuples)
    values: list[Fraction | None] = [None] * N
    reasons: list[Reason | None] = [None] * N
    rng = random.Random(order_seed) if order_seed is not None else None

    extra_eq: dict[int, list[tuple[int, str]]] = {}
    for a, b in q.equalities:
        ca, cb = cell(a), cell(b)
        extra_eq.setdefault(ca, []).append((cb, "listed equality"))
        extra_eq.setdefault(cb, []).append((ca, "listed equality"))

    work: list[int] = []

    def assign(c: int, v: Fraction, why: Reason) -> None:
        if values[c] is None:
            if not 0 <= v <= 1:
                raise _Conflict(c, v, why, f"derived value {fmt(v)} lies outside [0,1]")
            values[c] = v
            reasons[c] = why
            work.append(c)
        elif values[c] != v:
            raise _Conflict(c, v, why, f"derived {fmt(v)} but already {fmt(values[c])}")

    seeds: list[tuple[int, Fraction, Reason]] = [(R.top, Fraction(1), Reason("normalization"))]
    seeds += [(c, Fraction(0), Reason("orthogonal-zero", note=note)) for c, note in R.zeros]
    seeds += [(cell(t), v, Reason("given")) for t, v in sorted(q.entries.items())]
    if rng is not None:
        rng.shuffle(seeds)

    try:
        for c, v, why in seeds:
            assign(c, v, why)
        while work:
            if rng is not None:
                k = rng.randrange(len(work))
                work[k], work[-1] = work[-1], work[k]
            c = work.pop()
            v = values[c]
            for k in R.eq_of[c]:
                a, b, note = R.equalities[k]
                other = b if a == c else a
                assign(other, v, Reason("equality", (c,), note))
            for other, note in extra_eq.get(c, ()):
                assign(other, v, Reason("equality", (c,), note))
            for k in R.add_of[c]:
                w, u, x, note = R.additive[k]
                vw, vu, vx = values[w], values[u], values[x]
                known = (vw is not None) + (vu is not None) + (vx is not None)
                if known < 2:
                    continue
                if vw is None:
                    assign(w, vu + vx, Reason("additivity", (u, x), note))
                elif vu is None:
                    assign(u, vw - vx, Reason("additivity", (w, x), note))
                elif vx is None:
                    assign(x, vw - vu, Reason("additivity", (w, u), note))
                elif vw != vu + vx:
                    raise _Conflict(w, vu + vx, Reason("additivity", (u, x), note),
                                    f"parts sum to {fmt(vu + vx)} but cell holds {fmt(vw)}")
    except _Conflict as conflict:
        c = conflict.cell
        tup = _labels(L, R.tuples[c])
        first = _chain(L, R, values, reasons, c, max_chain) if values[c] is not None else []
        second = _render_reason(L, R, values, reasons, c, conflict.value, conflict.reason, max_chain)
        report = InconsistencyReport(tup, values[c] if values[c] is not None else conflict.value,
                                     first, conflict.value, second, conflict.description)
        raise InconsistencyError(report) from None

    free = [_labels(L, R.tuples[c]) for c in range(N) if values[c] is None]
    if free:
        raise UnderdeterminedError(free)
    table = np.empty((m,) * n, dtype=object)
    for c, t in enumerate(R.tuples):
        table[t] = values[c]
    p = SMap(L, n, table)
    report = validate(p)
    if not report.ok:
        bad = report.failed()[0]
        raise InconsistencyError(
            InconsistencyReport(("",) * n, Fraction(0), [], None, [],
                                f"closed table violates {bad.name} at {bad.witness}")
        )
    return p


def _describe(L, R, c, v, why: Reason) -> str:
    head = f"{show(L, R.tuples[c])} = {fmt(v)}"
    if why.rule == "given":
        return head + "  [listed]"
    if why.rule == "normalization":
        return head + "  [normalization]"
    if why.rule == "orthogonal-zero":
        return head + f"  [orthogonal pair: {why.note}]"
    return head + f"  [{why.note}]"


def _render_reason(L, R, values, reasons, c, v, why, limit) -> list[str]:
    lines = [_describe(L, R, c, v, why)]
    seen: set[int] = set()
    for prem in why.premises:
        lines += ["  " + s for s in _chain(L, R, values, reasons, prem, limit, seen)]
    return lines


def _chain(L, R, values, reasons, c, limit, seen=None) -> list[str]:
    """Depth-first rendering of the derivation tree of cell ``c``."""
    seen = set() if seen is None else seen
    lines: list[str] = []

    def walk(cell, depth):
        if len(lines) >= limit:
            return
        why = reasons[cell]
        text = _describe(L, R, cell, values[cell], why)
        if cell in seen:
            lines.append("  " * depth + text + "  (see above)")
            return
        seen.add(cell)
        lines.append("  " * depth + text)
        for prem in why.premises:
            walk(prem, depth + 1)

    walk(c, 0)
    return lines
