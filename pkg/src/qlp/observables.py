"""States, Borel sets restricted to finite unions of intervals, and finite
observables on an orthomodular lattice."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Mapping, Sequence

from .errors import StructuralError
from .lattice import Lattice, is_compatible
from .rational import fmt, to_fraction
from .reports import Check, CheckBuilder, Report

__all__ = [
    "State",
    "check_state",
    "Interval",
    "BorelSet",
    "Observable",
    "observable_apply",
    "observable_range",
    "spectrum",
    "compose",
    "observables_compatible",
]


@dataclass(frozen=True)
class State:
    lattice: Lattice
    values: tuple[Fraction, ...]

    @classmethod
    def from_mapping(cls, L: Lattice, mapping: Mapping) -> "State":
        """Build from ``{label or index: value}``; every element must be present."""
        values: list[Fraction | None] = [None] * L.size
        for key, val in mapping.items():
            values[L.index(key)] = to_fraction(val)
        missing = [L.label(i) for i, v in enumerate(values) if v is None]
        if missing:
            raise StructuralError(f"state has no value for {missing}", witness=missing)
        return cls(L, tuple(values))

    def __call__(self, a: int) -> Fraction:
        return self.values[a]

    def by_label(self, label) -> Fraction:
        return self.values[self.lattice.index(label)]

    def as_dict(self) -> dict[str, Fraction]:
        return {self.lattice.label(i): v for i, v in enumerate(self.values)}


def check_state(L: Lattice, s) -> Report:
    """Check normalization and orthogonal additivity on every orthogonal pair."""
    if not isinstance(s, State):
        s = State.from_mapping(L, s)
    elif len(s.values) != L.size:
        raise StructuralError("state is not total on the lattice")
    v = s.values
    rng = CheckBuilder("range [0,1]")
    for a in L.elements:
        rng.record(0 <= v[a] <= 1, L.label(a), f"value {fmt(v[a])}")
    checks = [rng.build()]
    norm_ok = v[L.zero] == 0 and v[L.one] == 1
    if v[L.zero] != 0:
        witness = L.label(L.zero)
    elif v[L.one] != 1:
        witness = L.label(L.one)
    else:
        witness = None
    checks.append(Check("(i) normalization", norm_ok, witness=witness, checked=2, failures=0 if norm_ok else 1))
    add = CheckBuilder("(ii) orthogonal additivity")
    orth = L.orthogonal_table
    for a, b in combinations(L.elements, 2):
        if orth[a, b]:
            j = L.join(a, b)
            add.record(
                v[j] == v[a] + v[b],
                (L.label(a), L.label(b)),
                f"s({L.label(j)})={fmt(v[j])} but s(a)+s(b)={fmt(v[a] + v[b])}",
            )
    checks.append(add.build())
    return Report("state axioms", checks)


INF = math.inf


def _endpoint(x):
    if x is None:
        return None
    if isinstance(x, float) and math.isinf(x):
        return x
    return to_fraction(x)


@dataclass(frozen=True)
class Interval:
    """Interval with rational or infinite endpoints; infinite ends are open."""

    lo: Fraction | float = -INF
    hi: Fraction | float = INF
    lo_closed: bool = False
    hi_closed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lo", _endpoint(self.lo))
        object.__setattr__(self, "hi", _endpoint(self.hi))
        if self.lo == -INF:
            object.__setattr__(self, "lo_closed", False)
        if self.hi == INF:
            object.__setattr__(self, "hi_closed", False)

    @property
    def empty(self) -> bool:
        if self.lo < self.hi:
            return False
        return not (self.lo == self.hi and self.lo_closed and self.hi_closed)

    def __contains__(self, t) -> bool:
        above = t > self.lo or (self.lo_closed and t == self.lo)
        below = t < self.hi or (self.hi_closed and t == self.hi)
        return above and below


class BorelSet:
    """A finite union of intervals, kept sorted and pairwise disjoint."""

    def __init__(self, intervals: Iterable[Interval] = ()):
        self.intervals: tuple[Interval, ...] = _normalize(intervals)

    @classmethod
    def reals(cls) -> "BorelSet":
        return cls([Interval()])

    @classmethod
    def empty(cls) -> "BorelSet":
        return cls()

    @classmethod
    def point(cls, t) -> "BorelSet":
        t = to_fraction(t)
        return cls([Interval(t, t, True, True)])

    @classmethod
    def points(cls, ts: Iterable) -> "BorelSet":
        return cls(Interval(to_fraction(t), to_fraction(t), True, True) for t in ts)

    @classmethod
    def below(cls, r) -> "BorelSet":
        """The open half-line ``(-inf, r)``."""
        return cls([Interval(-INF, r, False, False)])

    def __contains__(self, t) -> bool:
        return any(t in iv for iv in self.intervals)

    def __or__(self, other: "BorelSet") -> "BorelSet":
        return BorelSet(self.intervals + other.intervals)

    def __eq__(self, other) -> bool:
        return isinstance(other, BorelSet) and self.intervals == other.intervals

    def __hash__(self) -> int:
        return hash(self.intervals)

    def __repr__(self) -> str:
        return "BorelSet(" + " u ".join(_show(iv) for iv in self.intervals) + ")"


def _show(iv: Interval) -> str:
    lo = "-inf" if iv.lo == -INF else fmt(iv.lo)
    hi = "inf" if iv.hi == INF else fmt(iv.hi)
    return ("[" if iv.lo_closed else "(") + f"{lo}, {hi}" + ("]" if iv.hi_closed else ")")


def _normalize(intervals: Iterable[Interval]) -> tuple[Interval, ...]:
    ivs = sorted((iv for iv in intervals if not iv.empty), key=lambda iv: (iv.lo, not iv.lo_closed))
    merged: list[Interval] = []
    for iv in ivs:
        if merged:
            last = merged[-1]
            touching = iv.lo < last.hi or (iv.lo == last.hi and (iv.lo_closed or last.hi_closed))
            if touching:
                if iv.hi > last.hi or (iv.hi == last.hi and iv.hi_closed):
                    hi, hi_closed = iv.hi, iv.hi_closed
                else:
                    hi, hi_closed = last.hi, last.hi_closed
                merged[-1] = Interval(last.lo, hi, last.lo_closed, hi_closed)
                continue
        merged.append(iv)
    return tuple(merged)


class Observable:
    """A finite observable: spectrum points mapped to a partition of unity.

    The assigned elements are nonzero, pairwise orthogonal and join to 1, so
    ``E -> join of assign(t) for t in spectrum & E`` is a homomorphism.
    """

    def __init__(self, lattice: Lattice, assign: Mapping, name: str | None = None):
        if not assign:
            raise ValueError("observable needs at least one spectrum point")
        pairs = sorted((to_fraction(t), lattice.index(e)) for t, e in assign.items())
        points = [t for t, _ in pairs]
        if len(set(points)) != len(points):
            raise ValueError("spectrum points must be distinct")
        elems = [e for _, e in pairs]
        for t, e in pairs:
            if e == lattice.zero:
                raise ValueError(f"spectrum point {fmt(t)} is assigned the zero element")
        orth = lattice.orthogonal_table
        for (s, e), (t, f) in combinations(pairs, 2):
            if not orth[e, f]:
                raise ValueError(
                    f"elements {lattice.label(e)} and {lattice.label(f)} (points {fmt(s)}, {fmt(t)}) are not orthogonal"
                )
        if lattice.join_all(elems) != lattice.one:
            raise ValueError("assigned elements do not join to 1")
        self.lattice = lattice
        self.spectrum: tuple[Fraction, ...] = tuple(points)
        self.assign: tuple[int, ...] = tuple(elems)
        self.name = name

    def __repr__(self) -> str:
        body = ", ".join(f"{fmt(t)}->{self.lattice.label(e)}" for t, e in zip(self.spectrum, self.assign))
        return f"Observable({self.name or ''}{{{body}}})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Observable)
            and other.lattice is self.lattice
            and other.spectrum == self.spectrum
            and other.assign == self.assign
        )

    def __hash__(self) -> int:
        return hash((self.spectrum, self.assign))

    def apply(self, E: BorelSet) -> int:
        return self.lattice.join_all(e for t, e in zip(self.spectrum, self.assign) if t in E)

    def at(self, t) -> int:
        """``x({t})``; the zero element off the spectrum."""
        t = to_fraction(t)
        for s, e in zip(self.spectrum, self.assign):
            if s == t:
                return e
        return self.lattice.zero

    def below(self, r) -> int:
        """``x((-inf, r))``."""
        return self.lattice.join_all(e for t, e in zip(self.spectrum, self.assign) if t < r)

    def range(self) -> frozenset[int]:
        L = self.lattice
        out = {L.zero}
        for e in self.assign:
            out |= {L.join(x, e) for x in out}
        return frozenset(out)


def observable_apply(x: Observable, E: BorelSet) -> int:
    return x.apply(E)


def observable_range(x: Observable) -> frozenset[int]:
    return x.range()


def spectrum(x: Observable) -> tuple[Fraction, ...]:
    return x.spectrum


def compose(g: Mapping | Callable, x: Observable, name: str | None = None) -> Observable:
    """The observable ``g(x)``: a point's image gets the join of its preimage."""
    lookup = g if callable(g) else None
    if lookup is None:
        table = {to_fraction(k): to_fraction(v) for k, v in g.items()}
        missing = [fmt(t) for t in x.spectrum if t not in table]
        if missing:
            raise ValueError(f"g is undefined on spectrum points {missing}")
        lookup = table.__getitem__
    L = x.lattice
    images: dict[Fraction, int] = {}
    for t, e in zip(x.spectrum, x.assign):
        gt = to_fraction(lookup(t))
        images[gt] = L.join(images.get(gt, L.zero), e)
    return Observable(L, images, name=name)


def observables_compatible(x: Observable, y: Observable) -> bool:
    """Ranges are generated by the assigned blocks, so checking those suffices."""
    if x.lattice is not y.lattice:
        raise ValueError("observables live on different lattices")
    L = x.lattice
    return all(is_compatible(L, e, f) for e in x.assign for f in y.assign)


def label_tuple(L: Lattice, items: Sequence[int]) -> tuple[str, ...]:
    return tuple(L.label(i) for i in items)
