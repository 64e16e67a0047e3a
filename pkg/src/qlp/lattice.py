"""Finite orthomodular lattices.

A lattice is stored fully materialized: the order as an ``m x m`` boolean
matrix, the orthocomplement as an index permutation, and cached meet/join
tables.  Elements are plain ``int`` indices; labels exist only for I/O.

All instances of interest are tiny (at most ``2**10`` elements), so every
axiom is verified exhaustively rather than argued.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import InternalError, StructuralError
from .reports import Check, Report

__all__ = [
    "LatticeDescription",
    "Lattice",
    "OMLReport",
    "check_oml",
    "make_mo",
    "make_boolean",
    "from_generator",
    "is_orthogonal",
    "is_compatible",
    "compatible_by_criterion",
    "compatibility_witness",
    "atom_decompositions",
]

MAX_BOOLEAN_RANK = 10
# Lattices up to this size cross-check compatibility by exhaustive witness search.
WITNESS_CROSSCHECK_LIMIT = 64


@dataclass(frozen=True)
class LatticeDescription:
    """Unvalidated candidate: labels, order pairs, orthocomplement."""

    labels: tuple[str, ...]
    leq_pairs: tuple[tuple[int, int], ...]
    ortho: tuple[int, ...]
    zero: int
    one: int

    @property
    def size(self) -> int:
        return len(self.labels)


class Lattice:
    """A validated finite orthomodular lattice (immutable)."""

    def __init__(self, labels, leq, ortho, zero, one, meet, join, atoms):
        self.labels: tuple[str, ...] = tuple(labels)
        self.leq: np.ndarray = leq
        self.ortho: tuple[int, ...] = tuple(int(x) for x in ortho)
        self.zero = int(zero)
        self.one = int(one)
        self.meet_table: np.ndarray = meet
        self.join_table: np.ndarray = join
        self.atoms: tuple[int, ...] = tuple(int(a) for a in atoms)
        for arr in (self.leq, self.meet_table, self.join_table):
            arr.setflags(write=False)
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        self._decompositions: dict[int, list[frozenset[int]]] = {}
        self.name: str | None = None  # generator shorthand, when built from one

    def __repr__(self) -> str:
        return f"Lattice(size={self.size}, atoms={len(self.atoms)})"

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def elements(self) -> range:
        return range(self.size)

    def index(self, label) -> int:
        if isinstance(label, (int, np.integer)) and not isinstance(label, bool):
            if 0 <= label < self.size:
                return int(label)
            raise StructuralError(f"element index {label} out of range")
        try:
            return self._index[label]
        except KeyError:
            raise StructuralError(f"unknown element label {label!r}") from None

    def label(self, i: int) -> str:
        return self.labels[i]

    def le(self, a: int, b: int) -> bool:
        return bool(self.leq[a, b])

    def perp(self, a: int) -> int:
        return self.ortho[a]

    def meet(self, a: int, b: int) -> int:
        return int(self.meet_table[a, b])

    def join(self, a: int, b: int) -> int:
        return int(self.join_table[a, b])

    def join_all(self, items: Iterable[int]) -> int:
        acc = self.zero
        for x in items:
            acc = int(self.join_table[acc, x])
        return acc

    def meet_all(self, items: Iterable[int]) -> int:
        acc = self.one
        for x in items:
            acc = int(self.meet_table[acc, x])
        return acc

    @cached_property
    def orthogonal_table(self) -> np.ndarray:
        o = np.asarray(self.ortho)
        table = self.leq[:, o].copy()  # a <= b^perp
        table.setflags(write=False)
        return table

    @cached_property
    def compat_table(self) -> np.ndarray:
        table = _criterion_table(self)
        if self.size <= WITNESS_CROSSCHECK_LIMIT:
            for a in self.elements:
                for b in self.elements:
                    if (compatibility_witness(self, a, b) is not None) != bool(table[a, b]):
                        raise InternalError(
                            f"compatibility criterion and witness search disagree on "
                            f"({self.label(a)}, {self.label(b)})"
                        )
        table.setflags(write=False)
        return table

    def orthogonal_pairs(self) -> list[tuple[int, int]]:
        """Unordered pairs ``u < v`` of nonzero, mutually orthogonal elements."""
        o = self.orthogonal_table
        return [
            (u, v)
            for u in self.elements
            for v in range(u + 1, self.size)
            if u != self.zero and v != self.zero and o[u, v]
        ]

    def describe(self) -> LatticeDescription:
        pairs = tuple((int(i), int(j)) for i, j in np.argwhere(self.leq))
        return LatticeDescription(self.labels, pairs, self.ortho, self.zero, self.one)


class OMLReport(Report):
    """Axiom report; ``lattice`` is set when every axiom passes."""

    def __init__(self, title, checks, lattice=None):
        super().__init__(title, checks)
        self.lattice = lattice


def _closure(leq: np.ndarray) -> np.ndarray:
    leq = leq.copy()
    np.fill_diagonal(leq, True)
    for k in range(leq.shape[0]):
        leq |= leq[:, k : k + 1] & leq[k : k + 1, :]
    return leq


def _bound_tables(leq: np.ndarray, labels) -> tuple[np.ndarray, np.ndarray]:
    m = leq.shape[0]
    below = leq.sum(axis=0)  # number of elements <= j
    above = leq.sum(axis=1)  # number of elements >= i
    meet = np.empty((m, m), dtype=np.int64)
    join = np.empty((m, m), dtype=np.int64)
    for a in range(m):
        down = np.flatnonzero(leq[:, a])
        lower = leq[down, :]  # lower[r, b]: down[r] <= b (and <= a)
        g = down[np.where(lower, below[down][:, None], -1).argmax(axis=0)]
        bad = (lower & ~leq[down][:, g]).any(axis=0) | ~lower.any(axis=0)
        if bad.any():
            b = int(np.argmax(bad))
            raise StructuralError(
                f"no greatest lower bound for ({labels[a]}, {labels[b]})", witness=(labels[a], labels[b])
            )
        meet[a] = g
        up = np.flatnonzero(leq[a, :])
        upper = leq[:, up].T  # upper[r, b]: b <= up[r] (and a <= up[r])
        h = up[np.where(upper, above[up][:, None], -1).argmax(axis=0)]
        bad = (upper & ~leq[h][:, up].T).any(axis=0) | ~upper.any(axis=0)
        if bad.any():
            b = int(np.argmax(bad))
            raise StructuralError(
                f"no least upper bound for ({labels[a]}, {labels[b]})", witness=(labels[a], labels[b])
            )
        join[a] = h
    return meet, join


def _first_pair(mask: np.ndarray):
    hits = np.argwhere(mask)
    if len(hits) == 0:
        return None
    return tuple(int(x) for x in hits[0])


def check_oml(desc: LatticeDescription) -> OMLReport:
    """Verify the partial order, lattice-hood and orthocomplement axioms (i)-(v).

    The supplied ``leq_pairs`` are closed reflexively and transitively, so a
    Hasse diagram is an acceptable input.  A missing meet or join raises
    :class:`StructuralError`; axiom failures are reported with a witness.
    """
    m = desc.size
    labels = desc.labels
    if m == 0:
        raise StructuralError("empty element set")
    if len(set(labels)) != m:
        raise StructuralError("duplicate element labels")
    if len(desc.ortho) != m:
        raise StructuralError(f"ortho has {len(desc.ortho)} entries for {m} elements")
    for idx in (desc.zero, desc.one, *desc.ortho, *(x for p in desc.leq_pairs for x in p)):
        if not (isinstance(idx, (int, np.integer)) and 0 <= idx < m):
            raise StructuralError(f"element index {idx!r} out of range")

    leq = np.zeros((m, m), dtype=bool)
    for i, j in desc.leq_pairs:
        leq[i, j] = True
    leq = _closure(leq)
    checks: list[Check] = []

    cyc = _first_pair(leq & leq.T & ~np.eye(m, dtype=bool))
    if cyc is not None:
        raise StructuralError(
            f"order is not antisymmetric: {labels[cyc[0]]} <= {labels[cyc[1]]} <= {labels[cyc[0]]}",
            witness=(labels[cyc[0]], labels[cyc[1]]),
        )
    checks.append(Check("partial order", True, checked=m * m))

    not_bounded = ~leq[desc.zero, :] | ~leq[:, desc.one]
    if not_bounded.any():
        x = int(np.argmax(not_bounded))
        checks.append(Check("bounds", False, witness=labels[x], detail="0 <= x <= 1 fails"))
        return OMLReport("OML axioms", checks)
    checks.append(Check("bounds", True, checked=m))

    meet, join = _bound_tables(leq, labels)
    checks.append(Check("(i) finite meets and joins", True, checked=m * m))

    o = np.asarray(desc.ortho, dtype=np.int64)
    idx = np.arange(m)

    bad = o[o] != idx
    checks.append(_axiom("(ii) involution", bad, labels, "(a^perp)^perp != a"))

    bad = join[idx, o] != desc.one
    checks.append(_axiom("(iii) a v a^perp = 1", bad, labels, "a v a^perp != 1"))

    bad = leq & ~leq[np.ix_(o, o)].T
    checks.append(_axiom_pair("(iv) order reversal", bad, labels, "a <= b but not b^perp <= a^perp"))

    rhs = join[idx[:, None], meet[o, :]]  # a v (a^perp ^ b)
    bad = leq & (rhs != idx[None, :])
    checks.append(_axiom_pair("(v) orthomodular law", bad, labels, "a <= b but b != a v (a^perp ^ b)"))

    if not all(c.passed for c in checks):
        return OMLReport("OML axioms", checks)

    atoms = [int(x) for x in np.flatnonzero(leq.sum(axis=0) == 2)]  # exactly {0, x} below x
    lattice = Lattice(labels, leq, desc.ortho, desc.zero, desc.one, meet, join, atoms)
    failing = next((x for x in range(m) if _greedy_decomposition(lattice, x) is None), None)
    if failing is not None:
        checks.append(Check("atomistic", False, witness=labels[failing], detail="not a join of orthogonal atoms"))
        return OMLReport("OML axioms", checks)
    checks.append(Check("atomistic", True, checked=m))
    return OMLReport("OML axioms", checks, lattice)


def _axiom(name, bad, labels, detail) -> Check:
    if bad.any():
        a = int(np.argmax(bad))
        return Check(name, False, witness=labels[a], detail=detail, checked=len(bad), failures=int(bad.sum()))
    return Check(name, True, checked=len(bad))


def _axiom_pair(name, bad, labels, detail) -> Check:
    pair = _first_pair(bad)
    if pair is not None:
        return Check(
            name,
            False,
            witness=(labels[pair[0]], labels[pair[1]]),
            detail=detail,
            checked=bad.size,
            failures=int(bad.sum()),
        )
    return Check(name, True, checked=bad.size)


def _greedy_decomposition(L: Lattice, e: int):
    # e = t v (t^perp ^ e) for any atom t <= e, by the orthomodular law
    parts = []
    rest = e
    while rest != L.zero:
        t = next((t for t in L.atoms if L.leq[t, rest]), None)
        if t is None:
            return None
        parts.append(t)
        rest = L.meet(L.perp(t), rest)
    return parts if L.join_all(parts) == e else None


def lattice_from_description(desc: LatticeDescription) -> Lattice:
    """Validate ``desc`` and return the lattice, or raise :class:`StructuralError`."""
    report = check_oml(desc)
    if report.lattice is None:
        bad = report.failed()[0]
        raise StructuralError(f"not an orthomodular lattice: {bad.name} fails at {bad.witness}", witness=bad.witness)
    return report.lattice


@lru_cache(maxsize=None)
def make_mo(n: int) -> Lattice:
    """The horizontal sum ``MO_n``: 0, 1 and ``n`` complementary atom pairs.

    Results are cached; lattices are immutable, so sharing is safe.
    """
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"MO_n needs n >= 1, got {n!r}")
    names = [chr(ord("a") + i) for i in range(n)] if n <= 26 else [f"e{i + 1}" for i in range(n)]
    labels = ["0"]
    for name in names:
        labels += [name, name + "'"]
    labels.append("1")
    one = len(labels) - 1
    pairs = [(0, x) for x in range(len(labels))] + [(x, one) for x in range(len(labels))]
    ortho = [one] + [x + 1 if x % 2 else x - 1 for x in range(1, one)] + [0]
    L = lattice_from_description(LatticeDescription(tuple(labels), tuple(pairs), tuple(ortho), 0, one))
    L.name = f"mo:{n}"
    return L


def _set_label(mask: int, k: int) -> str:
    return "{" + ",".join(str(j + 1) for j in range(k) if mask >> j & 1) + "}"


@lru_cache(maxsize=None)
def make_boolean(k: int) -> Lattice:
    """Powerset of ``{1..k}`` ordered by inclusion; element index = bitmask."""
    if not isinstance(k, int) or not 1 <= k <= MAX_BOOLEAN_RANK:
        raise ValueError(f"boolean rank must be in 1..{MAX_BOOLEAN_RANK}, got {k!r}")
    m = 1 << k
    full = m - 1
    labels = tuple(_set_label(x, k) for x in range(m))
    # covering pairs suffice; the checker takes the closure
    pairs = tuple((x, x | (1 << j)) for x in range(m) for j in range(k) if not x >> j & 1)
    ortho = tuple(full ^ x for x in range(m))
    L = lattice_from_description(LatticeDescription(labels, pairs, ortho, 0, full))
    L.name = f"boolean:{k}"
    return L


def from_generator(spec: str) -> Lattice:
    """Parse the ``mo:<n>`` / ``boolean:<k>`` shorthand."""
    kind, _, arg = spec.partition(":")
    try:
        value = int(arg)
    except ValueError:
        raise ValueError(f"bad lattice generator {spec!r}; expected mo:<n> or boolean:<k>") from None
    if kind not in ("mo", "boolean"):
        raise ValueError(f"unknown lattice generator {kind!r}")
    return make_mo(value) if kind == "mo" else make_boolean(value)


def is_orthogonal(L: Lattice, a: int, b: int) -> bool:
    """``a`` is orthogonal to ``b`` iff ``a <= b^perp``."""
    return bool(L.leq[a, L.ortho[b]])


def compatible_by_criterion(L: Lattice, a: int, b: int) -> bool:
    return a == L.meet(L.join(a, b), L.join(a, L.perp(b)))


def _criterion_table(L: Lattice) -> np.ndarray:
    idx = np.arange(L.size)
    o = np.asarray(L.ortho)
    j1 = L.join_table  # [a, b] -> a v b
    j2 = L.join_table[:, o]  # [a, b] -> a v b^perp
    return L.meet_table[j1, j2] == idx[:, None]


def compatibility_witness(L: Lattice, a: int, b: int):
    """Search for mutually orthogonal ``(a1, b1, c)`` with ``a = a1 v c``, ``b = b1 v c``."""
    orth = L.orthogonal_table
    for c in L.elements:
        if not (L.leq[c, a] and L.leq[c, b]):
            continue
        a_parts = [x for x in L.elements if orth[x, c] and L.join(x, c) == a]
        b_parts = [y for y in L.elements if orth[y, c] and L.join(y, c) == b]
        for x in a_parts:
            for y in b_parts:
                if orth[x, y]:
                    return x, y, c
    return None


def is_compatible(L: Lattice, a: int, b: int) -> bool:
    """Distributive criterion ``a = (a v b) ^ (a v b^perp)``.

    On lattices with at most ``WITNESS_CROSSCHECK_LIMIT`` elements the whole
    table is checked once against an exhaustive witness search.
    """
    return bool(L.compat_table[a, b])


def atom_decompositions(L: Lattice, e: int) -> list[frozenset[int]]:
    """All sets of mutually orthogonal atoms whose join is ``e``."""
    cache = L._decompositions
    if e in cache:
        return cache[e]
    below = [t for t in L.atoms if L.leq[t, e]]
    orth = L.orthogonal_table
    found: list[frozenset[int]] = []

    def extend(start: int, chosen: list[int], acc: int) -> None:
        if acc == e:
            found.append(frozenset(chosen))
            return
        for pos in range(start, len(below)):
            t = below[pos]
            if all(orth[t, s] for s in chosen):
                chosen.append(t)
                extend(pos + 1, chosen, L.join(acc, t))
                chosen.pop()

    extend(0, [], L.zero)
    found.sort(key=lambda s: sorted(s))
    cache[e] = found
    return found


def labels_of(L: Lattice, items: Sequence[int]) -> tuple[str, ...]:
    return tuple(L.labels[i] for i in items)
