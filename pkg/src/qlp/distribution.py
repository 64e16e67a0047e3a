"""Joint distributions of finite observables under an s_n-map.

``F(r_1..r_n) = p(x_1(-inf, r_1), ..., x_n(-inf, r_n))`` is a step function
that only changes at spectrum points, so every property here is checked
exhaustively on the grid of spectrum points plus one sentinel below the
minimum and one above the maximum of each spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from typing import Iterable, Sequence

from .errors import ModelConstructionError
from .lattice import Lattice
from .observables import BorelSet, Observable, observables_compatible
from .rational import fmt
from .reports import Check, CheckBuilder, Report
from .smap import SMap, derived_state

__all__ = [
    "joint",
    "F",
    "marginal_F",
    "grid",
    "check_F_properties",
    "CommutativityReport",
    "check_commutativity",
    "ClassicalModel",
    "classical_model",
]


def _check_inputs(p: SMap, xs: Sequence[Observable], values: Sequence | None = None) -> None:
    if len(xs) != p.arity:
        raise ValueError(f"s-map has arity {p.arity} but {len(xs)} observables were given")
    if values is not None and len(values) != len(xs):
        raise ValueError(f"expected {len(xs)} arguments, got {len(values)}")
    for x in xs:
        if x.lattice is not p.lattice:
            raise ValueError(f"observable {x.name or x!r} is not on the s-map's lattice")


def joint(p: SMap, xs: Sequence[Observable], Es: Sequence[BorelSet]) -> Fraction:
    _check_inputs(p, xs, Es)
    return p[tuple(x.apply(E) for x, E in zip(xs, Es))]


def _below_tuple(xs: Sequence[Observable], rs: Sequence) -> tuple[int, ...]:
    return tuple(x.below(r) for x, r in zip(xs, rs))


def F(p: SMap, xs: Sequence[Observable], rs: Sequence) -> Fraction:
    """Joint distribution function; half-lines are open at ``r``."""
    _check_inputs(p, xs, rs)
    return p[_below_tuple(xs, rs)]


def marginal_F(p: SMap, xs: Sequence[Observable], rs: Sequence, drop: Iterable[int]) -> Fraction:
    """``F`` with coordinates in ``drop`` (0-based) sent to +inf.

    For a finite observable the limit is reached beyond its largest spectrum
    point, where the half-line image is the unit.  Entries of ``rs`` at
    dropped positions are ignored and may be ``None``.
    """
    _check_inputs(p, xs, rs)
    drop = set(drop)
    bad = [i for i in drop if not 0 <= i < len(xs)]
    if bad:
        raise ValueError(f"coordinate {bad[0]} out of range")
    L = p.lattice
    idx = tuple(L.one if i in drop else x.below(r) for i, (x, r) in enumerate(zip(xs, rs)))
    return p[idx]


def grid(x: Observable) -> tuple[Fraction, ...]:
    """Spectrum points with one sentinel below and one above."""
    s = x.spectrum
    return (s[0] - 1,) + s + (s[-1] + 1,)


def _grid_points(xs: Sequence[Observable]):
    return product(*(grid(x) for x in xs))


def check_F_properties(p: SMap, xs: Sequence[Observable]) -> Report:
    """Bounds, monotonicity, upper limits, lower limits, compatible-pair symmetry."""
    _check_inputs(p, xs)
    L = p.lattice
    n = len(xs)
    grids = [grid(x) for x in xs]
    values = {rs: F(p, xs, rs) for rs in product(*grids)}

    bounds = CheckBuilder("(1) bounds 0 <= F <= 1")
    for rs, v in values.items():
        bounds.record(0 <= v <= 1, [fmt(r) for r in rs], f"F={fmt(v)}")

    mono = CheckBuilder("(2) monotone in each coordinate")
    for rs, v in values.items():
        for i in range(n):
            k = grids[i].index(rs[i])
            if k + 1 < len(grids[i]):
                up = rs[:i] + (grids[i][k + 1],) + rs[i + 1:]
                mono.record(v <= values[up], {"at": [fmt(r) for r in rs], "coordinate": i + 1},
                            f"F={fmt(v)} > {fmt(values[up])}")

    upper = CheckBuilder("(3) upper limits")
    for rs, v in values.items():
        for i in range(n):
            if rs[i] != grids[i][-1]:
                continue
            limit = marginal_F(p, xs, rs, {i})
            upper.record(v == limit, {"at": [fmt(r) for r in rs], "coordinate": i + 1},
                         f"F={fmt(v)} but unit substitution gives {fmt(limit)}")
        if all(rs[i] == grids[i][-1] for i in range(n)):
            upper.record(v == 1, [fmt(r) for r in rs], f"F={fmt(v)} at the top corner")

    lower = CheckBuilder("(4) lower limits")
    for rs, v in values.items():
        if any(rs[i] == grids[i][0] for i in range(n)):
            lower.record(v == 0, [fmt(r) for r in rs], f"F={fmt(v)}")

    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if observables_compatible(xs[i], xs[j])]
    if pairs:
        sym = CheckBuilder("(5) compatible pair gives full symmetry")
        for rs, v in values.items():
            base = _below_tuple(xs, rs)
            for perm in permutations(range(n)):
                w = p[tuple(base[k] for k in perm)]
                sym.record(v == w, {"at": [fmt(r) for r in rs], "permutation": [k + 1 for k in perm]},
                           f"{fmt(v)} vs {fmt(w)}")
        sym_check = sym.build()
        sym_check.detail = sym_check.detail or f"compatible pairs {[(i + 1, j + 1) for i, j in pairs]}"
    else:
        sym_check = Check("(5) compatible pair gives full symmetry", True, skipped=True,
                          detail="vacuous: no compatible pair of observables")
    return Report(f"distribution function properties on {L.name or 'lattice'}",
                  [bounds.build(), mono.build(), upper.build(), lower.build(), sym_check])


@dataclass
class CommutativityReport:
    commutative: bool
    violations: list[dict]
    checked: int

    def to_dict(self) -> dict:
        return {
            "commutative": self.commutative,
            "checked": self.checked,
            "violations": self.violations,
        }

    def to_text(self) -> str:
        head = "commutative" if self.commutative else "non-commutative"
        lines = [f"{head} ({self.checked} tuple/permutation pairs checked, {len(self.violations)} violations)"]
        for v in self.violations:
            lines.append(
                f"  p({','.join(v['tuple'])}) = {v['value']}  vs  p({','.join(v['permuted'])}) = {v['permuted_value']}"
                f"  [permutation {v['permutation']}]"
            )
        return "\n".join(lines)


def check_commutativity(p: SMap, xs: Sequence[Observable]) -> CommutativityReport:
    """Invariance of ``p`` on range tuples under every permutation.

    A permutation acts on observables and arguments together, so the test is
    ``p(e_1..e_n) == p(e_pi(1)..e_pi(n))`` for ``e_i`` in the range of ``x_i``.
    Violations are listed with tuples in lexicographic label order.
    """
    _check_inputs(p, xs)
    L = p.lattice
    n = len(xs)
    ranges = [sorted(x.range(), key=L.label) for x in xs]
    violations = []
    checked = 0
    for t in product(*ranges):
        v = p[t]
        for perm in permutations(range(n)):
            if perm == tuple(range(n)):
                continue
            checked += 1
            s = tuple(t[k] for k in perm)
            w = p[s]
            if v != w:
                violations.append({
                    "tuple": list(p.labels(t)),
                    "permutation": [k + 1 for k in perm],
                    "permuted": list(p.labels(s)),
                    "value": fmt(v),
                    "permuted_value": fmt(w),
                })
    violations.sort(key=lambda d: (d["tuple"], d["permutation"]))
    return CommutativityReport(not violations, violations, checked)


@dataclass
class ClassicalModel:
    """Point masses on the product of spectra; coordinate ``i`` is ``xi_i``."""

    omega: tuple[tuple[Fraction, ...], ...]
    masses: dict[tuple[Fraction, ...], Fraction]
    report: Report

    def P(self, event: Iterable[tuple]) -> Fraction:
        return sum((self.masses[w] for w in set(map(tuple, event))), Fraction(0))

    def F(self, rs: Sequence) -> Fraction:
        return self.P(w for w in self.omega if all(t < r for t, r in zip(w, rs)))

    def coordinate_below(self, i: int, r) -> Fraction:
        """``P(xi_i < r)``."""
        return self.P(w for w in self.omega if w[i] < r)

    def to_dict(self) -> dict:
        return {
            "omega_size": len(self.omega),
            "masses": [{"omega": [fmt(t) for t in w], "P": fmt(self.masses[w])} for w in self.omega],
            "P(omega)": fmt(sum(self.masses.values(), Fraction(0))),
            "checks": self.report.to_dict(),
        }


def classical_model(p: SMap, xs: Sequence[Observable]) -> ClassicalModel:
    """Build the product-of-spectra model and verify it reproduces ``F``.

    Raises :class:`ModelConstructionError` naming the failing identity when a
    mass is negative or the masses do not sum to one.
    """
    _check_inputs(p, xs)
    L = p.lattice
    omega = tuple(product(*(x.spectrum for x in xs)))
    masses = {w: p[tuple(x.at(t) for x, t in zip(xs, w))] for w in omega}
    neg = [w for w in omega if masses[w] < 0]
    if neg:
        raise ModelConstructionError(f"nonnegativity: mass at {[fmt(t) for t in neg[0]]} is {fmt(masses[neg[0]])}")
    total = sum(masses.values(), Fraction(0))
    if total != 1:
        raise ModelConstructionError(f"P(omega)=1: masses sum to {fmt(total)}")
    checks = [Check("P(omega) = 1", True, checked=1, detail=fmt(total))]
    checks.append(Check("P(empty) = 0", True, checked=1))

    model = ClassicalModel(omega, masses, Report("classical model", []))
    nu = derived_state(p)
    coord = CheckBuilder("coordinate laws P(xi_i < r) = nu(x_i(-inf, r))")
    for i, x in enumerate(xs):
        for r in grid(x):
            lhs, rhs = model.coordinate_below(i, r), nu(x.below(r))
            coord.record(lhs == rhs, {"coordinate": i + 1, "r": fmt(r)}, f"{fmt(lhs)} vs {fmt(rhs)}")
    checks.append(coord.build())

    same = CheckBuilder("F_xi = F_x on the grid")
    for rs in _grid_points(xs):
        lhs, rhs = model.F(rs), F(p, xs, rs)
        same.record(lhs == rhs, [fmt(r) for r in rs], f"{fmt(lhs)} vs {fmt(rhs)}")
    checks.append(same.build())
    model.report = Report("classical model", checks)
    return model
