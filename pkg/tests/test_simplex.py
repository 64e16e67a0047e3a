from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from hypothesis import given, settings, strategies as st

from qlp.simplex import Row, certificate_holds, solve


def _satisfies(rows, x):
    for r in rows:
        lhs = sum((Fraction(v) * x[j] for j, v in r.coeffs.items()), Fraction(0))
        if r.rel == "=" and lhs != r.rhs or r.rel == "<=" and lhs > r.rhs or r.rel == ">=" and lhs < r.rhs:
            return False
    return all(v >= 0 for v in x)


def _vertices_2d(rows):
    """Brute-force candidate vertices of a 2-variable system (with x, y >= 0)."""
    lines = [(r.coeffs.get(0, 0), r.coeffs.get(1, 0), r.rhs) for r in rows] + [(1, 0, 0), (0, 1, 0)]
    pts = []
    for (a1, b1, c1), (a2, b2, c2) in combinations(lines, 2):
        det = Fraction(a1) * b2 - Fraction(a2) * b1
        if det == 0:
            continue
        x = (Fraction(c1) * b2 - Fraction(c2) * b1) / det
        y = (Fraction(a1) * c2 - Fraction(a2) * c1) / det
        if _satisfies(rows, [x, y]):
            pts.append((x, y))
    return pts


def test_small_optimum():
    rows = [Row({0: 1, 1: 2}, "<=", Fraction(4)), Row({0: 3, 1: 1}, "<=", Fraction(6))]
    res = solve(2, rows, {0: 1, 1: 1})
    assert res.status == "optimal"
    assert res.x == [Fraction(8, 5), Fraction(6, 5)]
    assert res.value == Fraction(14, 5)


def test_infeasible_with_certificate():
    rows = [Row({0: 1, 1: 1}, "=", Fraction(1)), Row({0: 1, 1: 1}, ">=", Fraction(2))]
    res = solve(2, rows)
    assert not res.feasible
    assert certificate_holds(rows, res.farkas)


def test_negative_rhs_infeasible():
    rows = [Row({0: 1}, "=", Fraction(-1))]
    res = solve(1, rows)
    assert not res.feasible and certificate_holds(rows, res.farkas)


def test_redundant_equalities():
    rows = [Row({0: 1, 1: 1}, "=", Fraction(1)), Row({0: 2, 1: 2}, "=", Fraction(2)), Row({0: 1}, "<=", Fraction(1, 3))]
    res = solve(2, rows, {1: -1})
    assert res.x == [Fraction(1, 3), Fraction(2, 3)]
    assert res.value == Fraction(-2, 3)


def test_unbounded():
    res = solve(1, [Row({0: 1}, ">=", Fraction(1))], {0: 1})
    assert res.status == "unbounded"


def test_bogus_certificate_rejected():
    rows = [Row({0: 1}, "<=", Fraction(1))]
    assert not certificate_holds(rows, {0: Fraction(-1)})
    assert not certificate_holds(rows, {})


coef = st.integers(-4, 4)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(coef, coef, st.sampled_from(["<=", ">=", "="]), st.integers(-3, 6)), min_size=1, max_size=4),
       coef, coef)
def test_random_2d_against_vertex_enumeration(spec, c0, c1):
    rows = [Row({0: a, 1: b}, rel, Fraction(r)) for a, b, rel, r in spec]
    res = solve(2, rows, {0: c0, 1: c1})
    verts = _vertices_2d(rows)
    if not res.feasible:
        assert certificate_holds(rows, res.farkas)
        assert not verts
        return
    assert verts
    if res.status == "optimal":
        assert _satisfies(rows, res.x)
        assert res.value == max(c0 * x + c1 * y for x, y in verts)
