"""Acceptance criteria, one printed PASS/FAIL line each.

Run under pytest (lines appear in the -v log) or directly:
``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import random
import sys
import time
from fractions import Fraction
from itertools import product
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import boolean_meet_map, random_constraints  # noqa: E402
from qlp.distribution import F, check_commutativity, check_F_properties, classical_model, grid, marginal_F  # noqa: E402
from qlp.example31 import load, verify  # noqa: E402
from qlp.lattice import make_boolean, make_mo  # noqa: E402
from qlp.observables import Observable, compose  # noqa: E402
from qlp.rational import fmt  # noqa: E402
from qlp.smap import (  # noqa: E402
    PartialSMap,
    check_propositions,
    compatible_class_uncollapsed,
    complete,
    derived_state,
    validate,
)
from qlp.synth import (  # noqa: E402
    ConstraintSet,
    find_marginal_violation,
    find_noncommutative,
    synthesize,
    verify_certificate,
)

RESULTS: dict[str, tuple[bool, str]] = {}


def announce(key: str, ok: bool, detail: str) -> None:
    RESULTS[key] = (ok, detail)
    line = f"CRITERION {key}: {'PASS' if ok else 'FAIL'} - {detail}"
    capman = _capture_manager()
    if capman is not None:
        with capman.global_and_fixture_disabled():
            print("\n" + line, flush=True)
    else:
        print(line, flush=True)


_CONFIG = None


def _capture_manager():
    if _CONFIG is None:
        return None
    return _CONFIG.pluginmanager.getplugin("capturemanager")


@pytest.fixture(autouse=True, scope="module")
def _grab_config(pytestconfig):
    global _CONFIG
    _CONFIG = pytestconfig
    yield
    _CONFIG = None


def _example():
    L, q, obs = load()
    return L, q, obs, complete(q)


# 1


def test_criterion_1_example_reproduction():
    res = verify()
    L, q, obs, p = _example()
    x1, x2, x3 = obs["x1"], obs["x2"], obs["x3"]
    got_F = (F(p, [x1, x2, x3], [1, 1, 1]), F(p, [x2, x1, x3], [1, 1, 1]), F(p, [x3, x2, x1], [1, 1, 1]))
    nu = derived_state(p)
    got_nu = tuple(nu.by_label(k) for k in "abc")
    ok = (
        res.ok
        and got_F == (Fraction(3, 10), Fraction(1, 5), Fraction(29, 100))
        and got_nu == (Fraction(3, 10), Fraction(2, 5), Fraction(1, 2))
    )
    announce("1", ok, f"verify exit {'0' if res.ok else '1'}; F = {', '.join(map(fmt, got_F))}; "
                      f"nu(a,b,c) = {', '.join(map(fmt, got_nu))}")
    assert ok


# 2


def test_criterion_2_completion_consistency():
    L, q, obs, p = _example()
    v, props = validate(p), check_propositions(p)
    violations = sum(c.failures for c in props.checks)
    raw = verify(raw=True)
    chain_ok = raw.inconsistency is not None and bool(raw.inconsistency.report.first_chain) and bool(
        raw.inconsistency.report.second_chain)
    ok = p.table.size == 512 and v.ok and props.ok and violations == 0 and chain_ok and not raw.ok
    where = raw.inconsistency.report.summary() if raw.inconsistency else "raw listing accepted"
    announce("2", ok, f"512-cell table, validate {'ok' if v.ok else 'FAILED'}, {violations} proposition violations; "
                      f"raw listing: {where}")
    assert ok


# 3


def test_criterion_3_classical_representation():
    L, q, obs, p = _example()
    xs = [obs["x1"], obs["x2"], obs["x3"]]
    m = classical_model(p, xs)
    nu = derived_state(p)
    total = m.P(m.omega)
    coord_ok = all(
        m.coordinate_below(i, r) == nu(x.below(r)) for i, x in enumerate(xs) for r in grid(x)
    )
    pts = list(product(*(grid(x) for x in xs)))
    grid_ok = all(m.F(rs) == F(p, xs, rs) for rs in pts)
    ok = total == 1 and coord_ok and grid_ok and m.report.ok
    announce("3", ok, f"P(Omega) = {fmt(total)}; coordinate laws {'hold' if coord_ok else 'FAIL'}; "
                      f"F_xi = F_x on {len(pts)} grid points {'exactly' if grid_ok else 'FAILS'}")
    assert ok


# 4


def test_criterion_4_marginal_symmetry():
    L, q, obs, p = _example()
    x1, x2, x3 = obs["x1"], obs["x2"], obs["x3"]
    pts = list(product(grid(x2), grid(x3)))
    sym = all(
        marginal_F(p, [x1, x2, x3], [None, r2, r3], {0}) == marginal_F(p, [x1, x3, x2], [None, r3, r2], {0})
        for r2, r3 in pts
    )
    comm = check_commutativity(p, [x1, x2, x3])
    hit = [v for v in comm.violations if v["tuple"] == ["a'", "b'", "c'"]]
    ok = sym and not comm.commutative and bool(hit)
    announce("4", ok, f"marginal over x1 symmetric on {len(pts)} grid points: {sym}; full F "
                      f"{'non-commutative' if not comm.commutative else 'commutative'}, witness "
                      f"p(a',b',c') = {hit[0]['value'] if hit else '?'} vs p({','.join(hit[0]['permuted']) if hit else '?'})"
                      f" = {hit[0]['permuted_value'] if hit else '?'}")
    assert ok


# 5


def test_criterion_5_boolean_oracle():
    rng = random.Random(20240501)
    mismatches = 0
    runs = 0
    for k in (2, 3):
        L = make_boolean(k)
        for _ in range(50):
            w = [Fraction(rng.randint(0, 20)) for _ in range(k)]
            if sum(w) == 0:
                w[0] = Fraction(1)
            w = [x / sum(w) for x in w]
            for n in (2, 3):
                oracle = boolean_meet_map(L, w, n)
                diag = {(a,) * n: oracle[(a,) * n] for a in L.elements}
                p = complete(PartialSMap(L, n, diag))
                runs += 1
                if p != oracle or not validate(p).ok:
                    mismatches += 1
    none_found = all(find_noncommutative(make_boolean(k), n) is None for k in (1, 2, 3) for n in (2, 3))
    ok = mismatches == 0 and none_found
    announce("5", ok, f"100 states x arities 2,3 ({runs} completions): {mismatches} mismatches against "
                      f"mu(meet); find_noncommutative on Boolean lattices: {'none' if none_found else 'FOUND'}")
    assert ok


# 6


def test_criterion_6_synthesis_soundness():
    L = make_mo(3)
    rng = random.Random(6)
    feasible = infeasible = bad = 0
    for i in range(50):
        n = 2 if i % 2 == 0 else 3
        res = synthesize(L, n, random_constraints(L, n, rng))
        if res.feasible:
            feasible += 1
            if not validate(res.witness).ok:
                bad += 1
        else:
            infeasible += 1
            if not (res.multipliers and verify_certificate(res)):
                bad += 1
    contra = synthesize(L, 2, ConstraintSet().fix(("a", "a"), "3/10").fix(("a", "1"), "1/5"))
    contra_ok = not contra.feasible and verify_certificate(contra)
    ok = bad == 0 and contra_ok
    announce("6", ok, f"50 random sets: {feasible} feasible (all validate), {infeasible} infeasible "
                      f"(certificates re-verified), {bad} unsound; {{p(a,a)=3/10, p(a,1)=1/5}} "
                      f"{'certified infeasible' if contra_ok else 'NOT certified'}")
    assert ok


# 7


def test_criterion_7_non_marginality():
    L = make_mo(3)
    v = find_marginal_violation(L, 2)
    ok = (
        v is not None
        and v.gap > 0
        and derived_state(v.lower) == derived_state(v.upper)
        and v.lower[v.tuple] != v.upper[v.tuple + ("1",)]
    )
    detail = "no pair found" if v is None else (
        f"p_2({','.join(v.tuple)}) = {fmt(v.lower[v.tuple])} vs p_3({','.join(v.tuple)},1) = "
        f"{fmt(v.upper[v.tuple + ('1',)])}, equal diagonal states, gap {fmt(v.gap)}")
    announce("7", ok, detail)
    assert ok


# 8


def _lp_maps():
    rng = random.Random(8)
    maps = []
    for i in range(20):
        L = make_mo(2) if i < 10 else make_mo(3)
        n = 2 if i % 2 == 0 else 3
        labels = [x for x in L.labels if x not in ("0",)]
        objective = {tuple(rng.choice(labels) for _ in range(n)): rng.randint(-3, 3) for _ in range(4)}
        res = synthesize(L, n, objective=objective)
        assert res.feasible
        maps.append(res.witness)
    return maps


_MAPS: list = []


def _all_maps():
    if not _MAPS:
        _MAPS.append(("example", _example()[3]))
        _MAPS.extend((f"lp{i}", p) for i, p in enumerate(_lp_maps()))
    return _MAPS


def _systems(p):
    """Observable systems for the distribution properties: one built from
    distinct complementary pairs, one containing a compatible pair."""
    L = p.lattice
    heads = [a for a in L.atoms if L.label(a).endswith("'") is False]
    xs = [Observable(L, {-1: L.perp(heads[i % len(heads)]), 1: heads[i % len(heads)]}) for i in range(p.arity)]
    systems = [xs]
    if p.arity >= 2:
        ys = list(xs)
        ys[1] = compose({-1: 0, 1: 3}, xs[0])
        systems.append(ys)
    return systems


PROP_ITEMS = {
    "orthogonal pair anywhere gives 0": "orthogonal-zero",
    "diagonal is a state": "diagonal-state",
    "p bounded by diagonal": "diagonal-bound",
    "compatible pair collapses to meet": "compatible-meet-collapse",
    "unit replacement": "unit-replacement",
    "repeated entry gives symmetry": "repeat-symmetry",
    "compatible pair gives symmetry": "compatible-symmetry",
    "unit class": "unit-class",
    "repeat class": "repeat-class",
    "compatible class after meet collapse": "compatible-class",
}
F_ITEMS = {
    "F bounds": "(1) bounds 0 <= F <= 1",
    "F monotone": "(2) monotone in each coordinate",
    "F upper limits": "(3) upper limits",
    "F lower limits": "(4) lower limits",
    "F compatible pair symmetry": "(5) compatible pair gives full symmetry",
}
ITEM_RESULTS: dict[str, tuple[int, int, object]] = {}


_PROPS_CACHE: dict[str, object] = {}


def _props(name, p):
    if name not in _PROPS_CACHE:
        _PROPS_CACHE[name] = check_propositions(p)
    return _PROPS_CACHE[name]


@pytest.mark.parametrize("item", list(PROP_ITEMS))
def test_criterion_8_item_smap(item):
    check_name = PROP_ITEMS[item]
    failures, checked, witness = 0, 0, None
    for name, p in _all_maps():
        c = _props(name, p)[check_name]
        checked += c.checked
        failures += c.failures
        if c.failures and witness is None:
            witness = (name, c.witness, c.detail)
    ITEM_RESULTS[item] = (failures, checked, witness)
    assert failures == 0, f"{item}: {witness}"


def test_criterion_8_item_compatible_class_literal():
    """The compatible-pair class taken literally (no meet collapse first)."""
    item = "compatible class as stated, no collapse"
    failures, checked, witness = 0, 0, None
    for name, p in _all_maps():
        c = compatible_class_uncollapsed(p)
        checked += c.checked
        failures += c.failures
        if c.failures and witness is None:
            witness = (name, c.witness, c.detail)
    ITEM_RESULTS[item] = (failures, checked, witness)
    assert failures == 0, f"{item}: {failures} violations, first {witness}"


@pytest.mark.parametrize("item", list(F_ITEMS))
def test_criterion_8_item_distribution(item):
    check_name = F_ITEMS[item]
    failures, checked, witness = 0, 0, None
    for name, p in _all_maps():
        for xs in _systems(p):
            c = check_F_properties(p, xs)[check_name]
            if c.skipped:
                continue
            checked += c.checked
            failures += c.failures
            if c.failures and witness is None:
                witness = (name, c.witness, c.detail)
    ITEM_RESULTS[item] = (failures, checked, witness)
    assert checked > 0
    assert failures == 0, f"{item}: {witness}"


def test_criterion_8_summary():
    expected = list(PROP_ITEMS) + ["compatible class as stated, no collapse"] + list(F_ITEMS)
    missing = [k for k in expected if k not in ITEM_RESULTS]
    failed = {k: v for k, v in ITEM_RESULTS.items() if v[0]}
    ok = not missing and not failed
    parts = [f"{len(expected) - len(failed) - len(missing)}/{len(expected)} items with 0 violations over "
             f"the example table + 20 LP maps"]
    for k, (f, c, w) in failed.items():
        parts.append(f"{k}: {f}/{c} violations, first {w}")
    if missing:
        parts.append(f"not run: {missing}")
    announce("8", ok, "; ".join(parts))
    assert ok


if __name__ == "__main__":
    start = time.time()
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]) or 0)
