from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qlp.errors import StructuralError
from qlp.lattice import make_boolean
from qlp.observables import (
    BorelSet,
    Interval,
    Observable,
    State,
    check_state,
    compose,
    observables_compatible,
)


def _mo3_state(L, a="3/10", b="2/5", c="1/2"):
    vals = {"0": 0, "1": 1}
    for name, v in (("a", a), ("b", b), ("c", c)):
        v = Fraction(v)
        vals[name], vals[name + "'"] = v, 1 - v
    return State.from_mapping(L, vals)


def test_state_passes(mo3):
    assert check_state(mo3, _mo3_state(mo3)).ok


def test_state_not_additive(mo3):
    s = dict(_mo3_state(mo3).as_dict())
    s["a'"] = Fraction(1, 2)
    rep = check_state(mo3, s)
    assert not rep["(ii) orthogonal additivity"].passed
    assert rep["(ii) orthogonal additivity"].witness == ("a", "a'")


def test_state_not_normalized(mo3):
    s = dict(_mo3_state(mo3).as_dict())
    s["1"] = Fraction(9, 10)
    assert not check_state(mo3, s)["(i) normalization"].passed


def test_state_missing_value(mo3):
    with pytest.raises(StructuralError):
        State.from_mapping(mo3, {"0": 0, "1": 1})


@given(st.lists(st.fractions(0, 1, max_denominator=20), min_size=3, max_size=3))
def test_measure_on_boolean_is_state(weights):
    total = sum(weights)
    if total == 0:
        return
    w = [x / total for x in weights]
    L = make_boolean(3)
    s = State(L, tuple(sum((w[i] for i in range(3) if m >> i & 1), Fraction(0)) for m in L.elements))
    assert check_state(L, s).ok


def test_borel_merges_and_half_lines():
    E = BorelSet([Interval(0, 1, True, False), Interval(1, 2, True, True), Interval(5, 6)])
    assert len(E.intervals) == 2
    assert 1 in E and 2 in E and 6 not in E and Fraction(11, 2) in E
    H = BorelSet.below(1)
    assert 1 not in H and Fraction(999, 1000) in H
    assert BorelSet.point(3) | BorelSet.point(3) == BorelSet.point(3)


@pytest.fixture
def x1(mo3):
    return Observable(mo3, {-1: "a'", 1: "a"}, name="x1")


def test_observable_images(mo3, x1):
    assert x1.apply(BorelSet.point(1)) == mo3.index("a")
    assert x1.apply(BorelSet.reals()) == mo3.one
    assert x1.apply(BorelSet.empty()) == mo3.zero
    assert x1.below(1) == mo3.index("a'")
    assert x1.below(-1) == mo3.zero
    assert x1.below(2) == mo3.one
    assert x1.spectrum == (-1, 1)
    assert {mo3.label(e) for e in x1.range()} == {"0", "a", "a'", "1"}


def test_observable_homomorphism(mo3, x1):
    E, G = BorelSet.below(0), BorelSet.point(1)
    assert x1.apply(E | G) == mo3.join(x1.apply(E), x1.apply(G))


@pytest.mark.parametrize(
    "assign",
    [{-1: "a", 1: "b"}, {0: "a"}, {0: "0", 1: "1"}],
)
def test_observable_rejects_bad_partitions(mo3, assign):
    with pytest.raises(ValueError):
        Observable(mo3, assign)


def test_compose_merges_points(mo3, x1):
    y = compose(lambda t: t * t, x1)
    assert y.spectrum == (1,)
    assert y.at(1) == mo3.one
    same = compose({-1: -1, 1: 1}, x1)
    assert same == x1
    with pytest.raises(ValueError):
        compose({1: 1}, x1)


def test_compatibility_of_observables(mo3, x1):
    x2 = Observable(mo3, {-1: "b'", 1: "b"})
    assert not observables_compatible(x1, x2)
    assert observables_compatible(x1, compose({-1: 0, 1: 5}, x1))
