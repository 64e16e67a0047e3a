from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qlp.jsonio import dumps, observable_from_dict, observable_to_dict, smap_from_dict, smap_to_dict
from qlp.rational import fmt, fmt_both, fmt_decimal, to_fraction


def test_decimal_literals_exact():
    assert to_fraction("0.19") == Fraction(19, 100)
    assert to_fraction("3/10") == Fraction(3, 10)
    assert to_fraction(2) == 2


@pytest.mark.parametrize("bad", [0.3, True, "", "abc", None])
def test_rejects(bad):
    with pytest.raises((TypeError, ValueError)):
        to_fraction(bad)


def test_formatting():
    assert fmt(Fraction(3, 10)) == "3/10" and fmt(Fraction(1)) == "1"
    assert fmt_decimal(Fraction(29, 100)) == "0.29"
    assert fmt_decimal(Fraction(1, 3)) is None
    assert fmt_both(Fraction(3, 10)) == "3/10 (0.3)"
    assert fmt_both(Fraction(1, 3)) == "1/3"
    assert fmt_decimal(Fraction(-1, 8)) == "-0.125"


@given(st.fractions())
def test_fmt_roundtrip(q):
    assert to_fraction(fmt(q)) == q
    dec = fmt_decimal(q)
    if dec is not None:
        assert to_fraction(dec) == q


def test_smap_roundtrip(ex31):
    p = ex31[3]
    doc = smap_to_dict(p)
    assert doc["lattice"] == "mo:3"
    assert smap_from_dict(doc, p.lattice) == p
    assert dumps(doc) == dumps(smap_to_dict(smap_from_dict(doc, p.lattice)))


def test_observable_roundtrip(ex31):
    x = ex31[2]["x1"]
    assert observable_from_dict(x.lattice, observable_to_dict(x)) == x
