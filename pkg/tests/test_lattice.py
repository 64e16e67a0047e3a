from __future__ import annotations

import dataclasses

import pytest
from hypothesis import given, strategies as st

from qlp.errors import StructuralError
from qlp.jsonio import description_from_dict, lattice_to_dict, load_lattice
from qlp.lattice import (
    LatticeDescription,
    atom_decompositions,
    check_oml,
    compatibility_witness,
    compatible_by_criterion,
    from_generator,
    is_compatible,
    is_orthogonal,
    lattice_from_description,
    make_boolean,
    make_mo,
)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_mo_is_oml(n):
    L = make_mo(n)
    rep = check_oml(L.describe())
    assert rep.ok, rep.to_text()
    assert L.size == 2 * n + 2
    assert len(L.atoms) == 2 * n


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_boolean_is_oml(k):
    L = make_boolean(k)
    assert check_oml(L.describe()).ok
    assert L.size == 2**k


def test_boolean_ten_builds():
    L = make_boolean(10)
    assert L.size == 1024 and len(L.atoms) == 10


@given(st.integers(0, 15), st.integers(0, 15))
def test_boolean_meet_join_are_set_operations(x, y):
    L = make_boolean(4)
    assert L.meet(x, y) == x & y
    assert L.join(x, y) == x | y
    assert L.perp(x) == 15 ^ x
    assert is_orthogonal(L, x, y) == (x & y == 0)


def _mo_compatible_oracle(L, a, b):
    # in MO_n two elements commute iff one is a bound, they are equal, or complementary
    special = {L.zero, L.one}
    return a in special or b in special or a == b or L.perp(a) == b


@pytest.mark.parametrize("n", [2, 3, 4])
def test_mo_compatibility_matches_oracle(n):
    L = make_mo(n)
    for a in L.elements:
        for b in L.elements:
            want = _mo_compatible_oracle(L, a, b)
            assert is_compatible(L, a, b) == want
            assert compatible_by_criterion(L, a, b) == want
            assert (compatibility_witness(L, a, b) is not None) == want


def test_compatibility_witness_decomposes(mo3):
    a, ap = mo3.index("a"), mo3.index("a'")
    a1, b1, c = compatibility_witness(mo3, a, ap)
    assert mo3.join(a1, c) == a and mo3.join(b1, c) == ap


def test_boolean_everything_compatible():
    L = make_boolean(3)
    assert L.compat_table.all()


def test_atom_decompositions_of_top(mo3):
    decs = atom_decompositions(mo3, mo3.one)
    shown = sorted(sorted(mo3.label(t) for t in d) for d in decs)
    assert shown == [["a", "a'"], ["b", "b'"], ["c", "c'"]]
    assert atom_decompositions(mo3, mo3.index("b")) == [frozenset({mo3.index("b")})]


def test_self_complement_fails_complement_law(mo3):
    d = mo3.describe()
    a = mo3.index("a")
    ortho = list(d.ortho)
    ortho[a] = a
    rep = check_oml(dataclasses.replace(d, ortho=tuple(ortho)))
    assert not rep.ok
    assert not rep["(iii) a v a^perp = 1"].passed
    assert rep["(iii) a v a^perp = 1"].witness == "a"


def test_swapping_pairs_is_just_a_relabelling(mo3):
    # sending a to b (and back) still satisfies every axiom in MO3
    d = mo3.describe()
    ix = mo3.index
    ortho = list(d.ortho)
    ortho[ix("a")], ortho[ix("b")] = ix("b"), ix("a")
    ortho[ix("a'")], ortho[ix("b'")] = ix("b'"), ix("a'")
    assert check_oml(dataclasses.replace(d, ortho=tuple(ortho))).ok


def test_broken_fixture_fails_involution():
    import json
    from importlib import resources

    doc = json.loads(resources.files("qlp.data").joinpath("broken.json").read_text())
    rep = check_oml(description_from_dict(doc))
    assert not rep["(ii) involution"].passed
    assert rep["(ii) involution"].witness == "a"


def test_missing_join_is_structural():
    # 0 < x, y < u, v < 1: x and y have two minimal upper bounds
    labels = ("0", "x", "y", "u", "v", "1")
    leq = ((0, 1), (0, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 5), (4, 5))
    desc = LatticeDescription(labels, leq, (5, 2, 1, 4, 3, 0), 0, 5)
    with pytest.raises(StructuralError, match="least upper bound"):
        check_oml(desc)


def test_cycle_is_structural():
    desc = LatticeDescription(("0", "x", "1"), ((0, 1), (1, 0), (1, 2)), (2, 1, 0), 0, 2)
    with pytest.raises(StructuralError, match="antisymmetric"):
        check_oml(desc)


def test_hasse_input_is_closed():
    # only covering pairs given; transitivity supplied by the checker
    desc = LatticeDescription(("0", "p", "q", "1"), ((0, 1), (0, 2), (1, 3), (2, 3)), (3, 2, 1, 0), 0, 3)
    L = lattice_from_description(desc)
    assert L.le(0, 3)


def test_non_orthomodular_benzene_fails():
    # hexagon O6: 0 < x < y' < 1 and 0 < y < x' < 1; ortholattice but not orthomodular
    labels = ("0", "x", "y", "x'", "y'", "1")
    leq = ((0, 1), (0, 2), (1, 4), (2, 3), (3, 5), (4, 5))
    desc = LatticeDescription(labels, leq, (5, 3, 4, 1, 2, 0), 0, 5)
    rep = check_oml(desc)
    assert rep["(iii) a v a^perp = 1"].passed and rep["(iv) order reversal"].passed
    assert not rep["(v) orthomodular law"].passed


def test_generators_and_json_roundtrip():
    for spec in ("mo:2", "boolean:3"):
        L = from_generator(spec)
        again = load_lattice(lattice_to_dict(L))
        assert again.labels == L.labels
        assert (again.leq == L.leq).all()
    with pytest.raises(ValueError):
        from_generator("torus:3")


def test_unknown_label(mo3):
    with pytest.raises(StructuralError):
        mo3.index("z")
