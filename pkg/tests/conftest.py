from __future__ import annotations

import pytest

from qlp.example31 import load
from qlp.lattice import make_boolean, make_mo
from qlp.smap import complete


@pytest.fixture(scope="session")
def mo3():
    return make_mo(3)


@pytest.fixture(scope="session")
def b2():
    return make_boolean(2)


@pytest.fixture(scope="session")
def ex31():
    """(lattice, partial listing, observables, completed map)."""
    L, q, obs = load()
    return L, q, obs, complete(q)


@pytest.fixture(scope="session")
def ex31_xs(ex31):
    obs = ex31[2]
    return [obs["x1"], obs["x2"], obs["x3"]]
