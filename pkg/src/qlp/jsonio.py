"""JSON documents for lattices, states, observables, s-maps and constraints.

Rationals are written as ``"p/q"`` strings; decimal strings are accepted on
input and parsed exactly.  Output is deterministic: entries are sorted by
their label tuples and object keys are sorted.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .errors import StructuralError
from .lattice import Lattice, LatticeDescription, from_generator, lattice_from_description
from .observables import Observable, State
from .rational import fmt, to_fraction
from .smap import PartialSMap, SMap

__all__ = [
    "dumps",
    "read_json",
    "lattice_to_dict",
    "description_from_dict",
    "load_lattice",
    "state_to_dict",
    "state_from_dict",
    "observable_to_dict",
    "observable_from_dict",
    "observables_from_dict",
    "smap_to_dict",
    "smap_from_dict",
    "partial_from_dict",
]


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def read_json(path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise StructuralError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise StructuralError(f"{path} is not valid JSON: {exc}") from exc


def lattice_to_dict(L: Lattice) -> dict:
    d = L.describe()
    return {
        "elements": list(d.labels),
        "leq": [list(p) for p in d.leq_pairs],
        "ortho": list(d.ortho),
        "zero": d.zero,
        "one": d.one,
    }


def description_from_dict(doc: dict) -> LatticeDescription:
    try:
        labels = tuple(str(x) for x in doc["elements"])
        pairs = tuple((int(i), int(j)) for i, j in doc["leq"])
        ortho = tuple(int(x) for x in doc["ortho"])
        zero, one = int(doc["zero"]), int(doc["one"])
    except (KeyError, TypeError, ValueError) as exc:
        raise StructuralError(f"malformed lattice document: {exc!r}") from exc
    return LatticeDescription(labels, pairs, ortho, zero, one)


def load_lattice(source) -> Lattice:
    """Accept a ``mo:<n>``/``boolean:<k>`` string, a lattice document, or a path."""
    if isinstance(source, Lattice):
        return source
    if isinstance(source, dict):
        return lattice_from_description(description_from_dict(source))
    text = str(source)
    if text.startswith(("mo:", "boolean:")):
        return from_generator(text)
    return load_lattice(read_json(text))


def _lattice_ref(L: Lattice):
    return L.name if L.name else lattice_to_dict(L)


def state_to_dict(s: State) -> dict:
    return {s.lattice.label(i): fmt(v) for i, v in enumerate(s.values)}


def state_from_dict(L: Lattice, doc: dict) -> State:
    return State.from_mapping(L, doc)


def observable_to_dict(x: Observable) -> dict:
    return {
        "spectrum": [fmt(t) for t in x.spectrum],
        "assign": {fmt(t): x.lattice.label(e) for t, e in zip(x.spectrum, x.assign)},
    }


def observable_from_dict(L: Lattice, doc: dict, name: str | None = None) -> Observable:
    try:
        assign = {to_fraction(k): v for k, v in doc["assign"].items()}
    except (KeyError, AttributeError) as exc:
        raise StructuralError(f"malformed observable document: {exc!r}") from exc
    if "spectrum" in doc:
        listed = sorted(to_fraction(t) for t in doc["spectrum"])
        if listed != sorted(assign):
            raise StructuralError("spectrum does not match the assigned points")
    try:
        return Observable(L, assign, name=name)
    except ValueError as exc:
        raise StructuralError(str(exc)) from exc


def observables_from_dict(doc: dict, L: Lattice | None = None) -> tuple[Lattice, dict[str, Observable]]:
    """``{"lattice": ..., "observables": {name: observable-doc}}``."""
    if L is None:
        L = load_lattice(doc.get("lattice", "mo:3"))
    obs = {name: observable_from_dict(L, od, name) for name, od in doc["observables"].items()}
    return L, obs


def smap_to_dict(p: SMap) -> dict:
    entries = [
        {"tuple": list(p.labels(idx)), "value": fmt(v)}
        for idx, v in p.items()
    ]
    entries.sort(key=lambda e: e["tuple"])
    return {"lattice": _lattice_ref(p.lattice), "arity": p.arity, "entries": entries}


def _entries(doc: dict):
    try:
        return [(tuple(e["tuple"]), e["value"]) for e in doc["entries"]]
    except (KeyError, TypeError) as exc:
        raise StructuralError(f"malformed entry list: {exc!r}") from exc


def smap_from_dict(doc: dict, L: Lattice | None = None) -> SMap:
    if L is None:
        L = load_lattice(doc["lattice"])
    n = int(doc["arity"])
    table: dict = {}
    for key, val in _entries(doc):
        table[key] = val
    return SMap.from_entries(L, n, table)


def partial_from_dict(doc: dict, L: Lattice | None = None) -> PartialSMap:
    """Same schema as a full map, plus optional ``equalities``: ``[[t1, t2], ...]``."""
    if L is None:
        L = load_lattice(doc["lattice"])
    n = int(doc["arity"])
    eqs = [(tuple(a), tuple(b)) for a, b in doc.get("equalities", [])]
    return PartialSMap.from_listing(L, n, _entries(doc), eqs)
