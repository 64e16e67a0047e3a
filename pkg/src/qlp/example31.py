"""End-to-end reproduction of the three-observable MO3 example.

The bundled fixtures describe a partially listed s_3-map on MO3 and three
two-valued observables ``x_i = {-1: a_i', 1: a_i}`` for ``a_i`` in ``a, b, c``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from itertools import product

from .distribution import F, check_commutativity, check_F_properties, classical_model, grid, marginal_F
from .errors import InconsistencyError, ModelConstructionError
from .jsonio import observables_from_dict, partial_from_dict
from .lattice import check_oml, make_mo
from .rational import fmt
from .reports import Check, Report
from .smap import SMap, check_propositions, complete, derived_state, validate

__all__ = ["fixture", "load", "verify", "Example31Result", "EXPECTED_F", "EXPECTED_NU"]

# published values
EXPECTED_F = {
    ("x1", "x2", "x3"): Fraction(3, 10),
    ("x2", "x1", "x3"): Fraction(1, 5),
    ("x3", "x2", "x1"): Fraction(29, 100),
}
EXPECTED_NU = {"a": Fraction(3, 10), "b": Fraction(2, 5), "c": Fraction(1, 2)}


def fixture(name: str) -> dict:
    import json

    return json.loads(resources.files("qlp.data").joinpath(name).read_text(encoding="utf-8"))


def load(raw: bool = False):
    """``(lattice, partial map, observables)`` from the bundled fixtures."""
    L = make_mo(3)
    _, obs = observables_from_dict(fixture("example31_observables.json"), L)
    q = partial_from_dict(fixture("example31_raw.json" if raw else "example31_partial.json"), L)
    return L, q, obs


@dataclass
class Example31Result:
    report: Report
    smap: SMap | None = None
    stage: str = ""
    inconsistency: InconsistencyError | None = None
    extras: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.report.ok

    def first_failure(self) -> Check | None:
        failed = self.report.failed()
        return failed[0] if failed else None


def verify(raw: bool = False, skip_classical: bool = False) -> Example31Result:
    checks: list[Check] = []
    rep = Report("three-observable MO3 example", checks)

    L = make_mo(3)
    oml = check_oml(L.describe())
    checks.append(Check("MO3 is an orthomodular lattice", oml.ok, checked=len(oml.checks)))

    L, q, obs = load(raw)
    try:
        p = complete(q)
    except InconsistencyError as exc:
        checks.append(Check("completion", False, detail=exc.report.summary(), witness=list(exc.report.to_dict()["tuple"])))
        return Example31Result(rep, None, "completion", exc)
    checks.append(Check("completion", True, checked=len(q.entries), detail=f"{L.size ** 3} entries"))

    v = validate(p)
    checks.append(Check("validate (s1)-(s3)", v.ok, checked=sum(c.checked for c in v.checks),
                        witness=None if v.ok else v.failed()[0].witness))
    props = check_propositions(p)
    checks.append(Check("propositions", props.ok, checked=sum(c.checked for c in props.checks),
                        witness=None if props.ok else props.failed()[0].name))

    nu = derived_state(p)
    for lab, want in EXPECTED_NU.items():
        got = nu.by_label(lab)
        checks.append(Check(f"nu({lab}) = {fmt(want)}", got == want, checked=1, detail=f"got {fmt(got)}"))

    for order, want in EXPECTED_F.items():
        xs = [obs[k] for k in order]
        got = F(p, xs, [1, 1, 1])
        checks.append(Check(f"F_{{{','.join(order)}}}(1,1,1) = {fmt(want)}", got == want, checked=1,
                            detail=f"got {fmt(got)}"))

    xs = [obs["x1"], obs["x2"], obs["x3"]]
    fp = check_F_properties(p, xs)
    checks.append(Check("distribution function properties", fp.ok,
                        checked=sum(c.checked for c in fp.checks),
                        witness=None if fp.ok else fp.failed()[0].name))

    m = marginal_F(p, xs, [None, 1, 1], {0})
    checks.append(Check("marginal p(1,b',c') = 3/10", m == Fraction(3, 10), checked=1, detail=f"got {fmt(m)}"))
    sym_fail = None
    count = 0
    for r2, r3 in product(grid(obs["x2"]), grid(obs["x3"])):
        count += 1
        lhs = marginal_F(p, xs, [None, r2, r3], {0})
        rhs = marginal_F(p, [obs["x1"], obs["x3"], obs["x2"]], [None, r3, r2], {0})
        if lhs != rhs and sym_fail is None:
            sym_fail = [fmt(r2), fmt(r3)]
    checks.append(Check("marginal over x1 symmetric in (x2, x3)", sym_fail is None, witness=sym_fail, checked=count))

    comm = check_commutativity(p, xs)
    target = {"tuple": ["a'", "b'", "c'"], "permutation": [2, 1, 3]}
    hit = [w for w in comm.violations if w["tuple"] == target["tuple"] and w["permutation"] == target["permutation"]]
    ok = (not comm.commutative) and bool(hit) and hit[0]["value"] == "3/10" and hit[0]["permuted_value"] == "1/5"
    checks.append(Check("non-commutative with witness (a',b',c') swap(1,2)", ok, checked=comm.checked,
                        witness=hit[0] if hit else None))

    extras: dict = {"commutativity": comm}
    if skip_classical:
        checks.append(Check("classical model", True, skipped=True, detail="skipped on request"))
    else:
        try:
            model = classical_model(p, xs)
        except ModelConstructionError as exc:
            checks.append(Check("classical model", False, detail=str(exc)))
        else:
            extras["classical"] = model
            for c in model.report.checks:
                checks.append(Check(f"classical: {c.name}", c.passed, witness=c.witness, checked=c.checked,
                                    failures=c.failures, detail=c.detail))
            corner = model.masses[(Fraction(-1),) * 3]
            checks.append(Check("classical: P({(-1,-1,-1)}) = 3/10", corner == Fraction(3, 10), checked=1,
                                detail=f"got {fmt(corner)}"))
    return Example31Result(rep, p, "done", None, extras)
