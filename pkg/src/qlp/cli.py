"""Command-line front end.

Exit status: 0 when every check passes, 1 when a mathematical check fails
(axiom violation, inconsistent listing, infeasible constraints), 2 on
malformed or unreadable input.

Input files may be given as paths or as names of bundled fixtures
(``example31_partial.json``, ``example31_raw.json``,
``example31_observables.json``, ``broken.json``).  ``QLP_SEED`` is read
for forward compatibility and otherwise ignored: every path here is exact
and deterministic.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Sequence

from . import __version__
from .distribution import F, check_commutativity, check_F_properties, classical_model, marginal_F
from .errors import InconsistencyError, ModelConstructionError, StructuralError, UnderdeterminedError
from .example31 import verify
from .jsonio import (
    description_from_dict,
    dumps,
    lattice_to_dict,
    load_lattice,
    observables_from_dict,
    partial_from_dict,
    read_json,
    smap_from_dict,
    smap_to_dict,
    state_from_dict,
)
from .lattice import check_oml, from_generator
from .rational import fmt, fmt_both, to_fraction
from .reports import Report
from .smap import SMap, check_propositions, complete, validate
from .synth import ConstraintSet, synthesize, verify_certificate

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

SEED = os.environ.get("QLP_SEED")  # reserved; no code path is randomized


class InputError(Exception):
    pass


def _resolve_path(name: str) -> Path:
    path = Path(name)
    if path.exists():
        return path
    bundled = resources.files("qlp.data").joinpath(name)
    if bundled.is_file():
        return Path(str(bundled))
    raise InputError(f"no such file: {name}")


def _read(name: str):
    return read_json(_resolve_path(name))


class Output:
    def __init__(self, fmt_name: str, out_dir: str | None):
        self.format = fmt_name
        self.out_dir = Path(out_dir) if out_dir else None
        if self.out_dir is not None:
            self.out_dir.mkdir(parents=True, exist_ok=True)

    def emit(self, data: dict, text: str) -> None:
        sys.stdout.write(dumps(data) if self.format == "json" else text.rstrip("\n") + "\n")

    def write(self, filename: str, data: dict) -> Path | None:
        if self.out_dir is None:
            return None
        path = self.out_dir / filename
        path.write_text(dumps(data), encoding="utf-8")
        return path


def _report(out: Output, rep: Report, extra: dict | None = None, filename: str = "report.json") -> int:
    data = rep.to_dict()
    if extra:
        data.update(extra)
    out.write(filename, data)
    out.emit(data, rep.to_text())
    return EXIT_OK if rep.ok else EXIT_FAIL


# lattice

def cmd_lattice_make(args, out: Output) -> int:
    L = from_generator(args.spec)
    doc = lattice_to_dict(L)
    safe = args.spec.replace(":", "")
    path = out.write(f"{safe}.json", doc)
    if path is None or out.format == "json":
        sys.stdout.write(dumps(doc))
    else:
        sys.stdout.write(f"{args.spec}: {L.size} elements, {len(L.atoms)} atoms -> {path}\n")
    return EXIT_OK


def cmd_lattice_check(args, out: Output) -> int:
    if args.file.startswith(("mo:", "boolean:")):
        doc = lattice_to_dict(from_generator(args.file))
    else:
        doc = _read(args.file)
    rep = check_oml(description_from_dict(doc))
    return _report(out, rep)


# smap

def _load_map(name: str, L=None) -> SMap:
    """A full table, or a partial listing that completes uniquely."""
    doc = _read(name)
    if L is None:
        L = load_lattice(doc["lattice"]) if "lattice" in doc else None
        if L is None:
            raise StructuralError("s-map document has no lattice")
    n = int(doc["arity"])
    if len(doc.get("entries", [])) == L.size ** n and not doc.get("equalities"):
        return smap_from_dict(doc, L)
    return complete(partial_from_dict(doc, L))


def cmd_smap_validate(args, out: Output) -> int:
    doc = _read(args.file)
    p = smap_from_dict(doc)
    return _report(out, validate(p))


def cmd_smap_props(args, out: Output) -> int:
    p = _load_map(args.file)
    rep = check_propositions(p)
    return _report(out, rep)


def cmd_smap_complete(args, out: Output) -> int:
    doc = _read(args.file)
    q = partial_from_dict(doc)
    try:
        p = complete(q)
    except InconsistencyError as exc:
        data = {"status": "inconsistent", "inconsistency": exc.report.to_dict()}
        out.write("inconsistency.json", data)
        out.emit(data, exc.report.to_text())
        return EXIT_FAIL
    except UnderdeterminedError as exc:
        L = q.lattice
        free = [[L.label(i) for i in t] for t in exc.free_tuples]
        data = {"status": "underdetermined", "free": free[:50], "free_count": len(free)}
        out.emit(data, f"underdetermined: {len(free)} cells are not forced, e.g. {free[:5]}")
        return EXIT_FAIL
    table = smap_to_dict(p)
    rep = validate(p)
    out.write("smap.json", table)
    if out.format == "json" and out.out_dir is None:
        data = {"status": "complete", "smap": table, "validate": rep.to_dict()}
        out.emit(data, "")
    else:
        out.emit({"status": "complete", "entries": len(table["entries"]), "validate": rep.to_dict()},
                 f"complete: {len(table['entries'])} entries\n" + rep.to_text())
    return EXIT_OK if rep.ok else EXIT_FAIL


def _parse_arity(text: str) -> int:
    text = text.split("=", 1)[1] if text.startswith("arity=") else text
    try:
        n = int(text)
    except ValueError:
        raise InputError(f"arity must be an integer, got {text!r}") from None
    if n < 1:
        raise InputError("arity must be >= 1")
    return n


def constraints_from_doc(doc, L) -> ConstraintSet:
    """A list of ``{"tuple", "rel", "value"}`` records, or an object with keys
    ``constraints``, ``linear``, ``diagonal`` and ``symmetric``."""
    if isinstance(doc, list):
        doc = {"constraints": doc}
    if not isinstance(doc, dict):
        raise StructuralError("constraint document must be a list or an object")
    C = ConstraintSet()
    try:
        for c in doc.get("constraints", []):
            C.fix(c["tuple"], c["value"], c.get("rel", "="))
        for c in doc.get("linear", []):
            C.add_linear([(coef, t) for coef, t in c["terms"]], c.get("rel", "="), c["value"])
        if "diagonal" in doc:
            C.diagonal = state_from_dict(L, doc["diagonal"])
        sym = doc.get("symmetric")
        if sym is not None and not isinstance(sym, bool):
            raise StructuralError("'symmetric' must be true, false or absent")
        C.symmetric = sym
    except (KeyError, TypeError) as exc:
        raise StructuralError(f"malformed constraint: {exc!r}") from exc
    for c in C.fixed:
        if c.rel not in ("=", "<=", ">="):
            raise StructuralError(f"unknown relation {c.rel!r}")
        if not 0 <= c.value <= 1:
            raise StructuralError(f"fixed value {fmt(c.value)} lies outside [0,1]")
    return C


def cmd_smap_synth(args, out: Output) -> int:
    L = load_lattice(args.lattice if args.lattice.startswith(("mo:", "boolean:")) else _read(args.lattice))
    n = _parse_arity(args.arity)
    C = constraints_from_doc(_read(args.constraints), L) if args.constraints else ConstraintSet()
    res = synthesize(L, n, C)
    data = res.to_dict()
    if res.feasible:
        table = smap_to_dict(res.witness)
        out.write("smap.json", table)
        data["validate"] = validate(res.witness).to_dict()
        if out.out_dir is None and out.format == "json":
            data["smap"] = table
        text = f"feasible: witness with {len(table['entries'])} entries"
        if out.out_dir is not None:
            text += f" written to {out.out_dir / 'smap.json'}"
        out.write("status.json", data)
        out.emit(data, text)
        return EXIT_OK
    data["certificate_verified"] = verify_certificate(res) if res.multipliers else False
    out.write("status.json", data)
    lines = ["infeasible"]
    if res.note:
        lines.append(f"  {res.note}")
    if res.certificate:
        lines.append(f"  certificate ({len(res.certificate)} constraints, re-verified: {data['certificate_verified']}):")
        lines += [f"    {fmt(z):>6} x  {lab}" for lab, z in res.certificate]
    out.emit(data, "\n".join(lines))
    return EXIT_FAIL


# dist

def _system(args):
    obs_doc = _read(args.observables)
    p = _load_map(args.smap)
    _, obs = observables_from_dict(obs_doc, p.lattice)
    order = args.order.split(",") if args.order else list(obs)
    missing = [k for k in order if k not in obs]
    if missing:
        raise InputError(f"unknown observable {missing[0]!r}; available: {sorted(obs)}")
    xs = [obs[k] for k in order]
    if len(xs) != p.arity:
        raise InputError(f"s-map has arity {p.arity} but {len(xs)} observables were selected")
    return p, xs, order


def _parse_at(text: str | None, n: int, wild: bool = False) -> list:
    if text is None:
        raise InputError("--at is required")
    parts = [s.strip() for s in text.split(",")]
    if len(parts) != n:
        raise InputError(f"--at needs {n} values, got {len(parts)}")
    vals = []
    for s in parts:
        if wild and s in ("*", "inf", "+inf"):
            vals.append(None)
            continue
        try:
            vals.append(to_fraction(s))
        except (ValueError, TypeError):
            raise InputError(f"not a rational: {s!r}") from None
    return vals


def cmd_dist_F(args, out: Output) -> int:
    p, xs, order = _system(args)
    rs = _parse_at(args.at, len(xs))
    v = F(p, xs, rs)
    data = {"order": order, "at": [fmt(r) for r in rs], "F": fmt(v)}
    out.write("F.json", data)
    out.emit(data, f"F_{{{','.join(order)}}}({','.join(fmt(r) for r in rs)}) = {fmt_both(v)}")
    return EXIT_OK


def cmd_dist_marginal(args, out: Output) -> int:
    p, xs, order = _system(args)
    drop_names = [s for s in (args.drop or "").split(",") if s]
    if not drop_names:
        raise InputError("--drop needs at least one observable name")
    bad = [d for d in drop_names if d not in order]
    if bad:
        raise InputError(f"cannot drop {bad[0]!r}: not in --order {order}")
    drop = {order.index(d) for d in drop_names}
    rs = _parse_at(args.at, len(xs), wild=True)
    for i, r in enumerate(rs):
        if r is None and i not in drop:
            raise InputError(f"coordinate {order[i]} is not dropped but has no threshold")
    v = marginal_F(p, xs, rs, drop)
    shown = ["inf" if i in drop else fmt(r) for i, r in enumerate(rs)]
    data = {"order": order, "drop": sorted(drop_names), "at": shown, "F": fmt(v)}
    out.write("marginal.json", data)
    out.emit(data, f"F_{{{','.join(order)}}}({','.join(shown)}) = {fmt_both(v)}")
    return EXIT_OK


def cmd_dist_commutativity(args, out: Output) -> int:
    p, xs, order = _system(args)
    rep = check_commutativity(p, xs)
    data = {"order": order, **rep.to_dict()}
    props = check_F_properties(p, xs)
    data["F_properties"] = props.to_dict()
    out.write("commutativity.json", data)
    out.emit(data, rep.to_text() + "\n" + props.to_text())
    # non-commutativity is a finding, not a failure
    return EXIT_OK if props.ok else EXIT_FAIL


def cmd_dist_classical(args, out: Output) -> int:
    p, xs, order = _system(args)
    try:
        model = classical_model(p, xs)
    except ModelConstructionError as exc:
        data = {"status": "failed", "identity": str(exc)}
        out.emit(data, f"classical model could not be built: {exc}")
        return EXIT_FAIL
    data = {"order": order, **model.to_dict()}
    out.write("classical.json", data)
    lines = [f"Omega = product of spectra of {','.join(order)} ({len(model.omega)} points)"]
    for w in model.omega:
        lines.append(f"  P({{({','.join(fmt(t) for t in w)})}}) = {fmt_both(model.masses[w])}")
    lines.append(f"P(Omega) = {fmt(sum(model.masses.values(), Fraction(0)))}")
    lines.append(model.report.to_text())
    out.emit(data, "\n".join(lines))
    return EXIT_OK if model.report.ok else EXIT_FAIL


# verify

def cmd_verify(args, out: Output) -> int:
    res = verify(raw=args.raw, skip_classical=args.skip_classical)
    data = res.report.to_dict()
    text = res.report.to_text()
    if res.inconsistency is not None:
        data["inconsistency"] = res.inconsistency.report.to_dict()
        text += "\n" + res.inconsistency.report.to_text()
    first = res.first_failure()
    if first is not None:
        data["first_failure"] = first.name
        text += f"\nFAILED at: {first.name}"
    else:
        text += "\nall checks passed"
    if res.smap is not None:
        out.write("example31_smap.json", smap_to_dict(res.smap))
    out.write("report.json", data)
    out.emit(data, text)
    return EXIT_OK if res.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="text", help="report format")
    common.add_argument("--out", metavar="DIR", help="also write results into DIR")

    parser = argparse.ArgumentParser(prog="qlp", description="Finite orthomodular-lattice probability toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    top = parser.add_subparsers(dest="group", required=True)

    lat = top.add_parser("lattice", help="build or check lattices").add_subparsers(dest="cmd", required=True)
    s = lat.add_parser("make", parents=[common], help="generate mo:<n> or boolean:<k>")
    s.add_argument("spec")
    s.set_defaults(func=cmd_lattice_make)
    s = lat.add_parser("check", parents=[common], help="check the orthomodular lattice axioms")
    s.add_argument("file")
    s.set_defaults(func=cmd_lattice_check)

    sm = top.add_parser("smap", help="s-map tables").add_subparsers(dest="cmd", required=True)
    s = sm.add_parser("validate", parents=[common], help="check (s1)-(s3) on a full table")
    s.add_argument("file")
    s.set_defaults(func=cmd_smap_validate)
    s = sm.add_parser("complete", parents=[common], help="complete a partial listing")
    s.add_argument("file")
    s.set_defaults(func=cmd_smap_complete)
    s = sm.add_parser("props", parents=[common], help="check the derived identities")
    s.add_argument("file")
    s.set_defaults(func=cmd_smap_props)
    s = sm.add_parser("synth", parents=[common], help="synthesize an s-map under constraints")
    s.add_argument("lattice", help="lattice file or mo:<n>/boolean:<k>")
    s.add_argument("arity", help="N or arity=N")
    s.add_argument("constraints", nargs="?")
    s.set_defaults(func=cmd_smap_synth)

    dist = top.add_parser("dist", help="distribution functions").add_subparsers(dest="cmd", required=True)
    for name, func, help_ in (
        ("F", cmd_dist_F, "joint distribution function"),
        ("marginal", cmd_dist_marginal, "marginal distribution function"),
        ("commutativity", cmd_dist_commutativity, "permutation invariance report"),
        ("classical", cmd_dist_classical, "classical probability-space representation"),
    ):
        s = dist.add_parser(name, parents=[common], help=help_)
        s.add_argument("smap", help="full table or partial listing")
        s.add_argument("observables")
        s.add_argument("--order", help="comma-separated observable names")
        if name in ("F", "marginal"):
            s.add_argument("--at", help="comma-separated thresholds")
        if name == "marginal":
            s.add_argument("--drop", help="comma-separated observable names sent to +inf")
        s.set_defaults(func=func)

    ver = top.add_parser("verify", help="reproduce bundled examples").add_subparsers(dest="cmd", required=True)
    s = ver.add_parser("example31", parents=[common], help="three observables on MO3")
    s.add_argument("--raw", action="store_true", help="use the listing without errata")
    s.add_argument("--skip-classical", action="store_true")
    s.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = Output(args.format, args.out)
        return args.func(args, out)
    except (InconsistencyError, UnderdeterminedError, ModelConstructionError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAIL
    except (InputError, StructuralError, ValueError, KeyError, TypeError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        sys.stderr.write(f"error: {msg}\n")
        return EXIT_INPUT

if __name__ == "__main__":
    sys.exit(main())
