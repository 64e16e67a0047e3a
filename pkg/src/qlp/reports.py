"""Check/report containers shared by the validators.

A report is an ordered list of named checks.  Each check carries the number of
instances it looked at, how many failed, and the first failing instance in
enumeration order (which is the lexicographically least one, so it doubles as
a minimal witness).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Check:
    name: str
    passed: bool
    witness: Any = None
    detail: str = ""
    checked: int = 0
    failures: int = 0
    skipped: bool = False

    def to_dict(self) -> dict:
        out = {"name": self.name, "status": self.status}
        if self.checked:
            out["checked"] = self.checked
        if self.failures:
            out["failures"] = self.failures
        if self.witness is not None:
            out["witness"] = _jsonable(self.witness)
        if self.detail:
            out["detail"] = self.detail
        return out

    @property
    def status(self) -> str:
        if self.skipped:
            return "skipped"
        return "pass" if self.passed else "fail"


class CheckBuilder:
    """Accumulates instances of one property, keeping the first failure."""

    def __init__(self, name: str):
        self.name = name
        self.checked = 0
        self.failures = 0
        self.witness = None
        self.detail = ""

    def record(self, ok: bool, witness=None, detail: str = "") -> None:
        self.checked += 1
        if not ok:
            self.failures += 1
            if self.witness is None:
                self.witness = witness
                self.detail = detail

    def build(self) -> Check:
        return Check(
            self.name,
            self.failures == 0,
            witness=self.witness,
            detail=self.detail,
            checked=self.checked,
            failures=self.failures,
        )


@dataclass
class Report:
    title: str
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed or c.skipped for c in self.checks)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(c.name == name for c in self.checks)

    def failed(self) -> list[Check]:
        return [c for c in self.checks if not (c.passed or c.skipped)]

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "ok": self.ok,
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_text(self) -> str:
        width = max((len(c.name) for c in self.checks), default=0)
        lines = [self.title]
        for c in self.checks:
            line = f"  {c.name.ljust(width)}  {c.status.upper():7}"
            if c.checked:
                line += f" {c.failures}/{c.checked} failing"
            if c.witness is not None and not c.passed:
                line += f"  witness={_jsonable(c.witness)}"
            if c.detail and not c.passed:
                line += f"  ({c.detail})"
            lines.append(line.rstrip())
        return "\n".join(lines)


def _jsonable(obj):
    from fractions import Fraction

    from .rational import fmt

    if isinstance(obj, Fraction):
        return fmt(obj)
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    return obj
