"""Check reports shared by the verifiers and the CLI."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

PASS = "pass"
FAIL = "fail"


@dataclass
class Check:
    name: str
    status: str = PASS
    witness: Any = None
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status == PASS

    def to_json(self) -> dict:
        out = {"name": self.name, "status": self.status, "witness": _jsonable(self.witness)}
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class Report:
    title: str
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def add(self, name: str, ok: bool, witness: Any = None, detail: str = "") -> Check:
        c = Check(name, PASS if ok else FAIL, witness, detail)
        self.checks.append(c)
        return c

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.ok]

    def extend(self, other: Report, prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.status, c.witness, c.detail))
        self.notes.extend(n for n in other.notes if n not in self.notes)

    def to_json(self) -> dict:
        out = {"title": self.title, "checks": [c.to_json() for c in self.checks]}
        if self.data:
            out["data"] = _jsonable(self.data)
        if self.notes:
            out["notes"] = list(self.notes)
        return out

    def __str__(self):
        lines = [f"{self.title}: {'PASS' if self.ok else 'FAIL'}"]
        lines += [f"  note: {n}" for n in self.notes]
        for c in self.checks:
            w = "" if c.witness is None else f"  witness={_jsonable(c.witness)}"
            d = f"  ({c.detail})" if c.detail else ""
            lines.append(f"  [{c.status}] {c.name}{d}{w}")
        return "\n".join(lines)


def _jsonable(x):
    from fractions import Fraction
    from .algebra import AlgElement, Ultrafilter
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, AlgElement):
        return [str(a) if not isinstance(a, int) else a for a in x.sorted_members()]
    if isinstance(x, Ultrafilter):
        return {"ultrafilter": x.principal_atom}
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = list(x)
        if isinstance(x, (set, frozenset)):
            items = sorted(items, key=repr)
        return [_jsonable(v) for v in items]
    if hasattr(x, "to_json"):
        return x.to_json()
    return str(x)
