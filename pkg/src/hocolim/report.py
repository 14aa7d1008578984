"""Verification reports: named verdicts with witnesses, rendered as JSON or text."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .chainz import ChainMap, GroupInvariants, Homology


@dataclass
class Check:
    name: str
    passed: bool
    witness: Any = None
    detail: str = ""

    def to_json(self) -> dict:
        out = {"name": self.name, "passed": self.passed}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class Report:
    command: str
    checks: list[Check] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    summary: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, witness: Any = None, detail: str = "") -> Check:
        if not passed and witness is None:
            witness = {"check": name}
        c = Check(name, bool(passed), witness, detail)
        self.checks.append(c)
        return c

    def extend(self, checks: list[Check]) -> None:
        self.checks.extend(checks)

    def to_json(self) -> dict:
        return {"command": self.command, "passed": self.passed,
                "checks": [c.to_json() for c in self.checks], **self.data}

    def render_json(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def render_text(self) -> str:
        lines = [f"{self.command}: {'PASS' if self.passed else 'FAIL'}"]
        lines.extend(f"  {line}" for line in self.summary)
        for c in self.checks:
            line = f"  [{'PASS' if c.passed else 'FAIL'}] {c.name}"
            if c.detail:
                line += f" ({c.detail})"
            if not c.passed:
                line += f": {json.dumps(c.witness, sort_keys=True)}"
            lines.append(line)
        return "\n".join(lines) + "\n"


def group_json(g: GroupInvariants) -> dict:
    return {"rank": g.rank, "torsion": list(g.torsion), "text": str(g)}


def homology_json(h: Homology, degrees: list[int]) -> dict:
    return {str(n): group_json(h[n]) for n in degrees}


def homology_text(h: Homology, degrees: list[int]) -> str:
    return ", ".join(f"H{n} = {h[n]}" for n in degrees) if degrees else "0"


def map_witness(f: ChainMap, n: int) -> dict:
    return {"degree": n, "matrix": [list(r) for r in f[n].rows]}
