"""Step-by-step reports shared by the derivations, checks and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

SCHEMA = "kpsato.report/1"


@dataclass
class Step:
    label: str
    text: str
    ok: bool | None = None


@dataclass
class Report:
    title: str
    ok: bool = True
    steps: list[Step] = field(default_factory=list)
    data: dict[str, Any] = field(default_factory=dict)

    def add(self, label: str, value, ok: bool | None = None) -> "Report":
        self.steps.append(Step(label, str(value), ok))
        if ok is False:
            self.ok = False
        return self

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "ok": self.ok,
            "steps": [
                {"label": s.label, "text": s.text, **({} if s.ok is None else {"ok": s.ok})}
                for s in self.steps
            ],
            "data": self.data,
        }

    def to_text(self) -> str:
        lines = [self.title]
        for s in self.steps:
            mark = "" if s.ok is None else ("[ok] " if s.ok else "[FAILED] ")
            lines.append(f"  {mark}{s.label}: {s.text}")
        return "\n".join(lines)

    def __str__(self):
        return self.to_text()
