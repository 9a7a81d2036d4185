from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Report:
    """Outcome of a verification operation: one item per elementary check."""

    name: str
    items: list[dict[str, Any]] = field(default_factory=list)
    summary: dict[str, Any] = field(default_factory=dict)

    def add(self, check: str, ok: bool, **data: Any) -> bool:
        self.items.append({"check": check, "ok": bool(ok), **data})
        return bool(ok)

    @property
    def ok(self) -> bool:
        return all(item["ok"] for item in self.items)

    def failures(self) -> list[dict[str, Any]]:
        return [item for item in self.items if not item["ok"]]

    def merge(self, other: "Report", prefix: str | None = None) -> None:
        for item in other.items:
            item = dict(item)
            if prefix:
                item["check"] = f"{prefix}: {item['check']}"
            self.items.append(item)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "ok": self.ok,
            "summary": self.summary,
            "items": self.items,
        }

    def __bool__(self) -> bool:
        return self.ok
