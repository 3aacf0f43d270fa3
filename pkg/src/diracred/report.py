"""Pass/fail/skip/warn trees with deterministic JSON and text rendering."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

STATUSES = ("pass", "fail", "skip", "warn")
SCHEMA_VERSION = 1


@dataclass
class Node:
    name: str
    status: str = ""
    detail: str = ""
    witnesses: list = field(default_factory=list)
    children: list = field(default_factory=list)

    def __post_init__(self):
        if self.status and self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    def add(self, child: Node) -> Node:
        self.children.append(child)
        return child

    @property
    def effective(self) -> str:
        """Own status, or the worst child status for grouping nodes."""
        if self.status or not self.children:
            return self.status or "skip"
        seen = {c.effective for c in self.children}
        for s in ("fail", "warn", "pass"):
            if s in seen:
                return s
        return "skip"

    def has_fail(self) -> bool:
        return self.status == "fail" or any(c.has_fail() for c in self.children)

    def find(self, name: str):
        if self.name == name:
            return self
        for c in self.children:
            hit = c.find(name)
            if hit is not None:
                return hit
        return None

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    def to_dict(self) -> dict:
        out = {"name": self.name, "status": self.effective}
        if self.detail:
            out["detail"] = self.detail
        if self.witnesses:
            out["witnesses"] = [str(w) for w in self.witnesses]
        if self.children:
            out["children"] = [c.to_dict() for c in self.children]
        return out


def passed(name, detail="", witnesses=()):
    return Node(name, "pass", detail, list(witnesses))


def failed(name, detail="", witnesses=()):
    return Node(name, "fail", detail, list(witnesses))


def skipped(name, reason):
    return Node(name, "skip", reason)


def warned(name, detail="", witnesses=()):
    return Node(name, "warn", detail, list(witnesses))


def verdict(name, ok, detail="", witnesses=()):
    return Node(name, "pass" if ok else "fail", detail, list(witnesses))


@dataclass
class Report:
    command: str
    scene: str
    root: Node

    @property
    def exit_code(self) -> int:
        return 1 if self.root.has_fail() else 0

    def to_dict(self) -> dict:
        return {
            "schemaVersion": SCHEMA_VERSION,
            "command": self.command,
            "scene": self.scene,
            "status": self.root.effective,
            "checks": self.root.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lines = [f"{self.command} {self.scene}: {self.root.effective.upper()}"]

        def emit(node, depth):
            pad = "  " * depth
            line = f"{pad}[{node.effective}] {node.name}"
            if node.detail:
                line += f": {node.detail}"
            lines.append(line)
            for w in node.witnesses:
                lines.append(f"{pad}    {w}")
            for c in node.children:
                emit(c, depth + 1)

        for c in self.root.children:
            emit(c, 1)
        return "\n".join(lines) + "\n"
