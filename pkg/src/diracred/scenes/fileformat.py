"""Reader and writer for the sectioned scene text format.

A document is a sequence of ``[section]`` headers, each followed by
``key = value`` entries.  Inside a section, a key that repeats (or a repeated
header) starts a new record.  Values are quoted strings, integers, lists in
square brackets, tuples in parentheses, or constraints ``"expr" op 0``.
``#`` starts a comment outside strings.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import SceneParseError

OPERATORS = (">=", "<=", "!=", ">", "<", "=")


@dataclass(frozen=True)
class Constraint:
    expr: str
    op: str
    rhs: int = 0

    def __str__(self):
        return f"{_quote(self.expr)} {self.op} {self.rhs}"


class _Scanner:
    def __init__(self, text):
        self.text = text
        self.i = 0

    def where(self, i=None):
        i = self.i if i is None else i
        line = self.text.count("\n", 0, i) + 1
        col = i - (self.text.rfind("\n", 0, i) + 1) + 1
        return line, col

    def fail(self, message, i=None):
        line, col = self.where(i)
        raise SceneParseError(message, line, col)

    def peek(self):
        return self.text[self.i] if self.i < len(self.text) else ""

    def skip(self, newlines=True):
        t = self.text
        while self.i < len(t):
            c = t[self.i]
            if c == "#":
                while self.i < len(t) and t[self.i] != "\n":
                    self.i += 1
            elif c == "\n" and not newlines:
                return
            elif c.isspace():
                self.i += 1
            else:
                return

    def ident(self):
        start = self.i
        t = self.text
        while self.i < len(t) and (t[self.i].isalnum() or t[self.i] in "_-"):
            self.i += 1
        if start == self.i:
            self.fail("expected an identifier")
        return t[start:self.i]

    def expect(self, ch):
        if self.peek() != ch:
            self.fail(f"expected {ch!r}, found {self.peek() or 'end of file'!r}")
        self.i += 1

    def string(self):
        start = self.i
        self.expect('"')
        out = []
        t = self.text
        while True:
            if self.i >= len(t) or t[self.i] == "\n":
                self.fail("unterminated string", start)
            c = t[self.i]
            self.i += 1
            if c == '"':
                return "".join(out)
            if c == "\\":
                if self.i >= len(t):
                    self.fail("dangling escape", start)
                out.append(t[self.i])
                self.i += 1
            else:
                out.append(c)

    def integer(self):
        start = self.i
        if self.peek() == "-":
            self.i += 1
        while self.peek().isdigit():
            self.i += 1
        digits = self.text[start:self.i]
        if digits in ("", "-"):
            self.fail("expected a value", start)
        return int(digits)

    def value(self):
        self.skip()
        c = self.peek()
        if c == '"':
            s = self.string()
            save = self.i
            self.skip(newlines=False)
            for op in OPERATORS:
                if self.text.startswith(op, self.i):
                    self.i += len(op)
                    self.skip(newlines=False)
                    return Constraint(s, op, self.integer())
            self.i = save
            return s
        if c == "[":
            return self._sequence("[", "]")
        if c == "(":
            return tuple(self._sequence("(", ")"))
        if c == "-" or c.isdigit():
            return self.integer()
        self.fail(f"unexpected {c or 'end of file'!r} where a value was expected")

    def _sequence(self, open_, close):
        self.expect(open_)
        items = []
        while True:
            self.skip()
            if self.peek() == close:
                self.i += 1
                return items
            items.append(self.value())
            self.skip()
            if self.peek() == ",":
                self.i += 1
            elif self.peek() != close:
                self.fail(f"expected ',' or {close!r}")


@dataclass
class Document:
    """Ordered sections, each a list of records (dicts keyed in file order)."""

    sections: dict
    # (section, record index, key) -> (line, column) of the value
    positions: dict = field(default_factory=dict, compare=False, repr=False)

    def where(self, section, index, key):
        return self.positions.get((section, index, key), (0, 0))

    def records(self, name):
        return self.sections.get(name, [])

    def first(self, name):
        recs = self.records(name)
        return recs[0] if recs else {}


def parse_document(text: str) -> Document:
    sc = _Scanner(text)
    sections = {}
    positions = {}
    current = None
    while True:
        sc.skip()
        if sc.i >= len(text):
            break
        if sc.peek() == "[":
            sc.i += 1
            name = sc.ident()
            sc.expect("]")
            sections.setdefault(name, [])
            sections[name].append({})
            current = name
            continue
        start = sc.i
        key = sc.ident()
        if current is None:
            sc.fail(f"entry {key!r} appears before any section header", start)
        sc.skip(newlines=False)
        sc.expect("=")
        sc.skip(newlines=False)
        pos = sc.where()
        val = sc.value()
        rec = sections[current][-1]
        if key in rec:
            rec = {}
            sections[current].append(rec)
        rec[key] = val
        positions[(current, len(sections[current]) - 1, key)] = pos
        sc.skip(newlines=False)
        if sc.i < len(text) and sc.peek() != "\n":
            sc.fail("expected end of line after value")
    # drop empty records left by bare headers, keeping positions aligned
    for name in list(sections):
        kept = [i for i, r in enumerate(sections[name]) if r]
        remap = {old: new for new, old in enumerate(kept)}
        sections[name] = [sections[name][i] for i in kept]
        for key in [k for k in positions if k[0] == name]:
            pos = positions.pop(key)
            if key[1] in remap:
                positions[(name, remap[key[1]], key[2])] = pos
    return Document(sections, positions)


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_value(v) -> str:
    if isinstance(v, Constraint):
        return str(v)
    if isinstance(v, str):
        return _quote(v)
    if isinstance(v, bool):
        raise TypeError("booleans are written as strings")
    if isinstance(v, int):
        return str(v)
    if isinstance(v, tuple):
        return "(" + ", ".join(format_value(x) for x in v) + ")"
    if isinstance(v, list):
        return "[" + ", ".join(format_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def dump_document(doc: Document) -> str:
    lines = []
    for name, records in doc.sections.items():
        for rec in records:
            lines.append(f"[{name}]")
            for k, v in rec.items():
                lines.append(f"{k} = {format_value(v)}")
            lines.append("")
    return "\n".join(lines)
