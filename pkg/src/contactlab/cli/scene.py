"""Line-oriented scene files.

A scene is a list of sections. Lines before the first section set global
options (``seed``, ``samples``, ``tol``)::

    seed = 0

    [manifold std]
    catalog = standard
    n = 1

    [task verify-contact]
    manifold = std

See ``docs/scene-format.md`` for the full grammar.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..errors import ParseError, SceneError, UnknownIdentifier

SECTION_KINDS = ("manifold", "field", "function", "task")
TASK_KINDS = ("verify-contact", "reeb", "classify-field", "hamiltonian", "bracket", "bracket-laws",
              "check-integrable", "flow", "cone-check", "lens", "moment-map", "lerman", "plane-grid")
GLOBAL_KEYS = ("seed", "samples", "tol")

_HEADER = re.compile(r"^\[\s*([A-Za-z-]+)(?:\s+([^\]\s]+))?\s*\]\s*$")
_KEY = re.compile(r"^([A-Za-z_][\w-]*)(?:\(\s*([^)]*?)\s*\))?\s*=")


@dataclass
class Entry:
    key: str
    arg: str  # text inside key(...) or ""
    value: str
    line: int
    column: int  # 1-based column where the value starts

    def error(self, message, offset=0):
        return SceneError(message, self.line, self.column + offset)


@dataclass
class Section:
    kind: str
    name: str
    line: int
    entries: list = field(default_factory=list)

    def get(self, key, default=None):
        for e in self.entries:
            if e.key == key and not e.arg:
                return e
        return default

    def all(self, key):
        return [e for e in self.entries if e.key == key]

    def value(self, key, default=None):
        e = self.get(key)
        return default if e is None else e.value

    def require(self, key):
        e = self.get(key)
        if e is None:
            raise SceneError(f"[{self.kind} {self.name}] needs '{key} = ...'", self.line, 1)
        return e


@dataclass
class Scene:
    globals: dict
    sections: list
    path: str = ""

    def of_kind(self, kind):
        return [s for s in self.sections if s.kind == kind]


def parse_scene(text: str, path: str = "") -> Scene:
    sections, globals_ = [], {}
    current = None
    task_count = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        indent = len(raw) - len(raw.lstrip())
        if stripped.startswith("["):
            m = _HEADER.match(stripped)
            if not m:
                raise SceneError("malformed section header, expected '[kind name]'", lineno, indent + 1)
            kind, name = m.group(1), m.group(2)
            if kind not in SECTION_KINDS:
                raise SceneError(f"unknown section kind {kind!r}", lineno, indent + 2)
            if kind == "task":
                if name not in TASK_KINDS:
                    raise SceneError(f"unknown task kind {name!r}", lineno, indent + 2 + len(kind) + 1)
                task_count += 1
            elif not name:
                raise SceneError(f"[{kind}] needs a name", lineno, indent + 1)
            current = Section(kind, name, lineno)
            sections.append(current)
            continue
        m = _KEY.match(stripped)
        if not m:
            raise SceneError("expected 'key = value'", lineno, indent + 1)
        key, arg = m.group(1), m.group(2) or ""
        after = stripped[m.end():]
        value = after.strip()
        column = indent + m.end() + (len(after) - len(after.lstrip())) + 1
        if not value:
            raise SceneError(f"empty value for {key!r}", lineno, column)
        entry = Entry(key, arg, value, lineno, column)
        if current is None:
            if key not in GLOBAL_KEYS:
                raise SceneError(f"unknown global option {key!r}", lineno, indent + 1)
            globals_[key] = entry
        else:
            current.entries.append(entry)
    return Scene(globals_, sections, path)


def parse_expression(entry: Entry, names, text=None):
    """Parse an entry value as an expression, mapping errors to scene positions."""
    from ..expr import parse

    text = entry.value if text is None else text
    try:
        return parse(text, names)
    except ParseError as exc:
        raise entry.error(f"syntax error: expected {exc.expected}", exc.position) from None
    except UnknownIdentifier as exc:
        raise entry.error(f"unknown identifier {exc.name!r}", exc.position or 0) from None


def split_list(value: str, sep=","):
    return [v.strip() for v in value.split(sep) if v.strip()]


def parse_number(entry: Entry, kind=float, text=None):
    text = entry.value if text is None else text
    try:
        return kind(text)
    except ValueError:
        raise entry.error(f"expected {'an integer' if kind is int else 'a number'}, got {text!r}") from None


def parse_numbers(entry: Entry, kind=float, sep=None):
    parts = entry.value.replace(",", " ").split() if sep is None else split_list(entry.value, sep)
    return [parse_number(entry, kind, p) for p in parts]


def parse_vectors(entry: Entry):
    """Integer vectors separated by ';', entries by spaces or commas: ``0 -1; 1 1``."""
    out = []
    for part in split_list(entry.value, ";"):
        out.append([parse_number(entry, int, p) for p in part.replace(",", " ").split()])
    if not out:
        raise entry.error("expected at least one vector")
    return out
