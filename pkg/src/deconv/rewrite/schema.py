"""Variable schema declarations for decorated trees.

A schema file declares the decoration type: exclusive variables (exactly
one value when assigned) under ``-EXC-``, non-exclusive variables (value
sets) under ``-NEX-``, and named constant decorations (formats) under
``-FMT-``.  ``**`` starts a comment.  A declared value list of ``(*)``
makes the variable open-valued (any token), which is how lexical material
such as lemmas flows through the rules.

Example::

    -EXC- ** exclusive attributes
    CAT (N, V, A, D, R, NEG).
    POS (P0, P1, P2, P3, P4, P5).   ** linear slots, order matters
    LEMMA (*).
    -NEX-
    SRC (*).
    -FMT-
    ART == CAT=D, POS=P1.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from ..errors import RuleSyntaxError, RuleTypeError

_DECL_RE = re.compile(r"^([A-Z][A-Z0-9_]*)\s*\(([^)]*)\)\s*\.?\s*$")
_FMT_RE = re.compile(r"^([A-Z][A-Z0-9_-]*)\s*==\s*(.+?)\s*\.?\s*$")


@dataclass(frozen=True)
class VariableSchema:
    exclusive: dict[str, tuple[str, ...] | None]  # None = open value set
    nonexclusive: dict[str, tuple[str, ...] | None]
    formats: dict[str, dict[str, object]]

    def kind(self, var: str) -> str | None:
        if var in self.exclusive:
            return "exc"
        if var in self.nonexclusive:
            return "nex"
        return None

    def check_value(self, var: str, value: str) -> bool:
        values = (
            self.exclusive.get(var)
            if var in self.exclusive
            else self.nonexclusive.get(var)
        )
        return values is None or value in values

    def value_index(self, var: str, value: str) -> int:
        """Position of a value in its declared (ordered) value set."""
        values = self.exclusive.get(var)
        if values is None:
            raise RuleTypeError(f"variable {var} has no declared value order")
        return values.index(value)

    def validate_decoration(self, dec: dict) -> None:
        """Raise RuleTypeError when a decoration does not fit the schema."""
        for var, value in dec.items():
            kind = self.kind(var)
            if kind is None:
                raise RuleTypeError(f"undeclared variable {var}")
            if kind == "exc":
                if isinstance(value, frozenset):
                    raise RuleTypeError(f"exclusive variable {var} holds a set")
                if not self.check_value(var, value):
                    raise RuleTypeError(f"bad value {value!r} for {var}")
            else:
                if not isinstance(value, frozenset):
                    raise RuleTypeError(f"non-exclusive variable {var} needs a set")
                for v in value:
                    if not self.check_value(var, v):
                        raise RuleTypeError(f"bad value {v!r} for {var}")

    def validate_tree(self, root) -> None:
        for node in root.walk():
            self.validate_decoration(node.dec)


def _strip_comment(line: str) -> str:
    idx = line.find("**")
    return line[:idx] if idx >= 0 else line


def parse_schema(text: str) -> VariableSchema:
    exclusive: dict[str, tuple[str, ...] | None] = {}
    nonexclusive: dict[str, tuple[str, ...] | None] = {}
    fmt_lines: list[tuple[int, str]] = []
    section = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        upper = line.upper()
        if upper.startswith("-EXC-"):
            section = "exc"
            continue
        if upper.startswith("-NEX-"):
            section = "nex"
            continue
        if upper.startswith("-FMT-"):
            section = "fmt"
            continue
        if section is None:
            raise RuleSyntaxError("declaration before any section", lineno)
        if section == "fmt":
            fmt_lines.append((lineno, line))
            continue
        m = _DECL_RE.match(line)
        if m is None:
            raise RuleSyntaxError(f"bad declaration {line!r}", lineno)
        name = m.group(1)
        if name in exclusive or name in nonexclusive:
            raise RuleSyntaxError(f"variable {name} declared twice", lineno)
        body = m.group(2).strip()
        if body == "*":
            values: tuple[str, ...] | None = None
        else:
            values = tuple(v.strip() for v in body.split(",") if v.strip())
            if not values:
                raise RuleSyntaxError(f"empty value set for {name}", lineno)
        (exclusive if section == "exc" else nonexclusive)[name] = values

    schema = VariableSchema(exclusive, nonexclusive, {})
    formats: dict[str, dict[str, object]] = {}
    for lineno, line in fmt_lines:
        m = _FMT_RE.match(line)
        if m is None:
            raise RuleSyntaxError(f"bad format {line!r}", lineno)
        name = m.group(1)
        if name in formats:
            raise RuleSyntaxError(f"format {name} declared twice", lineno)
        dec: dict[str, object] = {}
        for part in m.group(2).split(","):
            part = part.strip()
            if "=" not in part:
                raise RuleSyntaxError(f"bad format assignment {part!r}", lineno)
            var, value = (p.strip() for p in part.split("=", 1))
            kind = schema.kind(var)
            if kind is None:
                raise RuleTypeError(f"format {name} uses undeclared variable {var}", lineno)
            if not schema.check_value(var, value):
                raise RuleTypeError(f"format {name}: bad value {value!r} for {var}", lineno)
            dec[var] = frozenset({value}) if kind == "nex" else value
        formats[name] = dec
    return VariableSchema(exclusive, nonexclusive, formats)


def load_schema(path: str | Path) -> VariableSchema:
    return parse_schema(Path(path).read_text(encoding="utf-8"))
