"""Universal Words: headword plus a list of restrictions.

A UW is written ``headword(rel>target, rel>target, ...)``.  The headword is
a lowercase word or space-separated compound; each restriction names a
semantic relation, a direction (``>`` or ``<``) and a target.  Targets may
themselves contain parenthesised material (one nesting level in practice);
we keep such targets as opaque text rather than parsing them recursively.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import MalformedUW

_REL_RE = re.compile(r"^[a-z]{2,4}$")


@dataclass(frozen=True)
class Restriction:
    relation: str
    direction: str  # ">" or "<"
    target: str

    def text(self) -> str:
        return f"{self.relation}{self.direction}{self.target}"


@dataclass(frozen=True)
class UW:
    headword: str
    restrictions: tuple[Restriction, ...] = ()

    @property
    def text(self) -> str:
        """Canonical rendering: lowercase, single spaces, ", " separators."""
        if not self.restrictions:
            return self.headword
        inner = ", ".join(r.text() for r in self.restrictions)
        return f"{self.headword}({inner})"

    def restriction_targets(self, relation: str) -> tuple[str, ...]:
        return tuple(r.target for r in self.restrictions if r.relation == relation)

    def __str__(self) -> str:
        return self.text


def _split_top_level(text: str, sep: str) -> list[str]:
    """Split on `sep` at parenthesis depth zero."""
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise MalformedUW(f"unbalanced parentheses in {text!r}")
        elif ch == sep and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    if depth != 0:
        raise MalformedUW(f"unbalanced parentheses in {text!r}")
    parts.append(text[start:])
    return parts


def parse_uw(text: str) -> UW:
    """Parse a UW, normalizing case and whitespace.

    Restrictions keep their source order; exact duplicate triples are
    dropped.  Raises MalformedUW on unbalanced parentheses, an empty
    headword, or a restriction that does not look like ``rel>target``.
    """
    text = text.strip()
    if not text:
        raise MalformedUW("empty UW")
    open_idx = text.find("(")
    if open_idx == -1:
        if ")" in text:
            raise MalformedUW(f"unbalanced parentheses in {text!r}")
        head, body = text, None
    else:
        if not text.endswith(")"):
            raise MalformedUW(f"text after restriction list in {text!r}")
        head, body = text[:open_idx], text[open_idx + 1 : -1]
        # catches "a(b))" style imbalance early
        _split_top_level(body, ",")
    head = re.sub(r"\s+", " ", head.strip()).lower()
    if not head:
        raise MalformedUW(f"empty headword in {text!r}")
    if "(" in head or ")" in head or "," in head:
        raise MalformedUW(f"bad headword in {text!r}")

    restrictions: list[Restriction] = []
    if body is not None and body.strip():
        for part in _split_top_level(body, ","):
            part = part.strip()
            if not part:
                raise MalformedUW(f"empty restriction in {text!r}")
            m = re.match(r"^([a-z]{2,4})\s*([><])\s*(.+)$", part, re.IGNORECASE)
            if m is None:
                raise MalformedUW(f"bad restriction {part!r} in {text!r}")
            rel = m.group(1).lower()
            if not _REL_RE.match(rel):
                raise MalformedUW(f"bad restriction relation {rel!r}")
            target = re.sub(r"\s+", " ", m.group(3).strip()).lower()
            if not target:
                raise MalformedUW(f"empty restriction target in {text!r}")
            r = Restriction(rel, m.group(2), target)
            if r not in restrictions:
                restrictions.append(r)
    return UW(head, tuple(restrictions))
