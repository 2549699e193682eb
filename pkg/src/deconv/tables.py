"""Small data-driven mapping tables.

* RestrictionVarTable maps UW restrictions to decoration variables (the
  semantic class of an action, coarse category hints, semantic flags).
  It drives both the category classifier used by cultural localization and
  the transfer variables put on nodes during lexical transfer.
* IncompatTable lists (relation, class, class) triples that contradict
  each other, e.g. an ``agt>human`` restriction against an actual agent
  restricted to ``icl>thing``.  It feeds the context-conflict term of the
  localization pseudo-distance.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import LingwareError
from .uw import UW


@dataclass(frozen=True)
class VarAssignment:
    var: str
    op: str  # "set" or "add"
    value: str


class RestrictionVarTable:
    def __init__(self, rows: list[tuple[str, tuple[VarAssignment, ...]]]):
        self.rows = rows

    @classmethod
    def parse(cls, text: str) -> "RestrictionVarTable":
        rows: list[tuple[str, tuple[VarAssignment, ...]]] = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.rstrip()
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 2:
                raise LingwareError(f"restriction table line {lineno}: expected 2 columns")
            assigns = []
            for part in cols[1].split():
                if "+=" in part:
                    var, value = part.split("+=", 1)
                    assigns.append(VarAssignment(var, "add", value))
                elif "=" in part:
                    var, value = part.split("=", 1)
                    assigns.append(VarAssignment(var, "set", value))
                else:
                    raise LingwareError(
                        f"restriction table line {lineno}: bad assignment {part!r}"
                    )
            rows.append((cols[0].strip(), tuple(assigns)))
        return cls(rows)

    @classmethod
    def load(cls, path: str | Path) -> "RestrictionVarTable":
        return cls.parse(Path(path).read_text(encoding="utf-8"))

    def assignments_for(self, uw: UW) -> dict[str, object]:
        """Decoration fragment for a UW; first match wins per exclusive var."""
        out: dict[str, object] = {}
        texts = {f"{r.relation}{r.direction}{r.target}" for r in uw.restrictions}
        for pattern, assigns in self.rows:
            if pattern in texts:
                for a in assigns:
                    if a.op == "set":
                        out.setdefault(a.var, a.value)
                    else:
                        cur = out.get(a.var, frozenset())
                        if not isinstance(cur, frozenset):
                            cur = frozenset()
                        out[a.var] = cur | {a.value}
        return out

    def category(self, uw: UW) -> str:
        """Coarse category for localization defaults; nouns by default."""
        value = self.assignments_for(uw).get("CAT")
        return value if isinstance(value, str) else "N"


class IncompatTable:
    def __init__(self, triples: set[tuple[str, str, str]]):
        self.triples = triples

    @classmethod
    def parse(cls, text: str) -> "IncompatTable":
        triples: set[tuple[str, str, str]] = set()
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.rstrip()
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise LingwareError(f"incompatibility table line {lineno}: expected 3 columns")
            rel, a, b = (c.strip() for c in cols)
            triples.add((rel, a, b))
            triples.add((rel, b, a))
        return cls(triples)

    @classmethod
    def load(cls, path: str | Path) -> "IncompatTable":
        return cls.parse(Path(path).read_text(encoding="utf-8"))

    def conflicts(self, relation: str, expected: str, actual: str) -> bool:
        return (relation, expected, actual) in self.triples
