"""Declared relation and attribute inventories.

UNL features must be declared somewhere; we load them from a plain config
file rather than hard-coding them, since inventories evolve.  The file has
one name per line under ``[relations]`` and ``[attributes]`` sections, plus
optional ``[class NAME]`` sections grouping attributes into classes
(number, determination, tense, politeness) used by cultural localization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import LingwareError


@dataclass(frozen=True)
class Inventories:
    relations: frozenset[str]
    attributes: frozenset[str]
    classes: tuple[tuple[str, frozenset[str]], ...] = ()

    @property
    def class_map(self) -> dict[str, frozenset[str]]:
        return dict(self.classes)

    def class_of(self, attr: str) -> str | None:
        for name, members in self.classes:
            if attr in members:
                return name
        return None


def parse_inventories(text: str) -> Inventories:
    relations: set[str] = set()
    attributes: set[str] = set()
    classes: dict[str, set[str]] = {}
    section: str | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in ("relations", "attributes") and not section.startswith(
                "class "
            ):
                raise LingwareError(f"inventory line {lineno}: unknown section {line}")
            continue
        if section == "relations":
            relations.add(line.lower())
        elif section == "attributes":
            attributes.add(line.lower())
        elif section is not None and section.startswith("class "):
            cname = section.split(None, 1)[1]
            classes.setdefault(cname, set()).add(line.lower())
        else:
            raise LingwareError(f"inventory line {lineno}: entry before any section")
    for cname, members in classes.items():
        missing = members - attributes
        if missing:
            raise LingwareError(
                f"class {cname} lists undeclared attributes: {sorted(missing)}"
            )
    return Inventories(
        frozenset(relations),
        frozenset(attributes),
        tuple((k, frozenset(v)) for k, v in sorted(classes.items())),
    )


def load_inventories(path: str | Path) -> Inventories:
    return parse_inventories(Path(path).read_text(encoding="utf-8"))
