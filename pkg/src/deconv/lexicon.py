"""Target-language dictionary, user profiles, and association counts.

The dictionary maps target UWs to lexical units (LUs); an LU keys a
derivational family whose members live in a second table (derivation name,
surface lemma, category, morphological paradigm).  Profiles order
dictionaries, boost domains, and supply default attribute values for
cultural localization.  Association counts are the learning store: each
human lexical choice bumps a counter that biases future automatic
selection.  Counts are kept in an append-only log compacted on save, so a
crash loses at most the in-flight increment.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass, field
from pathlib import Path

from .errors import LingwareError, NotInDictionary, StorageError
from .uw import UW, parse_uw


@dataclass(frozen=True)
class LexEntry:
    uw: UW
    lu: str
    pos_class: str  # N, V, A ... the derivational family's head category
    domain: str | None = None
    base_weight: float = 1.0
    dict_id: str = "main"
    order: int = 0  # load order, used as the stable tie-break

    @property
    def uw_text(self) -> str:
        return self.uw.text


@dataclass(frozen=True)
class Derivation:
    name: str  # vrb, nom, adj
    lemma: str
    category: str
    paradigm: str
    gender: str | None = None
    position: str | None = None  # pre/post, adjectives only


@dataclass(frozen=True)
class LexicalUnit:
    lu: str
    derivations: tuple[Derivation, ...]

    def derivation(self, name: str) -> Derivation | None:
        for d in self.derivations:
            if d.name == name:
                return d
        return None


@dataclass(frozen=True)
class Profile:
    name: str
    dictionary_priorities: tuple[str, ...] = ()
    domain_boosts: tuple[tuple[str, float], ...] = ()
    attribute_defaults: tuple[tuple[str, str, str], ...] = ()  # (category, class, value)
    distance_params: "PseudoDistanceParams | None" = None

    def boost(self, domain: str | None) -> float:
        if domain is None:
            return 0.0
        return dict(self.domain_boosts).get(domain, 0.0)

    def default_for(self, category: str, attr_class: str) -> str | None:
        for cat, cls, value in self.attribute_defaults:
            if cat == category and cls == attr_class:
                return value
        return None

    def covered_classes(self, category: str) -> list[str]:
        return [cls for cat, cls, _ in self.attribute_defaults if cat == category]


@dataclass(frozen=True)
class PseudoDistanceParams:
    headword_mismatch: float = 10.0
    restriction_asymmetry: float = 1.0
    context_conflict: float = 2.0


class AssocCounts:
    """Mutable (UW, UW) and (UW, LU) counters with durable increments.

    Single writer per store; increments are serialized by a lock and
    flushed to the log before returning.
    """

    def __init__(self, log_path: str | Path | None = None):
        self.uw2uw: dict[tuple[str, str], int] = {}
        self.uw2lu: dict[tuple[str, str], int] = {}
        self._lock = threading.Lock()
        self._log_path = Path(log_path) if log_path else None
        self._log_handle = None
        if self._log_path is not None and self._log_path.exists():
            self._replay(self._log_path)

    def _replay(self, path: Path):
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise StorageError(f"{path}:{lineno}: bad counts record")
            kind, k1, k2, delta = parts
            store = self._store(kind, lineno, path)
            key = (k1, k2)
            store[key] = store.get(key, 0) + int(delta)

    def _store(self, kind: str, lineno=None, path=None) -> dict:
        if kind == "uw2uw":
            return self.uw2uw
        if kind == "uw2lu":
            return self.uw2lu
        where = f"{path}:{lineno}: " if path else ""
        raise StorageError(f"{where}unknown pair kind {kind!r}")

    def get(self, kind: str, key: tuple[str, str]) -> int:
        return self._store(kind).get(key, 0)

    def increment(self, kind: str, key: tuple[str, str]) -> int:
        """Bump a counter; the new value is on disk before we return."""
        with self._lock:
            store = self._store(kind)
            store[key] = store.get(key, 0) + 1
            if self._log_path is not None:
                try:
                    if self._log_handle is None:
                        self._log_handle = open(self._log_path, "a", encoding="utf-8")
                    self._log_handle.write(f"{kind}\t{key[0]}\t{key[1]}\t1\n")
                    self._log_handle.flush()
                    os.fsync(self._log_handle.fileno())
                except OSError as exc:
                    raise StorageError(f"cannot append to counts log: {exc}") from exc
            return store[key]

    def save(self, path: str | Path | None = None):
        """Write the compacted state atomically and truncate the log."""
        target = Path(path) if path else self._log_path
        if target is None:
            raise StorageError("no path to save counts to")
        with self._lock:
            lines = []
            for kind, store in (("uw2uw", self.uw2uw), ("uw2lu", self.uw2lu)):
                for (k1, k2), count in sorted(store.items()):
                    if count:
                        lines.append(f"{kind}\t{k1}\t{k2}\t{count}")
            tmp = target.with_suffix(target.suffix + ".tmp")
            tmp.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
            os.replace(tmp, target)
            if self._log_handle is not None:
                self._log_handle.close()
                self._log_handle = None

    @classmethod
    def load(cls, path: str | Path) -> "AssocCounts":
        return cls(path)

    def close(self):
        with self._lock:
            if self._log_handle is not None:
                self._log_handle.close()
                self._log_handle = None


class Lexicon:
    """Immutable after loading; shareable between utterances and sessions."""

    def __init__(self):
        self.entries: list[LexEntry] = []
        self.by_uw: dict[str, list[LexEntry]] = {}
        self.units: dict[str, LexicalUnit] = {}
        self.dict_ids: list[str] = []

    # -- loading ------------------------------------------------------------

    def load_dictionary(self, path: str | Path, dict_id: str | None = None) -> str:
        """Load a UW->LU TSV: uw, lu, pos, domain ('-' = none), weight."""
        path = Path(path)
        dict_id = dict_id or path.stem
        if dict_id in self.dict_ids:
            raise LingwareError(f"dictionary id {dict_id!r} loaded twice")
        seen: set[tuple[str, str]] = {(e.uw_text, e.lu) for e in self.entries}
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            line = line.rstrip()
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 5:
                raise LingwareError(f"{path}:{lineno}: expected 5 columns, got {len(cols)}")
            uw_text, lu, pos, domain, weight = cols
            uw = parse_uw(uw_text)
            key = (uw.text, lu)
            if key in seen:
                raise LingwareError(f"{path}:{lineno}: duplicate entry {key}")
            seen.add(key)
            try:
                w = float(weight)
            except ValueError:
                raise LingwareError(f"{path}:{lineno}: bad weight {weight!r}") from None
            if w < 0:
                raise LingwareError(f"{path}:{lineno}: negative weight")
            entry = LexEntry(
                uw=uw,
                lu=lu,
                pos_class=pos,
                domain=None if domain in ("-", "") else domain,
                base_weight=w,
                dict_id=dict_id,
                order=len(self.entries),
            )
            self.entries.append(entry)
            self.by_uw.setdefault(uw.text, []).append(entry)
        self.dict_ids.append(dict_id)
        return dict_id

    def load_units(self, path: str | Path):
        """Load the LU derivation TSV: lu, name, lemma, cat, paradigm, gender, position."""
        path = Path(path)
        rows: dict[str, list[Derivation]] = {}
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            line = line.rstrip()
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 7:
                raise LingwareError(f"{path}:{lineno}: expected 7 columns, got {len(cols)}")
            lu, name, lemma, cat, paradigm, gender, position = cols
            if any(d.name == name for d in rows.get(lu, ())):
                raise LingwareError(f"{path}:{lineno}: duplicate derivation {lu}/{name}")
            rows.setdefault(lu, []).append(
                Derivation(
                    name=name,
                    lemma=lemma,
                    category=cat,
                    paradigm=paradigm,
                    gender=None if gender in ("-", "") else gender,
                    position=None if position in ("-", "") else position,
                )
            )
        for lu, derivs in rows.items():
            self.units[lu] = LexicalUnit(lu, tuple(derivs))

    def check_units(self):
        """Every dictionary LU must key at least one derivation."""
        missing = sorted({e.lu for e in self.entries} - set(self.units))
        if missing:
            raise LingwareError(f"LUs without derivations: {missing}")

    # -- queries --------------------------------------------------------------

    @property
    def uw_texts(self) -> list[str]:
        return list(self.by_uw)

    def unit(self, lu: str) -> LexicalUnit | None:
        return self.units.get(lu)

    def score(self, entry: LexEntry, profile: Profile, counts: AssocCounts) -> float:
        return (
            entry.base_weight
            + profile.boost(entry.domain)
            + counts.get("uw2lu", (entry.uw_text, entry.lu))
        )

    def lookup_lus(
        self, uw: UW, profile: Profile, counts: AssocCounts
    ) -> list[tuple[LexEntry, float]]:
        """All entries for a UW, best first; raises NotInDictionary if none.

        Ties keep the profile's dictionary order, then load order, so the
        result is a deterministic function of (dictionary, profile, counts).
        """
        entries = self.by_uw.get(uw.text)
        if not entries:
            raise NotInDictionary(uw.text)
        priorities = {d: i for i, d in enumerate(profile.dictionary_priorities)}

        def sort_key(entry: LexEntry):
            return (
                -self.score(entry, profile, counts),
                priorities.get(entry.dict_id, len(priorities)),
                entry.order,
            )

        ranked = sorted(entries, key=sort_key)
        return [(e, self.score(e, profile, counts)) for e in ranked]


# -- profile config -----------------------------------------------------------


def parse_profiles(text: str) -> dict[str, Profile]:
    """Profiles are [name] sections of key=value lines.

    Keys: ``dictionaries`` (comma list), ``boost.domain.X`` (number),
    ``default.CAT.class`` (attribute value), ``distance.headword``,
    ``distance.restriction``, ``distance.conflict``.
    """
    profiles: dict[str, Profile] = {}
    name = None
    dicts: list[str] = []
    boosts: list[tuple[str, float]] = []
    defaults: list[tuple[str, str, str]] = []
    dist: dict[str, float] = {}

    def flush():
        nonlocal name, dicts, boosts, defaults, dist
        if name is None:
            return
        params = PseudoDistanceParams(
            headword_mismatch=dist.get("headword", 10.0),
            restriction_asymmetry=dist.get("restriction", 1.0),
            context_conflict=dist.get("conflict", 2.0),
        )
        if name in profiles:
            raise LingwareError(f"profile {name!r} declared twice")
        profiles[name] = Profile(
            name, tuple(dicts), tuple(boosts), tuple(defaults), params
        )
        name, dicts, boosts, defaults, dist = None, [], [], [], {}

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            flush()
            name = line[1:-1].strip()
            continue
        if name is None:
            raise LingwareError(f"profile line {lineno}: entry before any [section]")
        if "=" not in line:
            raise LingwareError(f"profile line {lineno}: expected key=value")
        key, value = (p.strip() for p in line.split("=", 1))
        if key == "dictionaries":
            dicts = [d.strip() for d in value.split(",") if d.strip()]
        elif key.startswith("boost.domain."):
            boosts.append((key.split(".", 2)[2], float(value)))
        elif key.startswith("default."):
            _, cat, cls = key.split(".", 2)
            defaults.append((cat, cls, value))
        elif key.startswith("distance."):
            dist[key.split(".", 1)[1]] = float(value)
        else:
            raise LingwareError(f"profile line {lineno}: unknown key {key!r}")
    flush()
    return profiles


def load_profiles(path: str | Path) -> dict[str, Profile]:
    return parse_profiles(Path(path).read_text(encoding="utf-8"))
