"""Morphological and graphemic generation.

The projective tree's leaves are visited left to right; the first matching
morph rule realizes each leaf as a token (stem selection plus affixes from
the affix table), then graphemic rules run once over adjacent token pairs
(elision ``le + arbre -> l'arbre``, contraction ``de + les -> des``).
Sentence-initial capitalization and the terminal period are applied last.

Every content token carries the canonical leaf index ``i`` as its trace
mark; with marks enabled the token text is suffixed ``&i_``, a pattern
that strips back to the plain output exactly.

Pack format (see docs/morph-pack.ebnf): a conditions TSV ordered most
specific first and ending with a ``*`` fallback, an affix TSV, and a
graphemic rule file.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import LingwareError, NoMatchingMorphRule
from .rewrite.tree import TreeNode

MARK_RE = re.compile(r"&\d+_")
_PUNCT = {".", ",", "!", "?", ";", ":"}


@dataclass(frozen=True)
class MorphCondition:
    kind: str  # eq | ne | always
    var: str | None = None
    value: str | None = None

    def ok(self, dec: dict) -> bool:
        if self.kind == "always":
            return True
        current = dec.get(self.var)
        if isinstance(current, frozenset):
            present = self.value in current
        else:
            present = current == self.value
        return present if self.kind == "eq" else not present


@dataclass(frozen=True)
class MorphRule:
    conditions: tuple[MorphCondition, ...]
    base: str  # lemma | text | strip
    base_arg: str | None
    affixes: tuple[str, ...]
    line: int

    def matches(self, dec: dict) -> bool:
        return all(c.ok(dec) for c in self.conditions)


@dataclass(frozen=True)
class GraphemicRule:
    kind: str  # elide | merge
    left: str
    right: str  # regex for elide, literal form for merge
    result: str


@dataclass
class MorphRulePack:
    rules: tuple[MorphRule, ...]
    affixes: dict[str, str]
    graphemic: tuple[GraphemicRule, ...]

    @classmethod
    def parse(cls, rules_text: str, affix_text: str, graphemic_text: str) -> "MorphRulePack":
        affixes: dict[str, str] = {}
        for lineno, line in enumerate(affix_text.splitlines(), 1):
            line = line.rstrip()
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 2:
                raise LingwareError(f"affix table line {lineno}: expected 2 columns")
            if cols[0] in affixes:
                raise LingwareError(f"affix table line {lineno}: duplicate id {cols[0]}")
            affixes[cols[0]] = cols[1]

        rules: list[MorphRule] = []
        for lineno, line in enumerate(rules_text.splitlines(), 1):
            line = line.rstrip()
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 2:
                raise LingwareError(f"morph rules line {lineno}: expected 2 columns")
            cond_text, op_text = cols
            conditions: list[MorphCondition] = []
            if cond_text.strip() != "*":
                for part in cond_text.split("&"):
                    part = part.strip()
                    if "!=" in part:
                        var, value = (p.strip() for p in part.split("!=", 1))
                        conditions.append(MorphCondition("ne", var, value))
                    elif "=" in part:
                        var, value = (p.strip() for p in part.split("=", 1))
                        conditions.append(MorphCondition("eq", var, value))
                    else:
                        raise LingwareError(
                            f"morph rules line {lineno}: bad condition {part!r}"
                        )
            else:
                conditions.append(MorphCondition("always"))
            ops = [p.strip() for p in op_text.split("+")]
            m = re.match(r"^(lemma|text|strip)(?:\((.*)\))?$", ops[0])
            if m is None:
                raise LingwareError(f"morph rules line {lineno}: bad operation {ops[0]!r}")
            base, base_arg = m.group(1), m.group(2)
            if base in ("text", "strip") and not base_arg:
                raise LingwareError(f"morph rules line {lineno}: {base} needs an argument")
            for affix in ops[1:]:
                if affix not in affixes:
                    raise LingwareError(
                        f"morph rules line {lineno}: unknown affix {affix!r}"
                    )
            rules.append(
                MorphRule(tuple(conditions), base, base_arg, tuple(ops[1:]), lineno)
            )
        if not rules or rules[-1].conditions != (MorphCondition("always"),):
            raise LingwareError("morph rules must end with a '*' fallback rule")

        graphemic: list[GraphemicRule] = []
        for lineno, line in enumerate(graphemic_text.splitlines(), 1):
            line = line.rstrip()
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 4 or cols[0] not in ("elide", "merge"):
                raise LingwareError(f"graphemic rules line {lineno}: bad rule")
            graphemic.append(GraphemicRule(cols[0], cols[1], cols[2], cols[3]))
        return cls(tuple(rules), affixes, tuple(graphemic))

    @classmethod
    def load(cls, directory: str | Path) -> "MorphRulePack":
        d = Path(directory)
        return cls.parse(
            (d / "morph.tsv").read_text(encoding="utf-8"),
            (d / "affixes.tsv").read_text(encoding="utf-8"),
            (d / "graphemic.rules").read_text(encoding="utf-8"),
        )

    def paradigms(self) -> set[str]:
        """Paradigm ids the conditions test, for lexicon cross-checks."""
        out = set()
        for rule in self.rules:
            for cond in rule.conditions:
                if cond.var == "PARA" and cond.value:
                    out.add(cond.value)
        return out


@dataclass
class Token:
    text: str
    mark: int | None  # canonical leaf index i
    n: int | None  # UNL node index
    joined: bool = False  # no space after this token
    start: int = 0
    end: int = 0

    def to_json(self) -> dict:
        return {
            "text": self.text,
            "i": self.mark,
            "n": self.n,
            "start": self.start,
            "end": self.end,
        }


@dataclass
class SurfaceText:
    tokens: tuple[Token, ...]
    rendered: str  # plain text
    marked: str  # text with &i_ marks
    text: str  # rendered or marked, per the emit_marks argument

    def to_json(self) -> dict:
        return {
            "rendered": self.rendered,
            "marked": self.marked,
            "tokens": [t.to_json() for t in self.tokens],
        }


def realize_leaf(dec: dict, pack: MorphRulePack) -> str:
    for rule in pack.rules:
        if not rule.matches(dec):
            continue
        if rule.base == "text":
            base = rule.base_arg
        else:
            base = dec.get("LEMMA") or dec.get("LU") or ""
            if rule.base == "strip" and base.endswith(rule.base_arg):
                base = base[: -len(rule.base_arg)]
        return base + "".join(pack.affixes[a] for a in rule.affixes)
    raise NoMatchingMorphRule(f"no morph rule covers decoration {dec!r}")


def strip_marks(text: str) -> str:
    return MARK_RE.sub("", text)


def generate(
    umc: TreeNode | None,
    pack: MorphRulePack,
    emit_marks: bool = False,
    final_punct: str = ".",
) -> SurfaceText:
    """Linearize a projective tree into a surface utterance."""
    tokens: list[Token] = []
    if umc is not None:
        for leaf in umc.leaves():
            text = realize_leaf(leaf.dec, pack)
            if not text:
                continue
            tokens.append(Token(text, leaf.meta.get("i"), leaf.meta.get("n")))

    # graphemic pass: each adjacent pair sees at most one rule
    i = 0
    while i + 1 < len(tokens):
        left, right = tokens[i], tokens[i + 1]
        for rule in pack.graphemic:
            if rule.kind == "elide":
                if left.text.lower() == rule.left and re.match(
                    rule.right, right.text, re.IGNORECASE
                ):
                    left.text = rule.result
                    left.joined = True
                    break
            else:  # merge: the merged token keeps the right token's trace
                if left.text.lower() == rule.left and right.text.lower() == rule.right:
                    merged = Token(rule.result, right.mark, right.n)
                    tokens[i : i + 2] = [merged]
                    break
        i += 1

    if tokens:
        tokens[0].text = tokens[0].text[0].upper() + tokens[0].text[1:]
        if final_punct:
            if tokens:
                tokens[-1].joined = True
            tokens.append(Token(final_punct, None, None))

    def render(with_marks: bool) -> str:
        parts: list[str] = []
        pos = 0
        for idx, token in enumerate(tokens):
            text = token.text
            if with_marks and token.mark is not None:
                text += f"&{token.mark}_"
            if not with_marks:
                token.start = pos
                token.end = pos + len(text)
            parts.append(text)
            if not token.joined and idx != len(tokens) - 1:
                parts.append(" ")
                pos = pos + len(text) + 1
            else:
                pos = pos + len(text)
        return "".join(parts)

    marked = render(True)
    rendered = render(False)  # second: leaves offsets pointing into `rendered`
    return SurfaceText(
        tokens=tuple(tokens),
        rendered=rendered,
        marked=marked,
        text=marked if emit_marks else rendered,
    )
