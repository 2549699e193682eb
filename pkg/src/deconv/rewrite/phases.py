"""Deconversion phases over decorated trees.

Three rule-pack phases follow graph-to-tree conversion:

* ``ts``  turns semantic relation labels (including reversed ones) into
  underspecified syntactic hints and lifts interlingual attributes into
  syntax variables;
* ``gs1`` picks the derivation realizing each lexical unit (paraphrase
  choice) and decides ordering and syntactic functions; the surface lemma,
  category and paradigm are resolved from the lexicon's derivation tables
  between its grammars;
* ``gs2`` inserts articles, auxiliaries and discontinuous negation
  particles, then orders children into surface order; its output is
  projective and every leaf is fully decorated for morphology.

Each phase type-checks its output against the variable schema.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from ..errors import LingwareError
from .engine import apply
from .rules import Grammar, compile_grammar_file
from .schema import VariableSchema, load_schema
from .tree import TreeNode, check_projective

PHASE_NAMES = ("ts", "gs1", "gs2")

_DERIV_BY_NAME = {"VRB": "vrb", "NOM": "nom", "ADJ": "adj"}
_DERIV_BY_CAT = {"V": "vrb", "N": "nom", "A": "adj"}
_POSITION_VALUES = {"pre": "PRE", "post": "POST"}


@dataclass
class RulePacks:
    schema: VariableSchema
    ts: list[Grammar]
    gs1: list[Grammar]
    gs2: list[Grammar]

    @classmethod
    def load(
        cls,
        schema_path: str | Path,
        ts_path: str | Path,
        gs1_path: str | Path,
        gs2_path: str | Path,
    ) -> "RulePacks":
        schema = load_schema(schema_path)
        return cls(
            schema=schema,
            ts=compile_grammar_file(ts_path, schema),
            gs1=compile_grammar_file(gs1_path, schema),
            gs2=compile_grammar_file(gs2_path, schema),
        )

    def grammars(self, phase: str) -> list[Grammar]:
        if phase not in PHASE_NAMES:
            raise LingwareError(f"unknown phase {phase!r}")
        return getattr(self, phase)


def resolve_derivations(tree: TreeNode, lexicon) -> None:
    """Fill LEMMA/CAT/PARA (and gender, adjective placement) per derivation.

    The rules decide *which* family member to realize (DERIV); the lexicon
    says what that member looks like.  Untranslated tokens keep their
    verbatim lemma.
    """
    for node in tree.walk():
        lu = node.dec.get("LU")
        if lu is None or node.dec.get("UNTR") == "Y" or node.dec.get("SCP") == "Y":
            continue
        unit = lexicon.unit(lu)
        if unit is None:
            raise LingwareError(f"no derivation table entry for LU {lu!r}")
        wanted = _DERIV_BY_NAME.get(node.dec.get("DERIV", ""), None)
        fallback = _DERIV_BY_CAT.get(node.dec.get("CAT", ""), None)
        derivation = None
        if wanted:
            derivation = unit.derivation(wanted)
        if derivation is None and fallback:
            derivation = unit.derivation(fallback)
        if derivation is None:
            derivation = unit.derivations[0]
        node.dec["LEMMA"] = derivation.lemma
        node.dec["CAT"] = derivation.category
        node.dec["PARA"] = derivation.paradigm
        if derivation.gender and "GEN" not in node.dec:
            node.dec["GEN"] = derivation.gender
        if derivation.position:
            node.dec.setdefault("ADJP", _POSITION_VALUES[derivation.position])


def assign_leaf_indices(tree: TreeNode) -> None:
    """Number the leaves 1..k left to right (the canonical index i)."""
    for idx, leaf in enumerate(tree.leaves(), 1):
        leaf.meta["i"] = idx


def check_umc(tree: TreeNode) -> None:
    """Postcondition of gs2: projective and every leaf realizable."""
    check_projective(tree)
    for leaf in tree.leaves():
        if leaf.dec.get("SCP") == "Y":
            raise LingwareError("scope node ended up as a leaf")
        if "CAT" not in leaf.dec:
            raise LingwareError(f"leaf without surface category: {leaf.dec!r}")


def run_phase(
    phase: str,
    tree: TreeNode,
    packs: RulePacks,
    lexicon=None,
    style_prefs: dict | None = None,
) -> TreeNode:
    """Apply one phase; the input tree is left untouched."""
    work = tree.clone()
    grammars = packs.grammars(phase)
    if phase == "gs1":
        if style_prefs:
            for node in work.walk():
                for var, value in style_prefs.items():
                    if packs.schema.kind(var) != "exc":
                        raise LingwareError(f"bad style preference variable {var!r}")
                    node.dec.setdefault(var, value)
        work = apply(grammars[0], work)
        if lexicon is not None:
            resolve_derivations(work, lexicon)
        for grammar in grammars[1:]:
            work = apply(grammar, work)
    else:
        for grammar in grammars:
            work = apply(grammar, work)
    packs.schema.validate_tree(work)
    if phase == "gs2":
        check_umc(work)
        assign_leaf_indices(work)
    return work
