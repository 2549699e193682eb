"""Lexical transfer on the graph.

Each node is mapped to exactly one target lexical unit *before* the graph
becomes a tree: transfer is context-sensitive and a graph node may end up
as several tree copies, which must all carry the same LU.  Automatic mode
takes the top-scored dictionary entry (ties broken by seeded random);
interactive mode asks a chooser callback.  UWs missing from the dictionary
either raise or, under the fallback policy, pass their headword through as
an untranslated token flagged for the trace.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import NotInDictionary
from .graph import UnlGraph, UnlNode
from .lexicon import AssocCounts, LexEntry, Lexicon, Profile
from .tables import RestrictionVarTable


@dataclass(frozen=True)
class TransferChoice:
    node_id: int
    uw: str
    candidates: tuple[tuple[str, float], ...]  # (lu, score) in rank order
    chosen: str
    mode: str

    def to_json(self) -> dict:
        return {
            "kind": "transfer",
            "node": self.node_id,
            "uw": self.uw,
            "candidates": [list(c) for c in self.candidates],
            "chosen": self.chosen,
            "mode": self.mode,
        }


@dataclass(frozen=True)
class TransferredNode:
    node_id: int
    lu: str
    pos_class: str
    transfer_vars: tuple[tuple[str, object], ...]  # decoration fragment
    source_attributes: frozenset[str]
    entry_uw: str | None = None  # UW text of the chosen entry
    untranslated: bool = False


@dataclass
class TransferredGraph:
    graph: UnlGraph
    nodes: dict[int, TransferredNode]

    def decoration_for(self, node: UnlNode) -> dict:
        tn = self.nodes.get(node.id)
        if tn is None:
            return {"LU": node.uw.headword}
        dec: dict = {"LU": tn.lu, "CAT": tn.pos_class}
        for var, value in tn.transfer_vars:
            dec.setdefault(var, value)
        if tn.source_attributes:
            dec["SRC"] = frozenset(tn.source_attributes)
        if tn.untranslated:
            dec["UNTR"] = "Y"
            dec["LEMMA"] = tn.lu
        return dec

    def with_choice(self, node_id: int, entry: LexEntry) -> "TransferredGraph":
        """Re-pin one node to a different dictionary entry."""
        old = self.nodes[node_id]
        nodes = dict(self.nodes)
        nodes[node_id] = TransferredNode(
            node_id=node_id,
            lu=entry.lu,
            pos_class=entry.pos_class,
            transfer_vars=old.transfer_vars,
            source_attributes=old.source_attributes,
            entry_uw=entry.uw_text,
            untranslated=False,
        )
        return TransferredGraph(self.graph, nodes)


def transfer_lexically(
    graph: UnlGraph,
    lexicon: Lexicon,
    profile: Profile,
    counts: AssocCounts,
    restriction_vars: RestrictionVarTable,
    seed: int = 0,
    mode: str = "automatic",
    chooser=None,
    missing: str = "raise",  # or "fallback"
) -> tuple[TransferredGraph, list[TransferChoice]]:
    rng = random.Random(seed)
    nodes: dict[int, TransferredNode] = {}
    choices: list[TransferChoice] = []
    for node in graph.nodes:
        if node.scope_ref is not None:
            continue
        var_frag = restriction_vars.assignments_for(node.uw)
        try:
            ranked = lexicon.lookup_lus(node.uw, profile, counts)
        except NotInDictionary:
            if missing != "fallback":
                raise
            nodes[node.id] = TransferredNode(
                node_id=node.id,
                lu=node.uw.headword,
                pos_class=var_frag.get("CAT", "N"),
                transfer_vars=tuple(sorted(var_frag.items(), key=lambda p: p[0])),
                source_attributes=node.attributes,
                entry_uw=None,
                untranslated=True,
            )
            choices.append(
                TransferChoice(node.id, node.uw.text, (), node.uw.headword, mode)
            )
            continue
        candidates = tuple((e.lu, s) for e, s in ranked)
        if mode == "interactive" and chooser is not None:
            picked = chooser(node, ranked)
            entry = _entry_for(picked, ranked)
        else:
            top_score = ranked[0][1]
            tie = [e for e, s in ranked if s == top_score]
            entry = tie[0] if len(tie) == 1 else rng.choice(tie)
        nodes[node.id] = TransferredNode(
            node_id=node.id,
            lu=entry.lu,
            pos_class=entry.pos_class,
            transfer_vars=tuple(sorted(var_frag.items(), key=lambda p: p[0])),
            source_attributes=node.attributes,
            entry_uw=entry.uw_text,
        )
        choices.append(TransferChoice(node.id, node.uw.text, candidates, entry.lu, mode))
    return TransferredGraph(graph, nodes), choices


def _entry_for(picked, ranked) -> LexEntry:
    """Accept an index, an entry, or an LU name from a chooser callback."""
    if isinstance(picked, LexEntry):
        return picked
    if isinstance(picked, int):
        return ranked[picked][0]
    for entry, _ in ranked:
        if entry.lu == picked:
            return entry
    # a forced LU outside the list: inherit the top entry's frame
    top = ranked[0][0]
    return LexEntry(
        uw=top.uw,
        lu=str(picked),
        pos_class=top.pos_class,
        domain=top.domain,
        base_weight=0.0,
        dict_id=top.dict_id,
        order=top.order,
    )
