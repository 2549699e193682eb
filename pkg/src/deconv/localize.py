"""Localization: adapt a graph to the target language before transfer.

Lexical localization substitutes each UW by the nearest UW of the target
dictionary under a pseudo-distance; UWs already in the dictionary stay
untouched.  Ties are broken by a seeded uniform choice so a run is
reproducible.  Cultural localization fills in attributes the source
language never expressed (number, determination, tense, politeness) from
profile defaults; such attributes stay marked as defaulted so postedition
can show them as assumptions and exports can drop them.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace

from .errors import EmptyDictionary
from .graph import UnlGraph, UnlNode
from .inventories import Inventories
from .lexicon import Lexicon, Profile, PseudoDistanceParams
from .tables import IncompatTable, RestrictionVarTable
from .uw import UW


@dataclass(frozen=True)
class LocalizationChoice:
    node_id: int
    original_uw: str
    candidates: tuple[tuple[str, float], ...]  # minimizing UWs and their distance
    chosen: str
    mode: str  # automatic | interactive

    def to_json(self) -> dict:
        return {
            "kind": "localization",
            "node": self.node_id,
            "original": self.original_uw,
            "candidates": [list(c) for c in self.candidates],
            "chosen": self.chosen,
            "mode": self.mode,
        }


def _context_conflicts(
    candidate: UW,
    graph: UnlGraph,
    node_id: int,
    incompat: IncompatTable,
) -> int:
    """Candidate restrictions contradicted by the node's actual arcs."""
    conflicts = 0
    for r in candidate.restrictions:
        if r.direction != ">" or r.relation == "icl":
            continue
        contradicted = False
        for arc in graph.arcs:
            if arc.source != node_id or arc.label != r.relation:
                continue
            actual = graph.node(arc.target)
            for cls in actual.uw.restriction_targets("icl"):
                if incompat.conflicts(r.relation, r.target, cls):
                    contradicted = True
        if contradicted:
            conflicts += 1
    return conflicts


def distance(
    w: UW,
    x: UW,
    graph: UnlGraph | None = None,
    node_id: int | None = None,
    params: PseudoDistanceParams | None = None,
    incompat: IncompatTable | None = None,
) -> float:
    """Pseudo-distance between a graph UW and a dictionary candidate.

    Identical UWs are at distance zero.  Otherwise: a headword mismatch
    cost, a cost per restriction present on only one side, and a cost per
    candidate restriction that the node's actual arcs contradict.
    """
    params = params or PseudoDistanceParams()
    if w.text == x.text:
        return 0.0
    d = 0.0
    if w.headword != x.headword:
        d += params.headword_mismatch
    rw = set(w.restrictions)
    rx = set(x.restrictions)
    d += params.restriction_asymmetry * len(rw ^ rx)
    if graph is not None and node_id is not None and incompat is not None:
        d += params.context_conflict * _context_conflicts(x, graph, node_id, incompat)
    return d


def localize_lexically(
    graph: UnlGraph,
    lexicon: Lexicon,
    params: PseudoDistanceParams | None = None,
    incompat: IncompatTable | None = None,
    seed: int = 0,
    mode: str = "automatic",
    chooser=None,
) -> tuple[UnlGraph, list[LocalizationChoice]]:
    """Replace every node UW by a pseudo-distance minimizer from the dictionary."""
    if not lexicon.by_uw:
        raise EmptyDictionary("cannot localize against an empty dictionary")
    dict_uws = [lexicon.by_uw[text][0].uw for text in lexicon.by_uw]
    rng = random.Random(seed)
    choices: list[LocalizationChoice] = []
    out = graph
    for node in graph.nodes:
        if node.scope_ref is not None:
            continue
        w = node.uw
        if w.text in lexicon.by_uw:
            choices.append(
                LocalizationChoice(node.id, w.text, ((w.text, 0.0),), w.text, mode)
            )
            continue
        scored = [
            (x, distance(w, x, graph, node.id, params, incompat)) for x in dict_uws
        ]
        dmin = min(s for _, s in scored)
        ties = sorted((x.text for x, s in scored if s == dmin))
        if mode == "interactive" and chooser is not None:
            chosen = chooser(node, [(t, dmin) for t in ties])
            if chosen not in ties:
                ties = sorted(set(ties) | {chosen})
        elif len(ties) == 1:
            chosen = ties[0]
        else:
            chosen = rng.choice(ties)
        choices.append(
            LocalizationChoice(
                node.id, w.text, tuple((t, dmin) for t in ties), chosen, mode
            )
        )
        new_uw = next(x for x in dict_uws if x.text == chosen)
        out = out.replace_node(replace(out.node(node.id), uw=new_uw))
    return out, choices


def minimizer_tie_set(
    w: UW,
    graph: UnlGraph,
    node_id: int,
    lexicon: Lexicon,
    params: PseudoDistanceParams | None = None,
    incompat: IncompatTable | None = None,
) -> list[str]:
    """All dictionary UWs at minimal distance from w (used by widening)."""
    dict_uws = [lexicon.by_uw[text][0].uw for text in lexicon.by_uw]
    if not dict_uws:
        raise EmptyDictionary("cannot search an empty dictionary")
    scored = [(x, distance(w, x, graph, node_id, params, incompat)) for x in dict_uws]
    dmin = min(s for _, s in scored)
    return sorted(x.text for x, s in scored if s == dmin)


def localize_culturally(
    graph: UnlGraph,
    profile: Profile,
    inventories: Inventories,
    categories: RestrictionVarTable,
) -> UnlGraph:
    """Add profile-default attributes for classes the node leaves open.

    Defaults never overwrite explicit attributes and are tagged as
    defaulted on the node.
    """
    class_map = inventories.class_map
    out = graph
    for node in graph.nodes:
        if node.scope_ref is not None:
            continue
        category = categories.category(node.uw)
        added: set[str] = set()
        for attr_class in profile.covered_classes(category):
            members = class_map.get(attr_class)
            if not members or node.attributes & members:
                continue
            default = profile.default_for(category, attr_class)
            if default is not None and default in inventories.attributes:
                added.add(default)
        if added:
            out = out.replace_node(
                replace(
                    out.node(node.id),
                    attributes=node.attributes | added,
                    defaulted=node.defaulted | added,
                )
            )
    return out
