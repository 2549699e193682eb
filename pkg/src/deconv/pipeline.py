"""Deconversion pipeline: orchestration, stage cache, trace, postedition.

A deconversion runs validate, lexical and cultural localization, lexical
transfer, graph-to-tree conversion, the ts/gs1/gs2 rule phases, and
morphological generation.  Every intermediate structure is cached on the
utterance state, so a later human edit only invalidates and recomputes the
stages downstream of where it applies:

* choosing another LU edits the transferred graph;
* an interlingual attribute edits the localized graph;
* a style attribute edits the abstract generation tree.

Human lexical choices bump association counts, which biases future
automatic selection (the learning loop).  Edits are kept on the state and
re-applied whenever their stage is recomputed, so re-deconversion with no
new edits is the identity.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace

from .errors import (
    InputError,
    LuNotCandidate,
    NotInDictionary,
    UnknownAttribute,
    UnknownNode,
    ValidationFailed,
)
from .graph import UnlGraph, graph_to_json, serialize_graph
from .graph2tree import GTResult, graph_to_tree
from .inventories import Inventories
from .lexicon import AssocCounts, LexEntry, Lexicon, Profile, PseudoDistanceParams
from .localize import (
    localize_culturally,
    localize_lexically,
    minimizer_tie_set,
)
from .morphgen import MorphRulePack, SurfaceText, generate
from .rewrite.phases import RulePacks, run_phase
from .rewrite.tree import TreeNode
from .tables import IncompatTable, RestrictionVarTable
from .transfer import TransferredGraph, transfer_lexically
from .validate import ValidationReport, validate

STAGES = ("validated", "localized", "transferred", "tree", "gma", "uma", "umc", "text")

_TREE_STAGES = ("uma", "gma", "tree")  # earlier-stage lookup order for traces


@dataclass
class DeconvConfig:
    lexicon: Lexicon
    profile: Profile
    counts: AssocCounts
    packs: RulePacks
    morph: MorphRulePack
    inventories: Inventories
    restriction_vars: RestrictionVarTable
    incompat: IncompatTable
    seed: int = 0
    mode: str = "automatic"  # or "interactive"
    localize_chooser: object = None
    transfer_chooser: object = None
    style_prefs: dict | None = None

    @property
    def distance_params(self) -> PseudoDistanceParams:
        return self.profile.distance_params or PseudoDistanceParams()


@dataclass
class UtteranceState:
    graph: UnlGraph  # the original parsed graph
    config: DeconvConfig
    stages: dict = field(default_factory=dict)
    report: ValidationReport | None = None
    choice_log: list = field(default_factory=list)
    version: int = 0
    pending_edits: int = 0
    # edits, re-applied whenever their stage is recomputed
    uw_edits: dict = field(default_factory=dict)  # n -> uw text (widened choices)
    interlingual_edits: list = field(default_factory=list)  # (n, attr)
    style_edits: list = field(default_factory=list)  # (n, var, value)
    lu_edits: dict = field(default_factory=dict)  # n -> (uw text, lu)

    @property
    def dirty_from(self) -> str | None:
        for stage in STAGES:
            if stage not in self.stages:
                return stage
        return None

    @property
    def text(self) -> SurfaceText | None:
        return self.stages.get("text")

    def invalidate(self, from_stage: str):
        idx = STAGES.index(from_stage)
        for stage in STAGES[idx:]:
            self.stages.pop(stage, None)


# ---------------------------------------------------------------------------
# stage computation


def _entry_for_lu(config: DeconvConfig, uw_text: str, lu: str) -> LexEntry | None:
    for entry in config.lexicon.by_uw.get(uw_text, ()):
        if entry.lu == lu:
            return entry
    return None


def _compute_stage(state: UtteranceState, stage: str):
    config = state.config
    if stage == "validated":
        report = validate(state.graph, config.inventories)
        state.report = report
        if not report.ok:
            raise ValidationFailed(report)
        return state.graph

    if stage == "localized":
        graph, choices = localize_lexically(
            state.stages["validated"],
            config.lexicon,
            config.distance_params,
            config.incompat,
            seed=config.seed,
            mode=config.mode,
            chooser=config.localize_chooser,
        )
        graph = localize_culturally(
            graph, config.profile, config.inventories, config.restriction_vars
        )
        state.choice_log = [c.to_json() for c in choices]
        for n, uw_text in sorted(state.uw_edits.items()):
            entry = config.lexicon.by_uw.get(uw_text)
            if not entry:
                raise UnknownNode(f"widened UW {uw_text!r} is not in the dictionary")
            graph = graph.replace_node(replace(graph.node(n), uw=entry[0].uw))
        for n, attr in state.interlingual_edits:
            graph = _add_attribute(graph, n, attr, config.inventories)
        return graph

    if stage == "transferred":
        tg, choices = transfer_lexically(
            state.stages["localized"],
            config.lexicon,
            config.profile,
            config.counts,
            config.restriction_vars,
            seed=config.seed + 1,
            mode=config.mode,
            chooser=config.transfer_chooser,
            missing="fallback",
        )
        state.choice_log += [c.to_json() for c in choices]
        for n, (uw_text, lu) in sorted(state.lu_edits.items()):
            entry = _entry_for_lu(state.config, uw_text, lu)
            if entry is None:
                raise LuNotCandidate(f"{lu!r} has no entry under {uw_text!r}")
            tg = tg.with_choice(n, entry)
        return tg

    if stage == "tree":
        return graph_to_tree(state.stages["transferred"])

    if stage == "gma":
        gma = run_phase("ts", state.stages["tree"].tree, config.packs)
        for n, var, value in state.style_edits:
            hit = False
            for node in gma.walk():
                if node.meta.get("n") == n:
                    node.dec[var] = value
                    hit = True
            if not hit:
                raise UnknownNode(f"no tree node for graph node {n}")
        config.packs.schema.validate_tree(gma)
        return gma

    if stage == "uma":
        return run_phase(
            "gs1",
            state.stages["gma"],
            config.packs,
            lexicon=config.lexicon,
            style_prefs=config.style_prefs,
        )

    if stage == "umc":
        return run_phase("gs2", state.stages["uma"], config.packs, lexicon=config.lexicon)

    if stage == "text":
        return generate(state.stages["umc"], config.morph)

    raise ValueError(f"unknown stage {stage!r}")


def _add_attribute(graph: UnlGraph, n: int, attr: str, inventories: Inventories) -> UnlGraph:
    if not 1 <= n <= len(graph.nodes):
        raise UnknownNode(f"no node {n} in graph")
    if attr not in inventories.attributes:
        raise UnknownAttribute(f"attribute {attr!r} is not declared")
    node = graph.node(n)
    # a human-set attribute replaces others of its class, defaulted or not
    attr_class = inventories.class_of(attr)
    removed = set()
    if attr_class is not None:
        removed = node.attributes & inventories.class_map[attr_class] - {attr}
    return graph.replace_node(
        replace(
            node,
            attributes=(node.attributes - removed) | {attr},
            defaulted=node.defaulted - removed - {attr},
        )
    )


def redeconvert(state: UtteranceState) -> UtteranceState:
    """Recompute every missing stage, re-applying recorded edits."""
    for stage in STAGES:
        if stage not in state.stages:
            state.stages[stage] = _compute_stage(state, stage)
    state.pending_edits = 0
    return state


def deconvert(graph: UnlGraph, config: DeconvConfig) -> UtteranceState:
    """Run the full pipeline; deterministic for a fixed config."""
    state = UtteranceState(graph=graph, config=config)
    return redeconvert(state)


def deconvert_document(doc, config: DeconvConfig) -> list[UtteranceState]:
    return [deconvert(utt.graph, config) for utt in doc.utterances]


# ---------------------------------------------------------------------------
# stage digests (used to check edit locality and determinism)


def stage_digest(state: UtteranceState, stage: str) -> str:
    obj = state.stages.get(stage)
    if obj is None:
        return ""
    if isinstance(obj, UnlGraph):
        payload = graph_to_json(obj)
    elif isinstance(obj, TransferredGraph):
        payload = {
            "graph": graph_to_json(obj.graph),
            "nodes": {
                str(n): [tn.lu, tn.entry_uw, tn.untranslated]
                for n, tn in sorted(obj.nodes.items())
            },
        }
    elif isinstance(obj, GTResult):
        payload = {"tree": obj.tree.to_json(), "reversed": obj.reversed_count}
    elif isinstance(obj, TreeNode):
        payload = obj.to_json()
    elif isinstance(obj, SurfaceText):
        payload = obj.to_json()
    else:
        raise ValueError(f"cannot digest stage {stage}")
    blob = json.dumps(payload, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def all_digests(state: UtteranceState) -> dict[str, str]:
    return {stage: stage_digest(state, stage) for stage in STAGES}


# ---------------------------------------------------------------------------
# trace resolution


def _find_by_uid(tree: TreeNode, uids: set[int]) -> TreeNode | None:
    for node in tree.walk():
        if node.meta.get("t") in uids:
            return node
    return None


def resolve_trace(state: UtteranceState, token_index: int | None = None, span=None):
    """Chain from a token back to its UNL node.

    Returns a list of (stage, node-json) entries, deepest stage first,
    terminated by {"stage": "graph", "n": n}.  Punctuation inserted by
    the generator maps to no node and yields an empty chain.
    """
    text = state.stages.get("text")
    if text is None:
        raise InputError("utterance not deconverted yet")
    token = None
    if token_index is not None:
        for t in text.tokens:
            if t.mark == token_index:
                token = t
                break
        if token is None:
            raise UnknownNode(f"no token with index {token_index}")
    else:
        start, end = span
        for t in text.tokens:
            if t.start <= start and end <= t.end:
                token = t
                break
        if token is None:
            raise UnknownNode(f"no token covering span {span}")
    if token.mark is None:
        return []

    chain = []
    umc = state.stages["umc"]
    leaf = None
    for node in umc.leaves():
        if node.meta.get("i") == token.mark:
            leaf = node
            break
    if leaf is None:
        return []
    chain.append(("umc", {"i": token.mark, "t": leaf.meta.get("t"), "dec": _dec_json(leaf)}))
    uids = {leaf.meta.get("t")}
    if "from_t" in leaf.meta:
        uids.add(leaf.meta["from_t"])
    for stage in _TREE_STAGES:
        tree = state.stages[stage]
        if isinstance(tree, GTResult):
            tree = tree.tree
        found = _find_by_uid(tree, uids)
        if found is not None:
            chain.append((stage, {"t": found.meta.get("t"), "dec": _dec_json(found)}))
            uids.add(found.meta.get("t"))
    chain.append(("graph", {"n": token.n if token.n is not None else leaf.meta.get("n")}))
    return chain


def _dec_json(node: TreeNode) -> dict:
    return {
        k: (sorted(v) if isinstance(v, frozenset) else v) for k, v in node.dec.items()
    }


def trace_table(state: UtteranceState) -> list[dict]:
    """Token-to-node linkage for a whole utterance."""
    text = state.stages.get("text")
    if text is None:
        return []
    rows = []
    for token in text.tokens:
        rows.append(
            {
                "token": token.text,
                "start": token.start,
                "end": token.end,
                "i": token.mark,
                "n": token.n,
            }
        )
    return rows


# ---------------------------------------------------------------------------
# edits


@dataclass(frozen=True)
class ChooseLu:
    node: int
    lu: str


@dataclass(frozen=True)
class SetAttribute:
    node: int
    name: str
    value: str | None = None
    level: str = "interlingual"  # or "style"


def node_candidates(state: UtteranceState, n: int, widen: bool = False) -> dict:
    """Dictionary candidates for a node, optionally widening the search.

    Widening goes back to the original UW and re-runs the lexical
    localization search over the whole UW dictionary, returning the union
    of the LU sets of every minimizer.
    """
    config = state.config
    localized = state.stages.get("localized")
    if localized is None or not 1 <= n <= len(localized.nodes):
        raise UnknownNode(f"no node {n}")
    node = localized.node(n)
    if node.scope_ref is not None:
        raise UnknownNode(f"node {n} is a scope reference")
    out: list[dict] = []
    seen: set[tuple[str, str]] = set()

    def add_for(uw_text: str):
        entries = config.lexicon.by_uw.get(uw_text, ())
        for entry in entries:
            key = (entry.uw_text, entry.lu)
            if key in seen:
                continue
            seen.add(key)
            out.append(
                {
                    "uw": entry.uw_text,
                    "lu": entry.lu,
                    "pos": entry.pos_class,
                    "score": config.lexicon.score(entry, config.profile, config.counts),
                }
            )

    add_for(node.uw.text)
    if widen:
        original = state.graph.node(n).uw
        for uw_text in minimizer_tie_set(
            original,
            state.graph,
            n,
            config.lexicon,
            config.distance_params,
            config.incompat,
        ):
            add_for(uw_text)
    current = None
    transferred = state.stages.get("transferred")
    if transferred is not None and n in transferred.nodes:
        current = transferred.nodes[n].lu
    out.sort(key=lambda c: -c["score"])
    return {
        "node": n,
        "uw": node.uw.text,
        "current": current,
        "candidates": out,
        # attribute provenance lets the UI show assumed values differently
        "attributes": [
            {"name": a, "defaulted": a in node.defaulted}
            for a in sorted(node.attributes)
        ],
    }


def apply_edit(state: UtteranceState, edit) -> UtteranceState:
    """Register an edit at its natural stage and invalidate later stages."""
    config = state.config
    if isinstance(edit, ChooseLu):
        transferred = state.stages.get("transferred")
        if transferred is None or edit.node not in transferred.nodes:
            raise UnknownNode(f"no transferred node {edit.node}")
        localized = state.stages["localized"]
        uw_text = localized.node(edit.node).uw.text
        entry = _entry_for_lu(config, uw_text, edit.lu)
        if entry is not None:
            state.lu_edits[edit.node] = (uw_text, edit.lu)
            config.counts.increment("uw2lu", (uw_text, edit.lu))
            state.invalidate("transferred")
        else:
            # widened choice: find the minimizer UW that carries this LU
            original = state.graph.node(edit.node).uw
            ties = minimizer_tie_set(
                original,
                state.graph,
                edit.node,
                config.lexicon,
                config.distance_params,
                config.incompat,
            )
            target = None
            for uw_candidate in ties:
                if _entry_for_lu(config, uw_candidate, edit.lu) is not None:
                    target = uw_candidate
                    break
            if target is None:
                raise LuNotCandidate(
                    f"{edit.lu!r} is not a candidate for node {edit.node}"
                )
            state.uw_edits[edit.node] = target
            state.lu_edits[edit.node] = (target, edit.lu)
            config.counts.increment("uw2uw", (original.text, target))
            config.counts.increment("uw2lu", (target, edit.lu))
            state.invalidate("localized")
    elif isinstance(edit, SetAttribute):
        if edit.level == "interlingual":
            attr = edit.value or edit.name
            # validate eagerly so bad edits fail before touching the state
            _add_attribute(state.graph, edit.node, attr, config.inventories)
            state.interlingual_edits.append((edit.node, attr))
            state.invalidate("localized")
        elif edit.level == "style":
            kind = config.packs.schema.kind(edit.name)
            if kind != "exc" or edit.value is None:
                raise UnknownAttribute(f"bad style variable {edit.name!r}")
            if not config.packs.schema.check_value(edit.name, edit.value):
                raise UnknownAttribute(
                    f"bad value {edit.value!r} for style variable {edit.name}"
                )
            gma = state.stages.get("gma")
            if gma is None or not any(
                node.meta.get("n") == edit.node for node in gma.walk()
            ):
                raise UnknownNode(f"no tree node for graph node {edit.node}")
            state.style_edits.append((edit.node, edit.name, edit.value))
            state.invalidate("gma")
        else:
            raise UnknownAttribute(f"unknown edit level {edit.level!r}")
    else:
        raise InputError(f"unknown edit {edit!r}")
    state.version += 1
    state.pending_edits += 1
    return state


def edit_and_redeconvert(
    state: UtteranceState, edit, policy: str = "always", k: int = 1
) -> UtteranceState:
    apply_edit(state, edit)
    if policy == "always" or (policy == "every-k" and state.pending_edits >= k):
        redeconvert(state)
    elif policy != "on-demand" and policy != "every-k":
        raise InputError(f"unknown policy {policy!r}")
    return state


# ---------------------------------------------------------------------------
# document-level operations


@dataclass
class ReplaceResult:
    changed: list[int]  # utterance indices that were re-deconverted
    skipped: list[dict]  # per-node reasons


def global_replace(states: list[UtteranceState], from_lu: str, to_lu: str) -> ReplaceResult:
    """Apply one lexical correction to a whole document.

    Agreement falls out of regeneration: affected utterances are re-run
    through the pipeline, never string-patched.
    """
    changed: list[int] = []
    skipped: list[dict] = []
    for idx, state in enumerate(states):
        transferred = state.stages.get("transferred")
        if transferred is None:
            continue
        hit = False
        for n in sorted(transferred.nodes):
            tn = transferred.nodes[n]
            if tn.lu != from_lu:
                continue
            uw_text = state.stages["localized"].node(n).uw.text
            entry = _entry_for_lu(state.config, uw_text, to_lu)
            if entry is None:
                skipped.append({"utterance": idx, "node": n, "reason": "not a candidate"})
                continue
            state.lu_edits[n] = (uw_text, to_lu)
            state.config.counts.increment("uw2lu", (uw_text, to_lu))
            hit = True
        if hit:
            state.invalidate("transferred")
            state.version += 1
            redeconvert(state)
            changed.append(idx)
    return ReplaceResult(changed, skipped)


def export_enriched_graph(state: UtteranceState) -> str:
    """The original graph plus the human-added interlingual attributes.

    Profile-defaulted attributes and style edits stay out; the output is a
    proposed revision of the source graph, flagged as such in a comment.
    """
    graph = state.graph
    for n, attr in state.interlingual_edits:
        graph = _add_attribute(graph, n, attr, state.config.inventories)
    lines = []
    if state.interlingual_edits:
        added = ", ".join(
            f"{attr}@{n}" for n, attr in sorted(set(state.interlingual_edits))
        )
        lines.append(f"; proposed revision: added interlingual attributes {added}")
    lines.append("[unl]")
    body = serialize_graph(graph)
    if body:
        lines.append(body)
    lines.append("[/unl]")
    return "\n".join(lines) + "\n"
