"""Session persistence.

A postedition session outlives single requests, so its stage cache is
persisted as one file of length-prefixed records: a 4-byte big-endian
length followed by that many bytes of UTF-8 JSON.  Record 0 is the session
header (document text, profile, policy, seed, ids); each further record is
one utterance state with its cached stages and recorded edits.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

from .errors import StorageError
from .graph import graph_from_json, graph_to_json
from .graph2tree import GTResult
from .morphgen import SurfaceText, Token
from .pipeline import DeconvConfig, UtteranceState
from .rewrite.tree import TreeNode
from .transfer import TransferredGraph, TransferredNode
from .validate import Issue, ValidationReport


def write_records(path: str | Path, records: list[dict]) -> None:
    blob = bytearray()
    for record in records:
        data = json.dumps(record, ensure_ascii=False, sort_keys=True).encode("utf-8")
        blob += struct.pack(">I", len(data))
        blob += data
    tmp = Path(path).with_suffix(".tmp")
    tmp.write_bytes(bytes(blob))
    tmp.replace(path)


def read_records(path: str | Path) -> list[dict]:
    raw = Path(path).read_bytes()
    records = []
    pos = 0
    while pos < len(raw):
        if pos + 4 > len(raw):
            raise StorageError(f"{path}: truncated record length at byte {pos}")
        (length,) = struct.unpack(">I", raw[pos : pos + 4])
        pos += 4
        if pos + length > len(raw):
            raise StorageError(f"{path}: truncated record at byte {pos}")
        records.append(json.loads(raw[pos : pos + length].decode("utf-8")))
        pos += length
    return records


# -- state <-> json ----------------------------------------------------------


def _surface_to_json(text: SurfaceText) -> dict:
    return {
        "rendered": text.rendered,
        "marked": text.marked,
        "text": text.text,
        "tokens": [
            {
                "text": t.text,
                "mark": t.mark,
                "n": t.n,
                "joined": t.joined,
                "start": t.start,
                "end": t.end,
            }
            for t in text.tokens
        ],
    }


def _surface_from_json(data: dict) -> SurfaceText:
    return SurfaceText(
        tokens=tuple(
            Token(t["text"], t["mark"], t["n"], t["joined"], t["start"], t["end"])
            for t in data["tokens"]
        ),
        rendered=data["rendered"],
        marked=data["marked"],
        text=data["text"],
    )


def state_to_json(state: UtteranceState) -> dict:
    stages: dict = {}
    for name, obj in state.stages.items():
        if name in ("validated", "localized"):
            stages[name] = graph_to_json(obj)
        elif name == "transferred":
            stages[name] = {
                "nodes": {
                    str(n): {
                        "lu": tn.lu,
                        "pos": tn.pos_class,
                        "vars": [
                            [var, sorted(v) if isinstance(v, frozenset) else v]
                            for var, v in tn.transfer_vars
                        ],
                        "attrs": sorted(tn.source_attributes),
                        "uw": tn.entry_uw,
                        "untr": tn.untranslated,
                    }
                    for n, tn in sorted(obj.nodes.items())
                }
            }
        elif name == "tree":
            stages[name] = {"tree": obj.tree.to_json(), "reversed": obj.reversed_count}
        elif name in ("gma", "uma", "umc"):
            stages[name] = obj.to_json()
        elif name == "text":
            stages[name] = _surface_to_json(obj)
    return {
        "graph": graph_to_json(state.graph),
        "report": state.report.to_json() if state.report else None,
        "stages": stages,
        "choices": state.choice_log,
        "version": state.version,
        "pending": state.pending_edits,
        "edits": {
            "uw": {str(k): v for k, v in state.uw_edits.items()},
            "interlingual": [list(e) for e in state.interlingual_edits],
            "style": [list(e) for e in state.style_edits],
            "lu": {str(k): list(v) for k, v in state.lu_edits.items()},
        },
    }


def _rebuild_association(tree: TreeNode) -> dict:
    assoc: dict = {}
    nodes = sorted(tree.walk(), key=lambda nd: nd.meta.get("t", 0))
    for node in nodes:
        n = node.meta.get("n")
        if n is not None:
            assoc.setdefault(n, []).append(node)
    return assoc


def state_from_json(data: dict, config: DeconvConfig) -> UtteranceState:
    graph = graph_from_json(data["graph"])
    state = UtteranceState(graph=graph, config=config)
    state.version = data["version"]
    state.pending_edits = data["pending"]
    state.choice_log = data["choices"]
    if data["report"] is not None:
        state.report = ValidationReport(
            tuple(
                Issue(i["severity"], i["code"], i["locus"], i["message"])
                for i in data["report"]["issues"]
            )
        )
    edits = data["edits"]
    state.uw_edits = {int(k): v for k, v in edits["uw"].items()}
    state.interlingual_edits = [tuple(e) for e in edits["interlingual"]]
    state.style_edits = [tuple(e) for e in edits["style"]]
    state.lu_edits = {int(k): tuple(v) for k, v in edits["lu"].items()}
    for name, payload in data["stages"].items():
        if name in ("validated", "localized"):
            state.stages[name] = graph_from_json(payload)
        elif name == "transferred":
            base = state.stages.get("localized", graph)
            nodes = {
                int(n): TransferredNode(
                    node_id=int(n),
                    lu=d["lu"],
                    pos_class=d["pos"],
                    transfer_vars=tuple(
                        (var, frozenset(v) if isinstance(v, list) else v)
                        for var, v in d["vars"]
                    ),
                    source_attributes=frozenset(d["attrs"]),
                    entry_uw=d["uw"],
                    untranslated=d["untr"],
                )
                for n, d in payload["nodes"].items()
            }
            state.stages[name] = TransferredGraph(base, nodes)
        elif name == "tree":
            tree = TreeNode.from_json(payload["tree"])
            state.stages[name] = GTResult(
                tree=tree,
                association=_rebuild_association(tree),
                reversed_count=payload["reversed"],
            )
        elif name in ("gma", "uma", "umc"):
            state.stages[name] = TreeNode.from_json(payload)
        elif name == "text":
            state.stages[name] = _surface_from_json(payload)
    return state


def save_session(path: str | Path, header: dict, states: list[UtteranceState]) -> None:
    write_records(path, [header] + [state_to_json(s) for s in states])


def load_session(path: str | Path, config: DeconvConfig) -> tuple[dict, list[UtteranceState]]:
    records = read_records(path)
    if not records:
        raise StorageError(f"{path}: empty session file")
    return records[0], [state_from_json(r, config) for r in records[1:]]
