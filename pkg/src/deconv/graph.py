"""UNL graphs and documents: model, parser, serializer.

Surface syntax (the exact grammar ships in docs/unl-document.ebnf):

  * a document is a sequence of utterance blocks;
  * a block is optional ``;`` comment lines, a ``[unl]`` line, one arc per
    line, a ``[/unl]`` line, then optional rendering blocks ``[fr]...[/fr]``;
  * an arc line reads ``rel(term1, term2)``; arcs belonging to a hypernode
    (scope) carry the scope id on the relation, ``rel:01(...)``;
  * a term is a UW, an optional instance suffix ``:NN`` distinguishing two
    nodes with the same UW, and attributes ``.@attr``; the entry node
    carries ``.@entry``.  A bare ``:01`` term references scope 01.

Node indices are canonical: dense, 1-based, in order of first textual
occurrence.  Parsed structures are immutable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .errors import (
    DuplicateEntryNodeError,
    EmptyGraphError,
    MalformedUW,
    ParseError,
)
from .uw import UW, parse_uw

_ARC_RE = re.compile(r"^([a-z]{2,4})(?::(\d{2}))?\s*\((.*)\)\s*$", re.IGNORECASE)
_ATTR_RE = re.compile(r"^[a-z0-9_-]+$", re.IGNORECASE)
_LANG_OPEN_RE = re.compile(r"^\[([a-z]{2,3})\]\s*(.*)$")


@dataclass(frozen=True)
class UnlNode:
    id: int
    uw: UW
    attributes: frozenset[str] = frozenset()
    scope: str | None = None  # scope this node lives in; None = top level
    instance: str | None = None  # explicit ":NN" suffix, kept verbatim
    defaulted: frozenset[str] = frozenset()  # attributes added by localization

    @property
    def scope_ref(self) -> str | None:
        """Scope id this node references, when it stands for a hypernode."""
        if self.uw.headword.startswith(":"):
            return self.uw.headword[1:]
        return None

    def key(self) -> tuple:
        return (self.scope, self.uw.text, self.instance)

    def has(self, attr: str) -> bool:
        return attr in self.attributes


@dataclass(frozen=True)
class UnlArc:
    source: int
    target: int
    label: str
    scope: str | None = None


@dataclass(frozen=True)
class UnlGraph:
    nodes: tuple[UnlNode, ...]  # dense ids 1..len(nodes), in id order
    arcs: tuple[UnlArc, ...]  # document order
    entry: int | None = None
    scopes: tuple[tuple[str, frozenset[int]], ...] = ()  # (scope id, member ids)

    def node(self, node_id: int) -> UnlNode:
        return self.nodes[node_id - 1]

    @property
    def scope_map(self) -> dict[str, frozenset[int]]:
        return dict(self.scopes)

    def scope_entry(self, scope_id: str) -> int | None:
        for nid in sorted(self.scope_map.get(scope_id, ())):
            if self.node(nid).has("entry"):
                return nid
        return None

    def arcs_in_scope(self, scope_id: str | None) -> tuple[UnlArc, ...]:
        return tuple(a for a in self.arcs if a.scope == scope_id)

    def replace_node(self, node: UnlNode) -> "UnlGraph":
        nodes = list(self.nodes)
        nodes[node.id - 1] = node
        return replace(self, nodes=tuple(nodes))


@dataclass(frozen=True)
class Utterance:
    graph: UnlGraph
    comments: str | None = None
    renderings: tuple[tuple[str, str], ...] = ()  # (language tag, text)

    @property
    def rendering_map(self) -> dict[str, str]:
        return dict(self.renderings)


@dataclass(frozen=True)
class UnlDocument:
    utterances: tuple[Utterance, ...] = ()


class _Term:
    __slots__ = ("uw", "instance", "attrs", "is_scope_ref", "scope_id")

    def __init__(self, uw, instance, attrs, scope_id=None):
        self.uw = uw
        self.instance = instance
        self.attrs = attrs
        self.scope_id = scope_id
        self.is_scope_ref = scope_id is not None


def _split_args(body: str, lineno: int) -> list[str]:
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced parentheses in arc", lineno)
        elif ch == "," and depth == 0:
            parts.append(body[start:i])
            start = i + 1
    if depth != 0:
        raise ParseError("unbalanced parentheses in arc", lineno)
    parts.append(body[start:])
    return parts


def _parse_term(text: str, lineno: int) -> _Term:
    text = text.strip()
    if not text:
        raise ParseError("empty term", lineno)
    # split off ".@attr" pieces at depth 0
    depth = 0
    cut = len(text)
    attrs: list[str] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and text.startswith(".@", i):
            cut = i
            break
        i += 1
    core = text[:cut]
    rest = text[cut:]
    while rest:
        if not rest.startswith(".@"):
            raise ParseError(f"bad attribute syntax in term {text!r}", lineno)
        rest = rest[2:]
        m = re.match(r"^[a-z0-9_-]+", rest, re.IGNORECASE)
        if m is None:
            raise ParseError(f"bad attribute name in term {text!r}", lineno)
        attrs.append(m.group(0).lower())
        rest = rest[m.end():]

    core = core.strip()
    if re.fullmatch(r":\d{2}", core):
        return _Term(None, None, attrs, scope_id=core[1:])
    instance = None
    m = re.search(r":(\d{2})$", core)
    if m and _depth_at(core, m.start()) == 0:
        instance = m.group(1)
        core = core[: m.start()]
    try:
        uw = parse_uw(core)
    except MalformedUW as exc:
        raise ParseError(str(exc), lineno) from exc
    return _Term(uw, instance, attrs)


def _depth_at(text: str, pos: int) -> int:
    depth = 0
    for ch in text[:pos]:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
    return depth


class _GraphBuilder:
    def __init__(self, inventories=None, strict=False):
        self.inventories = inventories
        self.strict = strict
        self.nodes: list[UnlNode] = []
        self.by_key: dict[tuple, int] = {}
        self.arcs: list[UnlArc] = []
        self.scope_members: dict[str, set[int]] = {}
        self.scope_ids_defined: set[str] = set()
        self.scope_ids_referenced: dict[str, int] = {}

    def _check_attr(self, attr: str, lineno: int):
        if self.strict and self.inventories is not None:
            if attr not in self.inventories.attributes:
                raise ParseError(f"unknown attribute {attr!r}", lineno)

    def _intern(self, term: _Term, arc_scope: str | None, lineno: int) -> int:
        for a in term.attrs:
            self._check_attr(a, lineno)
        if term.is_scope_ref:
            if arc_scope is not None:
                raise ParseError("nested hypernodes are not supported", lineno)
            if term.scope_id == arc_scope:
                raise ParseError("scope cannot reference itself", lineno)
            uw = UW(":" + term.scope_id)
            key = (arc_scope, uw.text, None)
            self.scope_ids_referenced.setdefault(term.scope_id, lineno)
        else:
            uw = term.uw
            key = (arc_scope, uw.text, term.instance)
        if key in self.by_key:
            nid = self.by_key[key]
            node = self.nodes[nid - 1]
            merged = node.attributes | frozenset(term.attrs)
            if merged != node.attributes:
                self.nodes[nid - 1] = replace(node, attributes=merged)
            return nid
        nid = len(self.nodes) + 1
        node = UnlNode(
            id=nid,
            uw=uw,
            attributes=frozenset(term.attrs),
            scope=arc_scope,
            instance=None if term.is_scope_ref else term.instance,
        )
        self.nodes.append(node)
        self.by_key[key] = nid
        if arc_scope is not None:
            self.scope_members.setdefault(arc_scope, set()).add(nid)
        return nid

    def add_arc_line(self, line: str, lineno: int):
        m = _ARC_RE.match(line)
        if m is None:
            raise ParseError(f"bad arc line {line.strip()!r}", lineno)
        label = m.group(1).lower()
        scope = m.group(2)
        if self.strict and self.inventories is not None:
            if label not in self.inventories.relations:
                raise ParseError(f"unknown relation {label!r}", lineno)
        args = _split_args(m.group(3), lineno)
        if len(args) != 2:
            raise ParseError(f"arc needs exactly 2 terms, got {len(args)}", lineno)
        if scope is not None:
            self.scope_ids_defined.add(scope)
        src = self._intern(_parse_term(args[0], lineno), scope, lineno)
        tgt = self._intern(_parse_term(args[1], lineno), scope, lineno)
        if src == tgt:
            # no relation in the inventory is reflexive-capable
            raise ParseError(f"reflexive arc {label}({args[0].strip()}, ...)", lineno)
        self.arcs.append(UnlArc(src, tgt, label, scope))

    def build(self, lineno: int) -> UnlGraph:
        if not self.arcs:
            raise EmptyGraphError("empty graph: no arcs between [unl] and [/unl]", lineno)
        entry = None
        for node in self.nodes:
            if node.has("entry") and node.scope is None:
                if entry is not None:
                    raise DuplicateEntryNodeError(
                        f"two entry nodes at top level: {entry} and {node.id}", lineno
                    )
                entry = node.id
        for sid, members in sorted(self.scope_members.items()):
            entries = [n for n in sorted(members) if self.nodes[n - 1].has("entry")]
            if len(entries) > 1:
                raise DuplicateEntryNodeError(
                    f"two entry nodes in scope {sid}", lineno
                )
        scopes = tuple(
            (sid, frozenset(members))
            for sid, members in sorted(self.scope_members.items())
        )
        return UnlGraph(tuple(self.nodes), tuple(self.arcs), entry, scopes)


def parse_graph(lines, first_lineno=1, inventories=None, strict=False) -> UnlGraph:
    """Parse the arc lines of one utterance (no [unl] brackets)."""
    builder = _GraphBuilder(inventories, strict)
    lineno = first_lineno
    for offset, line in enumerate(lines):
        if line.strip():
            builder.add_arc_line(line, first_lineno + offset)
        lineno = first_lineno + offset
    return builder.build(lineno)


def parse_document(text: str, inventories=None, strict: bool = False) -> UnlDocument:
    """Parse a UNL document into utterances.

    With ``strict=True`` (and inventories supplied), unknown relations and
    attributes are parse errors; otherwise they are left for the validator.
    """
    lines = text.splitlines()
    utterances: list[Utterance] = []
    comments: list[str] = []
    i = 0
    n = len(lines)
    while i < n:
        raw = lines[i]
        line = raw.strip()
        if not line:
            i += 1
            continue
        if line.startswith(";"):
            comments.append(line[1:].strip())
            i += 1
            continue
        if line == "[unl]":
            start = i + 1
            j = start
            while j < n and lines[j].strip() != "[/unl]":
                if lines[j].strip() == "[unl]":
                    raise ParseError("nested [unl] block", j + 1)
                j += 1
            if j >= n:
                raise ParseError("missing [/unl]", i + 1)
            builder = _GraphBuilder(inventories, strict)
            for k in range(start, j):
                if lines[k].strip():
                    builder.add_arc_line(lines[k], k + 1)
            graph = builder.build(j + 1)
            # rendering blocks directly after [/unl]
            renderings: list[tuple[str, str]] = []
            i = j + 1
            while i < n:
                m = _LANG_OPEN_RE.match(lines[i].strip())
                if m is None or m.group(1) == "unl":
                    break
                tag = m.group(1)
                close = f"[/{tag}]"
                body = m.group(2)
                if body.endswith(close):
                    renderings.append((tag, body[: -len(close)].strip()))
                    i += 1
                    continue
                chunk = [body] if body else []
                i += 1
                while i < n and lines[i].strip() != close:
                    chunk.append(lines[i])
                    i += 1
                if i >= n:
                    raise ParseError(f"missing {close}", i)
                renderings.append((tag, "\n".join(chunk).strip()))
                i += 1
            utterances.append(
                Utterance(
                    graph=graph,
                    comments="\n".join(comments) if comments else None,
                    renderings=tuple(renderings),
                )
            )
            comments = []
            continue
        raise ParseError(f"unexpected line outside [unl] block: {line!r}", i + 1)
    return UnlDocument(tuple(utterances))


# ---------------------------------------------------------------------------
# serialization


def _term_text(node: UnlNode, with_attrs: bool) -> str:
    if node.scope_ref is not None:
        base = ":" + node.scope_ref
    else:
        base = node.uw.text
        if node.instance is not None:
            base += ":" + node.instance
    if with_attrs:
        for attr in sorted(node.attributes - node.defaulted):
            base += ".@" + attr
    return base


def serialize_graph(graph: UnlGraph, include_defaulted: bool = False) -> str:
    """Render arc lines; attributes are emitted at a node's first occurrence.

    Attributes added as profile defaults are omitted unless asked for, so a
    parse/serialize round trip reproduces the source text.
    """
    seen: set[int] = set()
    out: list[str] = []
    for arc in graph.arcs:
        parts = []
        for nid in (arc.source, arc.target):
            node = graph.node(nid)
            if include_defaulted and nid not in seen:
                base = _term_text(replace(node, defaulted=frozenset()), True)
            else:
                base = _term_text(node, nid not in seen)
            seen.add(nid)
            parts.append(base)
        label = arc.label + (f":{arc.scope}" if arc.scope else "")
        out.append(f"{label}({parts[0]}, {parts[1]})")
    return "\n".join(out)


def serialize_document(doc: UnlDocument) -> str:
    """Inverse of parse_document up to normalization (fixpoint property)."""
    blocks: list[str] = []
    for utt in doc.utterances:
        lines: list[str] = []
        if utt.comments:
            for c in utt.comments.splitlines():
                lines.append("; " + c)
        lines.append("[unl]")
        body = serialize_graph(utt.graph)
        if body:
            lines.append(body)
        lines.append("[/unl]")
        for tag, text in utt.renderings:
            lines.append(f"[{tag}] {text} [/{tag}]")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + ("\n" if blocks else "")


# ---------------------------------------------------------------------------
# JSON views (used by the session store)


def graph_to_json(graph: UnlGraph) -> dict:
    return {
        "nodes": [
            {
                "id": nd.id,
                "uw": nd.uw.text,
                "attrs": sorted(nd.attributes),
                "defaulted": sorted(nd.defaulted),
                "scope": nd.scope,
                "instance": nd.instance,
            }
            for nd in graph.nodes
        ],
        "arcs": [
            {"s": a.source, "t": a.target, "l": a.label, "scope": a.scope}
            for a in graph.arcs
        ],
        "entry": graph.entry,
        "scopes": [[sid, sorted(members)] for sid, members in graph.scopes],
    }


def graph_from_json(data: dict) -> UnlGraph:
    nodes = tuple(
        UnlNode(
            id=nd["id"],
            uw=parse_uw(nd["uw"]) if not nd["uw"].startswith(":") else UW(nd["uw"]),
            attributes=frozenset(nd["attrs"]),
            defaulted=frozenset(nd["defaulted"]),
            scope=nd["scope"],
            instance=nd["instance"],
        )
        for nd in data["nodes"]
    )
    arcs = tuple(UnlArc(a["s"], a["t"], a["l"], a["scope"]) for a in data["arcs"])
    scopes = tuple((sid, frozenset(members)) for sid, members in data["scopes"])
    return UnlGraph(nodes, arcs, data["entry"], scopes)
