"""Graph validation: accept or reject a UNL graph before deconversion.

A graph must be connected and use only declared relations and attributes;
rejected graphs get an explicit report rather than an exception, so callers
can show every problem at once.  Connectivity is checked on the undirected
view, per scope: that is exactly the precondition under which the
graph-to-tree conversion succeeds (it consumes arcs in both directions but
never crosses scope boundaries).
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import UnlGraph
from .inventories import Inventories


@dataclass(frozen=True)
class Issue:
    severity: str  # "error" or "warning"
    code: str
    locus: str  # "node:3", "arc:2", "scope:01", "graph"
    message: str


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[Issue, ...]

    @property
    def ok(self) -> bool:
        return not any(i.severity == "error" for i in self.issues)

    def errors(self) -> tuple[Issue, ...]:
        return tuple(i for i in self.issues if i.severity == "error")

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "issues": [
                {
                    "severity": i.severity,
                    "code": i.code,
                    "locus": i.locus,
                    "message": i.message,
                }
                for i in self.issues
            ],
        }


def _scope_components(graph: UnlGraph, scope_id: str | None) -> list[set[int]]:
    """Connected components of one scope's undirected arc view."""
    members: set[int] = set()
    adj: dict[int, set[int]] = {}
    for node in graph.nodes:
        if node.scope == scope_id:
            members.add(node.id)
            adj.setdefault(node.id, set())
    for arc in graph.arcs_in_scope(scope_id):
        adj.setdefault(arc.source, set()).add(arc.target)
        adj.setdefault(arc.target, set()).add(arc.source)
        members.update((arc.source, arc.target))
    components: list[set[int]] = []
    todo = set(members)
    while todo:
        seed = min(todo)
        comp = {seed}
        stack = [seed]
        while stack:
            cur = stack.pop()
            for nxt in adj.get(cur, ()):
                if nxt not in comp:
                    comp.add(nxt)
                    stack.append(nxt)
        components.append(comp)
        todo -= comp
    return components


def _forward_reachable(graph: UnlGraph, start: int, scope_id: str | None) -> set[int]:
    out: dict[int, list[int]] = {}
    for arc in graph.arcs_in_scope(scope_id):
        out.setdefault(arc.source, []).append(arc.target)
    seen = {start}
    stack = [start]
    while stack:
        cur = stack.pop()
        for nxt in out.get(cur, ()):
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen


def validate(graph: UnlGraph, inventories: Inventories) -> ValidationReport:
    """Check a parsed graph; deterministic and side-effect free."""
    issues: list[Issue] = []

    for arc_idx, arc in enumerate(graph.arcs, 1):
        if arc.label not in inventories.relations:
            issues.append(
                Issue(
                    "error",
                    "UNKNOWN_RELATION",
                    f"arc:{arc_idx}",
                    f"relation {arc.label!r} is not declared",
                )
            )
    for node in graph.nodes:
        for attr in sorted(node.attributes):
            if attr not in inventories.attributes:
                issues.append(
                    Issue(
                        "error",
                        "UNKNOWN_ATTRIBUTE",
                        f"node:{node.id}",
                        f"attribute {attr!r} is not declared",
                    )
                )

    if graph.entry is None:
        issues.append(
            Issue("error", "MISSING_ENTRY", "graph", "no top-level node carries .@entry")
        )

    scope_map = graph.scope_map
    for node in graph.nodes:
        ref = node.scope_ref
        if ref is not None and ref not in scope_map:
            issues.append(
                Issue(
                    "error",
                    "DANGLING_SCOPE",
                    f"node:{node.id}",
                    f"scope :{ref} is referenced but never defined",
                )
            )
    for sid in sorted(scope_map):
        if graph.scope_entry(sid) is None:
            issues.append(
                Issue(
                    "error",
                    "MISSING_ENTRY",
                    f"scope:{sid}",
                    f"scope {sid} has no member carrying .@entry",
                )
            )

    for scope_id in [None] + sorted(scope_map):
        components = _scope_components(graph, scope_id)
        if len(components) > 1:
            locus = "graph" if scope_id is None else f"scope:{scope_id}"
            sizes = sorted(len(c) for c in components)
            issues.append(
                Issue(
                    "error",
                    "CONNECTIVITY",
                    locus,
                    f"not connected: {len(components)} components of sizes {sizes}",
                )
            )

    if graph.entry is not None:
        reachable = _forward_reachable(graph, graph.entry, None)
        top_ids = {n.id for n in graph.nodes if n.scope is None}
        for nid in sorted(top_ids - reachable):
            issues.append(
                Issue(
                    "warning",
                    "UNREACHABLE_FORWARD",
                    f"node:{nid}",
                    "not reachable from the entry by forward arcs; "
                    "tree conversion will reverse arcs here",
                )
            )

    return ValidationReport(tuple(issues))
