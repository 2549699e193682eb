"""Hypergraph to decorated tree conversion.

The graph is consumed arc by arc.  While arcs remain, we prefer an arc
whose *source* already has a tree copy: the target becomes a new child
under that copy, keeping the arc label.  Failing that, an arc whose
*target* has a copy is consumed in reverse: the source becomes a new child
carrying the inverse-marked label.  If neither case applies the graph was
not connected.  Every consumed arc creates exactly one tree node, so a
node that is the target of k arcs ends up with k tree copies, and
|tree nodes| = |arcs| + 1.

The scan order over remaining arcs is the canonical (source id, label,
target id) order, which makes the conversion reproducible; any order
satisfies the same postconditions.  When several copies of a node could
receive a new child, the earliest-created copy wins (keeps trees shallow).

Hypernodes are converted recursively: the tree node standing for a scope
reference is a synthetic SCOPE node whose single child is the converted
subgraph, rooted at the scope's entry.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError, NonConnectedGraph
from .graph import UnlGraph, UnlNode
from .rewrite.tree import TreeNode


@dataclass
class GTResult:
    tree: TreeNode
    association: dict[int, list[TreeNode]]  # graph node id -> copies, creation order
    reversed_count: int


def choose_attachment(node_id: int, association: dict[int, list[TreeNode]]) -> TreeNode:
    """The tree copy that receives further children: the earliest created."""
    return association[node_id][0]


def _bare_payload(node: UnlNode) -> dict:
    dec: dict = {}
    if node.scope_ref is None:
        dec["LU"] = node.uw.headword
    if node.attributes:
        dec["SRC"] = frozenset(node.attributes)
    return dec


def graph_to_tree(g) -> GTResult:
    """Convert a (transferred) graph; raises NonConnectedGraph otherwise.

    Accepts a plain UnlGraph (nodes decorated with their headword only,
    handy for dumps) or a transferred graph exposing ``.graph`` and
    ``.decoration_for(node_id)``.
    """
    if hasattr(g, "graph"):
        graph: UnlGraph = g.graph
        payload = g.decoration_for
    else:
        graph = g
        payload = _bare_payload

    if graph.entry is None:
        raise InputError("graph has no entry node")

    counter = [0]
    association: dict[int, list[TreeNode]] = {}
    reversed_total = [0]

    def new_tree_node(node_id: int, label: str, inverted: bool) -> TreeNode:
        node = graph.node(node_id)
        if node.scope_ref is not None:
            dec = {"SCP": "Y", "RL": label}
            if node.attributes:
                dec["SRC"] = frozenset(node.attributes)
        else:
            dec = dict(payload(node))
            dec["RL"] = label
        if inverted:
            dec["INV"] = "Y"
        counter[0] += 1
        tn = TreeNode(dec=dec, meta={"n": node_id, "t": counter[0]})
        association.setdefault(node_id, []).append(tn)
        if node.scope_ref is not None:
            sid = node.scope_ref
            if sid not in graph.scope_map:
                raise InputError(f"scope :{sid} referenced but never defined")
            entry = graph.scope_entry(sid)
            if entry is None:
                raise InputError(f"scope {sid} has no entry node")
            tn.children.append(convert(sid, entry))
        return tn

    def convert(scope_id: str | None, entry_id: int) -> TreeNode:
        remaining = sorted(
            graph.arcs_in_scope(scope_id),
            key=lambda a: (a.source, a.label, a.target),
        )
        local: set[int] = {entry_id}
        root = new_tree_node(entry_id, "entry", inverted=False)
        while remaining:
            pick = None
            for idx, arc in enumerate(remaining):
                if arc.source in local:
                    pick = (idx, arc, False)
                    break
            if pick is None:
                for idx, arc in enumerate(remaining):
                    if arc.target in local:
                        pick = (idx, arc, True)
                        break
            if pick is None:
                raise NonConnectedGraph()
            idx, arc, inverted = pick
            del remaining[idx]
            if not inverted:
                child = new_tree_node(arc.target, arc.label, inverted=False)
                local.add(arc.target)
                parent = choose_attachment(arc.source, association)
            else:
                reversed_total[0] += 1
                child = new_tree_node(arc.source, arc.label, inverted=True)
                local.add(arc.source)
                parent = choose_attachment(arc.target, association)
            parent.children.append(child)
        return root

    tree = convert(None, graph.entry)
    return GTResult(tree=tree, association=association, reversed_count=reversed_total[0])


def label_multiset(result: GTResult) -> dict[str, int]:
    """Tree edge labels with inverse marks folded back to the plain label."""
    counts: dict[str, int] = {}
    for node in result.tree.walk():
        label = node.dec.get("RL")
        if label and label != "entry":
            counts[label] = counts.get(label, 0) + 1
    return counts
