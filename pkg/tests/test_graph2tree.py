import random
from collections import Counter

import pytest

from deconv.errors import InputError, NonConnectedGraph
from deconv.graph import parse_document
from deconv.graph2tree import choose_attachment, graph_to_tree, label_multiset
from deconv.rewrite.tree import check_projective

from conftest import make_graph


def test_split_fixture():
    # entry e=1, a=2, x=3; x is the target of two arcs and must be duplicated
    g = make_graph(3, [(1, 2, "agt"), (1, 3, "obj"), (2, 3, "obj")])
    result = graph_to_tree(g)
    assert result.tree.size() == 4  # |arcs| + 1
    assert result.reversed_count == 0
    root = result.tree
    assert root.meta["n"] == 1
    assert root.dec["RL"] == "entry"
    assert [c.dec["RL"] for c in root.children] == ["agt", "obj"]
    a = root.children[0]
    assert a.meta["n"] == 2
    assert [c.meta["n"] for c in a.children] == [3]
    assert len(result.association[3]) == 2


def test_single_reversal():
    # only arc (a, e, mod) with entry e: must be consumed target-first
    g = make_graph(2, [(2, 1, "mod")])
    result = graph_to_tree(g)
    assert result.reversed_count == 1
    child = result.tree.children[0]
    assert child.dec["RL"] == "mod"
    assert child.dec.get("INV") == "Y"
    assert child.meta["n"] == 2


def test_entry_only_graph():
    g = make_graph(1, [])
    result = graph_to_tree(g)
    assert result.tree.size() == 1
    assert result.association == {1: [result.tree]}


def test_no_entry_rejected():
    g = make_graph(2, [(1, 2, "agt")])
    g = g.__class__(g.nodes, g.arcs, None, ())
    with pytest.raises(InputError):
        graph_to_tree(g)


def test_disconnected_message_is_exact():
    g = make_graph(4, [(1, 2, "agt"), (3, 4, "obj")])
    with pytest.raises(NonConnectedGraph) as exc:
        graph_to_tree(g)
    assert str(exc.value) == "non connected graph"


def test_choose_attachment_earliest_copy():
    g = make_graph(3, [(1, 3, "agt"), (2, 3, "obj"), (1, 2, "mod"), (3, 2, "ben")])
    result = graph_to_tree(g)
    copies = result.association[3]
    assert len(copies) >= 2
    assert choose_attachment(3, result.association) is copies[0]
    assert copies[0].meta["t"] < copies[1].meta["t"]


def test_arc_conservation_random(random_connected_graph):
    rng = random.Random(123)
    for _ in range(100):
        g = random_connected_graph(rng, max_arcs=20)
        result = graph_to_tree(g)
        assert result.tree.size() == len(g.arcs) + 1
        assert label_multiset(result) == dict(Counter(a.label for a in g.arcs))
        check_projective(result.tree)


def test_zero_reversals_when_forward_reachable(random_forward_graph):
    rng = random.Random(99)
    for _ in range(100):
        g = random_forward_graph(rng, max_arcs=20)
        assert graph_to_tree(g).reversed_count == 0


def test_association_covers_every_node(random_connected_graph):
    rng = random.Random(5)
    for _ in range(50):
        g = random_connected_graph(rng, max_arcs=15)
        result = graph_to_tree(g)
        assert set(result.association) == {n.id for n in g.nodes}
        total_copies = sum(len(v) for v in result.association.values())
        assert total_copies == result.tree.size()


def test_scope_converted_recursively():
    text = """\
[unl]
agt(say.@entry, man)
obj(say, :01)
agt:01(eat.@entry, cat)
obj:01(eat, fish)
[/unl]
"""
    g = parse_document(text).utterances[0].graph
    result = graph_to_tree(g)
    scope_nodes = [n for n in result.tree.walk() if n.dec.get("SCP") == "Y"]
    assert len(scope_nodes) == 1
    sub = scope_nodes[0].children[0]
    assert sub.dec["RL"] == "entry"
    # scope subtree has its own |arcs|+1 nodes
    assert sub.size() == 3
    # overall: 2 top arcs + 1 root + 2 scope arcs + 1 scope root
    assert result.tree.size() == 6


def test_bare_payload_carries_headword_and_attrs():
    g = parse_document("[unl]\nagt(eat.@entry.@past, cat.@pl)\n[/unl]\n").utterances[0].graph
    result = graph_to_tree(g)
    assert result.tree.dec["LU"] == "eat"
    assert result.tree.dec["SRC"] == frozenset({"entry", "past"})
    assert result.tree.children[0].dec["SRC"] == frozenset({"pl"})
