import pytest

from deconv.errors import IterationLimit, RuleSyntaxError, RuleTypeError
from deconv.rewrite import (
    TreeNode,
    apply,
    check_projective,
    compile_grammar,
    compile_rule_file,
    parse_schema,
)

SCHEMA = parse_schema(
    """
-EXC- ** exclusive
CAT (N, V, A, D).
POS (P0, P1, P2, P3, P4, P5).
NUM (SG, PL).
GEN (M, F).
LEAF (Y).
DONE (Y).
LEMMA (*).
-NEX-
SRC (*).
-FMT-
ART == CAT=D, POS=P0.
"""
)


def node(dec=None, children=None, **meta):
    return TreeNode(dec=dec or {}, children=children or [], meta=meta)


def test_schema_sections_and_formats():
    assert SCHEMA.exclusive["CAT"] == ("N", "V", "A", "D")
    assert SCHEMA.exclusive["LEMMA"] is None  # open-valued
    assert SCHEMA.nonexclusive["SRC"] is None
    assert SCHEMA.formats["ART"] == {"CAT": "D", "POS": "P0"}
    assert SCHEMA.value_index("POS", "P3") == 3


def test_schema_rejects_bad_decoration():
    with pytest.raises(RuleTypeError):
        SCHEMA.validate_decoration({"CAT": "X"})
    with pytest.raises(RuleTypeError):
        SCHEMA.validate_decoration({"XYZ": "N"})
    with pytest.raises(RuleTypeError):
        SCHEMA.validate_decoration({"SRC": "pl"})  # needs a set
    SCHEMA.validate_decoration({"CAT": "N", "SRC": frozenset({"pl"})})


def test_compile_reports_undeclared_variable():
    with pytest.raises(RuleTypeError) as exc:
        compile_grammar("RULE r PRIORITY 1 : ?x{CATX=V} ==> ?x{CAT=V}", SCHEMA)
    assert "CATX" in str(exc.value)
    assert "line 1" in str(exc.value)


def test_compile_reports_unbound_template_variable():
    with pytest.raises(RuleTypeError):
        compile_grammar("RULE r PRIORITY 1 : ?x{CAT=V} ==> ?y{CAT=N}", SCHEMA)


def test_compile_rejects_out_of_set_value():
    with pytest.raises(RuleTypeError):
        compile_grammar("RULE r PRIORITY 1 : ?x{CAT=Z} ==> ?x", SCHEMA)


def test_equal_priority_keeps_file_order():
    g = compile_grammar(
        "RULE a PRIORITY 5 : ?x{CAT=V} ==> ?x\n"
        "RULE b PRIORITY 9 : ?x{CAT=N} ==> ?x\n"
        "RULE c PRIORITY 5 : ?x{CAT=A} ==> ?x\n",
        SCHEMA,
    )
    assert [r.name for r in g.rules] == ["b", "a", "c"]


def test_grammar_sections_split():
    gs = compile_rule_file(
        "GRAMMAR one\nRULE a PRIORITY 1 : ?x{CAT=V} ==> ?x\n"
        "GRAMMAR two\nRULE b PRIORITY 1 : ?x{CAT=N} ==> ?x\n",
        SCHEMA,
    )
    assert [g.name for g in gs] == ["one", "two"]


def test_empty_grammar_is_identity():
    g = compile_grammar("", SCHEMA)
    tree = node({"CAT": "V"}, [node({"CAT": "N"})])
    out = apply(g, tree)
    assert out is tree
    assert out.dec == {"CAT": "V"}


def test_single_assignment_rule_fires_once():
    g = compile_grammar("RULE r PRIORITY 1 : ?x{CAT=V, !DONE} ==> ?x{DONE=Y}", SCHEMA)
    tree = node({"CAT": "V"})
    out = apply(g, tree)
    assert out.dec == {"CAT": "V", "DONE": "Y"}


def test_swap_children_guarded():
    g = compile_grammar(
        "RULE swap PRIORITY 1 : ?p(...a ?x ?y ...b) ==> ?p(...a ?y ?x ...b)\n"
        "  WHERE ?x.POS > ?y.POS",
        SCHEMA,
    )
    kids = [node({"POS": "P3"}), node({"POS": "P1"}), node({"POS": "P2"})]
    tree = node({"CAT": "V"}, kids)
    out = apply(g, tree)
    assert [c.dec["POS"] for c in out.children] == ["P1", "P2", "P3"]
    # node identity survives reordering
    assert set(map(id, out.children)) == set(map(id, kids))


def test_looping_rule_hits_iteration_limit():
    g = compile_grammar("MAXITER 50\nRULE loop PRIORITY 1 : ?x{CAT=V} ==> ?x", SCHEMA)
    with pytest.raises(IterationLimit):
        apply(g, node({"CAT": "V"}))


def test_default_iteration_cap_is_1000():
    g = compile_grammar("RULE loop PRIORITY 1 : ?x{CAT=V} ==> ?x", SCHEMA)
    assert g.max_iterations == 1000


def test_new_node_from_format_with_copy():
    g = compile_grammar(
        "RULE art PRIORITY 1 : ?x{CAT=N, !DONE}(...c) ==>\n"
        "  ?x{DONE=Y}(#ART{GEN=?x.GEN, NUM=?x.NUM} ...c)",
        SCHEMA,
    )
    tree = node({"CAT": "N", "GEN": "F"}, [node({"CAT": "A"})], n=7)
    out = apply(g, tree)
    art = out.children[0]
    assert art.dec == {"CAT": "D", "POS": "P0", "GEN": "F"}  # unset NUM not copied
    assert art.meta["n"] == 7  # created nodes trace to their governor
    assert out.children[1].dec == {"CAT": "A"}


def test_clone_copies_pre_rule_state():
    g = compile_grammar(
        "RULE leaf PRIORITY 1 : ?x{CAT=V, !LEAF, !DONE}(...c) ==>\n"
        "  ?x{DONE=Y}(%x{LEAF=Y} ...c)",
        SCHEMA,
    )
    tree = node({"CAT": "V", "LEMMA": "manger"}, [node({"CAT": "N"})], n=3, t=1)
    out = apply(g, tree)
    leaf = out.children[0]
    assert leaf.dec == {"CAT": "V", "LEMMA": "manger", "LEAF": "Y"}
    assert "DONE" not in leaf.dec  # clone sees the pre-application decoration
    assert leaf.meta["n"] == 3
    assert leaf.meta["t"] != 1


def test_nex_membership_and_updates():
    g = compile_grammar(
        "RULE pl PRIORITY 2 : ?x{SRC=pl, !NUM} ==> ?x{NUM=PL, SRC-=pl}\n"
        "RULE tag PRIORITY 1 : ?x{NUM=PL, SRC!=seen} ==> ?x{SRC+=seen}",
        SCHEMA,
    )
    tree = node({"SRC": frozenset({"pl", "def"})})
    out = apply(g, tree)
    assert out.dec["NUM"] == "PL"
    assert out.dec["SRC"] == frozenset({"def", "seen"})


def test_priority_then_shallowest_then_leftmost():
    fired = []
    g = compile_grammar(
        "RULE high PRIORITY 9 : ?x{CAT=A, !DONE} ==> ?x{DONE=Y}\n"
        "RULE low PRIORITY 1 : ?x{CAT=N, !DONE} ==> ?x{DONE=Y}",
        SCHEMA,
    )
    # deep A node must be rewritten before shallow N node (priority wins);
    # between two N nodes the leftmost goes first
    deep_a = node({"CAT": "A"})
    n1 = node({"CAT": "N"}, [deep_a])
    n2 = node({"CAT": "N"})
    tree = node({"CAT": "V"}, [n1, n2])
    out = apply(g, tree)
    assert deep_a.dec.get("DONE") == "Y"
    assert n1.dec.get("DONE") == "Y"
    assert n2.dec.get("DONE") == "Y"


def test_node_deletion_by_omission():
    g = compile_grammar(
        "RULE drop PRIORITY 1 : ?p{CAT=V, !DONE}(...a ?x{CAT=D} ...b) ==> ?p{DONE=Y}(...a ...b)",
        SCHEMA,
    )
    tree = node({"CAT": "V"}, [node({"CAT": "D"}), node({"CAT": "N"})])
    out = apply(g, tree)
    assert [c.dec["CAT"] for c in out.children] == ["N"]


def test_root_replacement():
    g = compile_grammar(
        "RULE wrap PRIORITY 1 : ?x{CAT=V, !DONE} ==> #{CAT=D}(?x{DONE=Y})", SCHEMA
    )
    tree = node({"CAT": "V"}, n=4)
    out = apply(g, tree)
    assert out.dec["CAT"] == "D"
    assert out.children[0] is tree
    assert out.meta["n"] == 4


def test_rule_syntax_error_position():
    with pytest.raises(RuleSyntaxError) as exc:
        compile_grammar("RULE broken PRIORITY 1 : ?x{CAT=V} ==>", SCHEMA)
    assert "line 1" in str(exc.value)


def test_rules_cannot_touch_meta():
    # the rule language has no syntax for meta fields; a rewrite that moves
    # and redecorates nodes must keep the trace indices intact
    g = compile_grammar(
        "RULE swap PRIORITY 1 : ?p{!DONE}(?x ?y) ==> ?p{DONE=Y}(?y ?x)", SCHEMA
    )
    a = node({"CAT": "N"}, n=1, t=10)
    b = node({"CAT": "A"}, n=2, t=11)
    tree = node({"CAT": "V"}, [a, b], n=3, t=12)
    out = apply(g, tree)
    assert [c.meta["t"] for c in out.children] == [11, 10]
    assert out.meta == {"n": 3, "t": 12}


def test_projectivity_checker_rejects_shared_nodes():
    shared = node({"CAT": "N"})
    tree = node({"CAT": "V"}, [shared, shared])
    with pytest.raises(ValueError):
        check_projective(tree)
