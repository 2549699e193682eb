import pytest

from deconv.errors import LingwareError, NoMatchingMorphRule
from deconv.morphgen import (
    MorphRulePack,
    generate,
    realize_leaf,
    strip_marks,
)
from deconv.rewrite.tree import TreeNode

from conftest import DATA_DIR


@pytest.fixture(scope="module")
def pack():
    return MorphRulePack.load(DATA_DIR / "morph")


def leaf(dec, i=None, n=None):
    meta = {}
    if i is not None:
        meta["i"] = i
    if n is not None:
        meta["n"] = n
    return TreeNode(dec=dec, meta=meta)


def tree(*leaves):
    return TreeNode(dec={"CAT": "V"}, children=list(leaves))


def test_elision_le_arbre(pack):
    umc = tree(
        leaf({"CAT": "D", "DET": "DEF", "GEN": "M"}, i=1, n=2),
        leaf({"CAT": "N", "LEMMA": "arbre"}, i=2, n=2),
    )
    # the wrapping node is not a leaf, so only the two tokens render
    umc.children[0].meta["i"] = 1
    out = generate(TreeNode(dec={"CAT": "V"}, children=umc.children), pack)
    assert out.rendered == "L'arbre."
    assert [t.text for t in out.tokens] == ["L'", "arbre", "."]
    assert out.tokens[0].mark == 1 and out.tokens[1].mark == 2
    assert out.tokens[2].mark is None


def test_verb_present_third_singular(pack):
    assert realize_leaf({"CAT": "V", "PARA": "uire", "LEMMA": "détruire"}, pack) == "détruit"
    assert realize_leaf(
        {"CAT": "V", "PARA": "uire", "LEMMA": "détruire", "NUM": "PL"}, pack
    ) == "détruisent"
    assert realize_leaf({"CAT": "V", "PARA": "er", "LEMMA": "manger"}, pack) == "mange"
    assert realize_leaf(
        {"CAT": "V", "PARA": "er", "LEMMA": "manger", "VFORM": "PP"}, pack
    ) == "mangé"


def test_articles(pack):
    assert realize_leaf({"CAT": "D", "DET": "DEF", "GEN": "F"}, pack) == "la"
    assert realize_leaf({"CAT": "D", "DET": "DEF", "NUM": "PL"}, pack) == "les"
    assert realize_leaf({"CAT": "D", "DET": "IND", "GEN": "F"}, pack) == "une"


def test_noun_plurals(pack):
    assert realize_leaf({"CAT": "N", "LEMMA": "eau", "NUM": "PL", "PARA": "x"}, pack) == "eaux"
    assert realize_leaf({"CAT": "N", "LEMMA": "maison", "NUM": "PL", "PARA": "s"}, pack) == "maisons"


def test_adjective_agreement_forms(pack):
    dec = {"CAT": "A", "LEMMA": "grand", "PARA": "std"}
    assert realize_leaf(dec, pack) == "grand"
    assert realize_leaf({**dec, "GEN": "F"}, pack) == "grande"
    assert realize_leaf({**dec, "GEN": "F", "NUM": "PL"}, pack) == "grandes"
    assert realize_leaf({"CAT": "A", "LEMMA": "rouge", "PARA": "ae", "GEN": "F"}, pack) == "rouge"


def test_empty_tree(pack):
    out = generate(None, pack)
    assert out.rendered == ""
    assert out.tokens == ()


def test_marks_strip_to_plain_output(pack):
    umc = tree(
        leaf({"CAT": "D", "DET": "DEF"}, i=1, n=3),
        leaf({"CAT": "N", "LEMMA": "homme"}, i=2, n=3),
        leaf({"CAT": "V", "PARA": "er", "LEMMA": "manger"}, i=3, n=1),
    )
    out = generate(umc, pack)
    assert strip_marks(out.marked) == out.rendered
    assert out.rendered == "L'homme mange."


def test_token_order_is_leaf_order(pack):
    umc = tree(
        leaf({"CAT": "N", "LEMMA": "chat"}, i=1, n=1),
        leaf({"CAT": "N", "LEMMA": "chien"}, i=2, n=2),
    )
    out = generate(umc, pack)
    assert [t.text for t in out.tokens[:2]] == ["Chat", "chien"]


def test_token_offsets_index_into_rendered(pack):
    umc = tree(
        leaf({"CAT": "D", "DET": "DEF"}, i=1, n=2),
        leaf({"CAT": "N", "LEMMA": "arbre"}, i=2, n=2),
        leaf({"CAT": "V", "PARA": "er", "LEMMA": "chanter"}, i=3, n=1),
    )
    out = generate(umc, pack)
    for token in out.tokens:
        assert out.rendered[token.start : token.end] == token.text


def test_fallback_rule_required():
    with pytest.raises(LingwareError):
        MorphRulePack.parse("CAT=N\tlemma\n", "", "")


def test_unknown_affix_rejected():
    with pytest.raises(LingwareError):
        MorphRulePack.parse("*\tlemma+AFX_NOPE\n", "AFX_S\ts\n", "")


def test_no_matching_rule_without_fallback_coverage():
    pack = MorphRulePack.parse("*\tlemma\n", "", "")
    # fallback realizes the LU verbatim
    assert realize_leaf({"CAT": "N", "LU": "rock"}, pack) == "rock"


def test_emit_marks_flag_selects_text(pack):
    umc = tree(leaf({"CAT": "N", "LEMMA": "chat"}, i=1, n=1))
    marked = generate(umc, pack, emit_marks=True)
    plain = generate(umc, pack, emit_marks=False)
    assert marked.text == marked.marked
    assert plain.text == plain.rendered
