import threading

import pytest

from deconv.errors import LingwareError, NotInDictionary
from deconv.lexicon import (
    AssocCounts,
    Lexicon,
    Profile,
    parse_profiles,
)
from deconv.uw import parse_uw


def write_dict(tmp_path, lines, name="main.tsv"):
    path = tmp_path / name
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


BASIC = [
    "chair(icl>furniture)\tchaise\tN\t-\t1",
    "chair(icl>furniture)\tfauteuil\tN\t-\t1",
    "cat(icl>animal)\tchat\tN\t-\t1",
    "eat(icl>action)\tmanger\tV\tcooking\t1",
]

UNITS = [
    "chaise\tnom\tchaise\tN\ts\tF\t-",
    "fauteuil\tnom\tfauteuil\tN\ts\tM\t-",
    "chat\tnom\tchat\tN\ts\tM\t-",
    "manger\tvrb\tmanger\tV\ter\t-\t-",
]


@pytest.fixture
def lexicon(tmp_path):
    lex = Lexicon()
    lex.load_dictionary(write_dict(tmp_path, BASIC), "main")
    lex.load_units(write_dict(tmp_path, UNITS, "units.tsv"))
    lex.check_units()
    return lex


def test_lookup_returns_all_candidates(lexicon):
    profile = Profile("default")
    counts = AssocCounts()
    ranked = lexicon.lookup_lus(parse_uw("chair(icl>furniture)"), profile, counts)
    assert [e.lu for e, _ in ranked] == ["chaise", "fauteuil"]  # tie: load order
    assert [s for _, s in ranked] == [1.0, 1.0]


def test_lookup_single_entry(lexicon):
    ranked = lexicon.lookup_lus(parse_uw("cat(icl>animal)"), Profile("p"), AssocCounts())
    assert len(ranked) == 1
    assert ranked[0][1] == 1.0


def test_lookup_missing_raises(lexicon):
    with pytest.raises(NotInDictionary):
        lexicon.lookup_lus(parse_uw("dog(icl>animal)"), Profile("p"), AssocCounts())


def test_counts_shift_ranking(lexicon):
    counts = AssocCounts()
    uw = parse_uw("chair(icl>furniture)")
    counts.increment("uw2lu", (uw.text, "fauteuil"))
    counts.increment("uw2lu", (uw.text, "fauteuil"))
    ranked = lexicon.lookup_lus(uw, Profile("p"), counts)
    assert ranked[0][0].lu == "fauteuil"
    assert ranked[0][1] == 3.0


def test_count_monotonicity(lexicon):
    # bumping a count never lowers that LU's rank
    counts = AssocCounts()
    uw = parse_uw("chair(icl>furniture)")

    def rank_of(lu):
        ranked = lexicon.lookup_lus(uw, Profile("p"), counts)
        return [e.lu for e, _ in ranked].index(lu)

    before = rank_of("chaise")
    for _ in range(3):
        counts.increment("uw2lu", (uw.text, "chaise"))
        after = rank_of("chaise")
        assert after <= before
        before = after


def test_domain_boost(lexicon):
    profile = Profile("cook", domain_boosts=(("cooking", 2.0),))
    ranked = lexicon.lookup_lus(parse_uw("eat(icl>action)"), profile, AssocCounts())
    assert ranked[0][1] == 3.0


def test_duplicate_entry_rejected(tmp_path):
    lex = Lexicon()
    with pytest.raises(LingwareError) as exc:
        lex.load_dictionary(
            write_dict(tmp_path, ["a\tx\tN\t-\t1", "a\tx\tN\t-\t2"]), "m"
        )
    assert ":2:" in str(exc.value)


def test_missing_derivations_detected(tmp_path):
    lex = Lexicon()
    lex.load_dictionary(write_dict(tmp_path, BASIC), "main")
    lex.load_units(write_dict(tmp_path, UNITS[:2], "units.tsv"))
    with pytest.raises(LingwareError):
        lex.check_units()


def test_counts_fresh_and_repeat_increments(tmp_path):
    counts = AssocCounts(tmp_path / "counts.log")
    assert counts.increment("uw2lu", ("a", "x")) == 1
    assert counts.increment("uw2lu", ("a", "x")) == 2


def test_counts_survive_save_and_load(tmp_path):
    path = tmp_path / "counts.log"
    counts = AssocCounts(path)
    counts.increment("uw2lu", ("a", "x"))
    counts.increment("uw2uw", ("w1", "w2"))
    counts.save()
    counts.close()
    reloaded = AssocCounts.load(path)
    assert reloaded.get("uw2lu", ("a", "x")) == 1
    assert reloaded.get("uw2uw", ("w1", "w2")) == 1


def test_counts_log_replayed_without_save(tmp_path):
    path = tmp_path / "counts.log"
    counts = AssocCounts(path)
    counts.increment("uw2lu", ("a", "x"))
    counts.close()  # no save: the append-only log still has the increment
    assert AssocCounts.load(path).get("uw2lu", ("a", "x")) == 1


def test_concurrent_increments_serialize(tmp_path):
    counts = AssocCounts(tmp_path / "counts.log")
    key = ("chair", "chaise")

    def bump():
        for _ in range(50):
            counts.increment("uw2lu", key)

    threads = [threading.Thread(target=bump) for _ in range(2)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert counts.get("uw2lu", key) == 100


def test_profile_parsing():
    profiles = parse_profiles(
        """
[default]
dictionaries = main, extra
boost.domain.cooking = 2
default.N.number = sg
default.N.determination = def
default.V.tense = present
distance.headword = 10
distance.restriction = 1
distance.conflict = 2

[tech]
dictionaries = extra
"""
    )
    p = profiles["default"]
    assert p.dictionary_priorities == ("main", "extra")
    assert p.boost("cooking") == 2.0
    assert p.default_for("N", "number") == "sg"
    assert p.covered_classes("N") == ["number", "determination"]
    assert p.distance_params.headword_mismatch == 10.0
    assert profiles["tech"].dictionary_priorities == ("extra",)


def test_dictionary_priority_orders_ties(tmp_path):
    lex = Lexicon()
    lex.load_dictionary(write_dict(tmp_path, ["w\ta\tN\t-\t1"], "d1.tsv"), "d1")
    lex.load_dictionary(write_dict(tmp_path, ["w\tb\tN\t-\t1"], "d2.tsv"), "d2")
    ranked = lex.lookup_lus(
        parse_uw("w"), Profile("p", dictionary_priorities=("d2", "d1")), AssocCounts()
    )
    assert [e.lu for e, _ in ranked] == ["b", "a"]
