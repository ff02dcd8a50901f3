import random

import pytest

from ssa_audit import corpus
from ssa_audit.errors import NoSense
from ssa_audit.lexsem import (
    LexicalResources,
    Morphology,
    SenseInventory,
    build_substitution_profile,
    disambiguate,
    morphological_set,
)


def sent(text, annotator):
    return corpus.tokenize(text, annotator)


class TestDisambiguate:
    def test_recommend_defaults_to_first_sense(self, res, annotator):
        s = sent("I highly recommend it", annotator)
        sense = disambiguate(s, 2, res)
        assert sense.gloss == "express a good opinion of"

    def test_single_sense_word(self, res, annotator):
        s = sent("The company reported", annotator)
        sense = disambiguate(s, 1, res)
        assert sense.sense_id == "company.n.01"

    def test_context_overlap_selects_second_sense(self, res, annotator):
        # gloss of set.v.02 contains "date"; overlap 1 beats 0 for the
        # other senses, so Lesk must pick it over the first-listed sense
        s = sent("They set a launch date", annotator)
        sense = disambiguate(s, 1, res)
        assert sense.sense_id == "set.v.02"

    def test_unknown_word_raises(self, res, annotator):
        s = sent("florble it", annotator)
        with pytest.raises(NoSense):
            disambiguate(s, 0, res)

    def test_tie_break_is_inventory_order(self, res, annotator):
        # no context overlap for either win sense: first sense wins
        s = sent("They will win", annotator)
        assert disambiguate(s, 2, res).sense_id == "win.v.01"


class TestMorphologicalSet:
    def test_recommend_inflections_and_derivation(self, res, annotator):
        s = sent("I highly recommend it", annotator)
        forms = morphological_set(s, 2, res)
        assert "recommends" in forms
        assert "recommendation" in forms
        assert forms == {
            "recommends", "recommended", "recommending", "recommendation"
        }

    def test_irregular_verb(self, res, annotator):
        s = sent("They will win", annotator)
        forms = morphological_set(s, 2, res)
        assert {"won", "winning", "wins", "winner"} <= forms

    def test_excludes_the_word_itself(self, res, annotator):
        s = sent("They will win", annotator)
        assert "win" not in morphological_set(s, 2, res)

    def test_inflected_token_includes_its_lemma(self, res, annotator):
        s = sent("The company misses expectations", annotator)
        forms = morphological_set(s, 2, res)
        assert "miss" in forms
        assert "misses" not in forms

    def test_unknown_word_uses_rule_inflections(self, res, annotator):
        s = sent("They blorked it", annotator)
        forms = morphological_set(s, 1, res)
        assert forms  # rule-based guesses, never empty for alphabetic words


class TestSubstitutionProfile:
    def test_recommend_profile_matches_hand_derivation(self, res, annotator):
        s = sent("I highly recommend it", annotator)
        p = build_substitution_profile(s, 2, res)
        assert p.m == {"commend"}
        assert p.mm == {"urge", "advocate"}
        assert p.ml == {"recommends", "recommended", "recommending", "recommendation"}
        assert p.a == frozenset()
        p.check_invariants()

    def test_set_profile_brute_force_enumeration(self, res, annotator):
        # disambiguated sense: set.v.02 {set, fix, establish, determine, define}
        # other senses: set.v.01 {set, put, place, position},
        #               set.n.01 {set, collection, group}
        # ML: verb forms {sets, setting} + noun plural {sets} + derived {setting}
        s = sent("They set a launch date", annotator)
        p = build_substitution_profile(s, 1, res)
        assert p.ml == {"sets", "setting"}
        assert p.m == {"fix", "establish", "determine", "define"}
        assert p.mm == {"put", "place", "position", "collection", "group"}
        assert p.a == frozenset()
        p.check_invariants()

    def test_win_profile_with_antonyms(self, res, annotator):
        s = sent("They will win the gold medal", annotator)
        p = build_substitution_profile(s, 2, res)
        assert p.m == {"triumph", "prevail"}
        assert p.mm == {"gain", "acquire"}
        assert p.ml == {"wins", "won", "winning", "winner"}
        assert p.a == {"lose"}

    def test_shared_lemma_lands_only_in_matched_set(self, res, annotator):
        # "firm" belongs to both strong senses; subtraction order must
        # leave it in M and keep MM to the remainder
        s = sent("A strong team", annotator)
        p = build_substitution_profile(s, 1, res)
        assert "firm" in p.m
        assert "firm" not in p.mm
        assert p.mm == {"robust"}

    def test_single_synonym_sense_gives_empty_m(self, res, annotator):
        # miss.v.01 synonyms == {miss}: after removing the word itself
        # nothing remains
        s = sent("The company misses expectations", annotator)
        p = build_substitution_profile(s, 2, res)
        assert p.m == frozenset()
        assert p.a == {"hit"}

    def test_no_sense_word_keeps_ml_only(self, res, annotator):
        s = sent("They blorked it", annotator)
        p = build_substitution_profile(s, 1, res)
        assert p.m == frozenset() and p.mm == frozenset() and p.a == frozenset()
        assert p.ml

    def test_determinism(self, res, annotator):
        s = sent("They set a launch date", annotator)
        a = build_substitution_profile(s, 1, res)
        b = build_substitution_profile(s, 1, res)
        assert (a.ml, a.m, a.mm, a.a) == (b.ml, b.m, b.mm, b.a)


VOCAB = [
    "recommend", "commend", "urge", "win", "won", "set", "sets", "good",
    "bad", "happy", "big", "strong", "miss", "misses", "company", "team",
    "launch", "date", "rise", "fall", "fast", "slow", "banana", "blorked",
    "gadget", "the", "a", "they", "will", "it", ".",
]


def test_profile_disjointness_fuzz(res, annotator):
    rng = random.Random(20240817)
    for _ in range(300):
        length = rng.randint(1, 8)
        words = [rng.choice(VOCAB) for _ in range(length)]
        s = corpus.sentence_from_pretokenized(words, annotator)
        i = rng.randrange(length)
        p = build_substitution_profile(s, i, res)
        p.check_invariants()


def test_subtraction_order_crafted_inventory():
    # a lemma present in the matched sense, another sense, the antonym
    # list, and the morphology table must surface only once, in ML
    inventory = SenseInventory.from_dict(
        {
            "alpha|VERB": [
                {"id": "alpha.1", "gloss": "first sense", "synonyms": ["alpha", "beta"]},
                {"id": "alpha.2", "gloss": "second sense",
                 "synonyms": ["alpha", "beta", "gamma"], "antonyms": ["beta"]},
            ]
        }
    )
    morph = Morphology({"alpha|VERB": {"VBZ": "beta"}})
    res = LexicalResources(inventory, morph)
    s = corpus.sentence_from_pretokenized(["alpha"], res.annotator())
    p = build_substitution_profile(s, 0, res)
    assert "beta" in p.ml
    assert "beta" not in p.m and "beta" not in p.mm and "beta" not in p.a
    assert p.mm == {"gamma"}
    p.check_invariants()
