import math
import random
from collections import Counter
from dataclasses import dataclass

import numpy as np
import pytest

from ssa_audit import corpus
from ssa_audit.adapters import HashEncoder, StaticGrammarChecker
from ssa_audit.audit import (
    CurvePoint,
    RandomBands,
    SubstitutionType,
    audit_pairs,
    aupr,
    build_swap_series,
    candidate_composition,
    classify_substitution,
    convert_verb_inflections,
    detector_eval,
    encoder_sensitivity_curve,
    eligible_positions,
    grammar_stress,
    profile_set,
)
from ssa_audit.corpus import AdversarialPair
from ssa_audit.embeddings import VectorStore
from ssa_audit.errors import (
    AdapterError,
    EmptySeries,
    InsufficientData,
    NotASubstitution,
)
from ssa_audit.lexsem import build_substitution_profile
from ssa_audit.transforms import CandidateSet


def sent(text, annotator):
    return corpus.tokenize(text, annotator)


def pretok(words, annotator):
    return corpus.sentence_from_pretokenized(words, annotator)


def make_pair(orig, adv, annotator, label=None):
    return AdversarialPair.from_sentences(
        pretok(orig.split(), annotator), pretok(adv.split(), annotator), label
    )


def aupr_oracle(pos, neg):
    """Group-based precision-at-rank: ties put negatives first, and tied
    positives occupy consecutive ranks."""
    cp, cn = Counter(pos), Counter(neg)
    scores = sorted(set(pos) | set(neg), reverse=True)
    seen = seen_pos = 0
    total = 0.0
    for s in scores:
        npos, nneg = cp.get(s, 0), cn.get(s, 0)
        base = seen + nneg
        for t in range(1, npos + 1):
            total += (seen_pos + t) / (base + t)
        seen += npos + nneg
        seen_pos += npos
    return total / len(pos)


class TestClassify:
    @pytest.fixture()
    def recommend_profile(self, res, annotator):
        s = sent("I highly recommend it", annotator)
        return build_substitution_profile(s, 2, res)

    def test_matched(self, recommend_profile):
        assert classify_substitution(recommend_profile, "commend") is SubstitutionType.MATCHED

    def test_mismatched(self, recommend_profile):
        assert classify_substitution(recommend_profile, "urge") is SubstitutionType.MISMATCHED

    def test_morphological(self, recommend_profile):
        label = classify_substitution(recommend_profile, "recommends")
        assert label is SubstitutionType.MORPHOLOGICAL

    def test_other(self, recommend_profile):
        assert classify_substitution(recommend_profile, "banana") is SubstitutionType.OTHER

    def test_identity_rejected(self, recommend_profile):
        with pytest.raises(NotASubstitution):
            classify_substitution(recommend_profile, "Recommend")

    def test_antonym(self, res, annotator):
        s = sent("The movie was good", annotator)
        profile = build_substitution_profile(s, 3, res)
        assert classify_substitution(profile, "bad") is SubstitutionType.ANTONYM

    def test_single_label_totality(self, res, annotator):
        rng = random.Random(4)
        s = sent("They will win the gold medal", annotator)
        profile = build_substitution_profile(s, 2, res)
        pool = sorted(profile.ml | profile.m | profile.mm | profile.a) + ["qux"]
        for word in pool:
            label = classify_substitution(profile, word)
            assert isinstance(label, SubstitutionType)
        del rng


class TestAuditPairs:
    def test_hand_labeled_three_pair_fixture(self, res, annotator):
        pairs = [
            make_pair("I highly recommend it .", "I highly urge it .", annotator),
            make_pair("The movie was good .", "The movie was bad .", annotator),
            make_pair("A strong team will rise .", "A firm team will climb .", annotator),
        ]
        report = audit_pairs(pairs, res)
        assert report.counts == {
            "matched": 2,       # strong->firm, rise->climb
            "mismatched": 1,    # recommend->urge
            "morphological": 0,
            "antonym": 1,       # good->bad
            "other": 0,
        }
        assert report.total == 4
        assert report.pairs == 3
        assert report.per_pair_swaps == pytest.approx(4 / 3)

    def test_fraction_sum(self, res, demo_pairs):
        report = audit_pairs(demo_pairs, res)
        assert sum(report.fractions().values()) == pytest.approx(1.0)
        assert sum(report.counts.values()) == report.total

    def test_empty_input(self, res):
        report = audit_pairs([], res)
        assert report.total == 0 and report.pairs == 0
        assert all(v == 0 for v in report.counts.values())

    def test_no_sense_recorded(self, res, annotator):
        pairs = [make_pair("the blarg runs .", "the fwoop runs .", annotator)]
        report = audit_pairs(pairs, res)
        assert report.no_sense == 1
        assert report.counts["other"] == 1


@dataclass
class StubTransform:
    """Duck-typed stand-in returning canned candidates per position word."""

    by_word: dict
    k: int = 30

    @property
    def config(self):
        return self

    def __call__(self, sentence, i):
        words = self.by_word.get(sentence[i].lower, [])
        return CandidateSet(i, "wordnet", tuple((w, 1.0) for w in words), self.k)


class TestCandidateComposition:
    def test_five_known_type_words(self, res, annotator):
        pair = make_pair(
            "They will win the gold medal .",
            "They will gain the gold medal .",
            annotator,
        )
        transform = StubTransform(
            {"win": ["triumph", "gain", "won", "lose", "banana"]}, k=5
        )
        report = candidate_composition([pair], transform, res)
        assert report.positions == 1
        assert report.means() == {
            "matched": 1.0,
            "mismatched": 1.0,
            "morphological": 1.0,
            "antonym": 1.0,
            "other": 1.0,
        }

    def test_counts_sum_to_candidate_totals(self, res, annotator, demo_pairs):
        rng = random.Random(8)
        vocab = ["triumph", "gain", "won", "lose", "banana", "fix", "sets", "bad"]
        by_word = {}
        for pair in demo_pairs:
            for i in pair.perturbed_indices:
                count = rng.randint(0, 6)
                by_word[pair.original[i].lower] = [
                    rng.choice(vocab) for _ in range(count)
                ]
        transform = StubTransform(by_word, k=6)
        report = candidate_composition(demo_pairs, transform, res)
        expected_total = sum(
            len(by_word.get(p.original[i].lower, []))
            for p in demo_pairs
            for i in p.perturbed_indices
        )
        assert sum(report.totals.values()) == expected_total

    def test_adapter_errors_skip_position(self, res, annotator):
        class FailingTransform(StubTransform):
            def __call__(self, sentence, i):
                raise AdapterError("down")

        pair = make_pair("I highly recommend it .", "I highly urge it .", annotator)
        report = candidate_composition([pair], FailingTransform({}), res)
        assert report.positions == 0
        assert report.error_positions == 1


class TestAupr:
    def test_perfect_separation(self):
        assert aupr([0.9, 0.8], [0.1, 0.2]) == pytest.approx(1.0)

    def test_interleaved_hand_computed(self):
        # ranks: 0.8+, 0.6-, 0.4+, 0.2-  ->  (1/1 + 2/3) / 2
        assert aupr([0.8, 0.4], [0.6, 0.2]) == pytest.approx(5 / 6)

    def test_single_positive_on_top(self):
        assert aupr([0.99], [0.5, 0.4, 0.3]) == pytest.approx(1.0)

    def test_pessimistic_ties(self):
        # tied scores rank the negative first: precision at the positive is 1/2
        assert aupr([0.5], [0.5]) == pytest.approx(0.5)

    def test_empty_raises(self):
        with pytest.raises(InsufficientData):
            aupr([], [0.1])
        with pytest.raises(InsufficientData):
            aupr([0.1], [])

    def test_oracle_equivalence_randomized(self):
        rng = random.Random(123)
        for _ in range(100):
            npos = rng.randint(1, 25)
            nneg = rng.randint(1, 25)
            # draw from a small grid so ties actually occur
            pos = [rng.choice([0.1, 0.25, 0.5, 0.75, 0.9]) for _ in range(npos)]
            neg = [rng.choice([0.1, 0.25, 0.5, 0.75, 0.9]) for _ in range(nneg)]
            assert aupr(pos, neg) == pytest.approx(aupr_oracle(pos, neg), abs=1e-12)

    def test_invariant_under_monotone_transform(self):
        rng = random.Random(7)
        pos = [rng.random() for _ in range(20)]
        neg = [rng.random() for _ in range(30)]
        base = aupr(pos, neg)
        for f in (lambda x: 3 * x + 1, math.exp, lambda x: x**3):
            assert aupr([f(x) for x in pos], [f(x) for x in neg]) == pytest.approx(base)


def tiny_win_store():
    # hand-designed 2-d vectors; cosines are simple closed forms
    words = ["win", "triumph", "prevail", "gain", "acquire", "lose", "wins", "won"]
    matrix = np.array(
        [
            [1.0, 0.0],      # win
            [1.0, 0.1],      # triumph   cos = 1/sqrt(1.01)  ~ 0.99504
            [1.0, 0.2],      # prevail   cos = 1/sqrt(1.04)  ~ 0.98058
            [1.0, 0.15],     # gain      cos = 1/sqrt(1.0225)~ 0.98895
            [0.0, 1.0],      # acquire   cos = 0
            [-1.0, 0.0],     # lose      cos = -1
            [1.0, 0.05],     # wins      cos = 1/sqrt(1.0025)~ 0.99875
            [1.0, 0.02],     # won       cos = 1/sqrt(1.0004)~ 0.99980
        ]
    )
    return VectorStore(words, matrix)


class TestDetectorEval:
    @pytest.fixture()
    def win_pair(self, annotator):
        return make_pair(
            "They will win the gold medal .",
            "They will gain the gold medal .",
            annotator,
        )

    def test_hand_computed_auprs(self, res, win_pair):
        # positives: triumph ~0.99504, prevail ~0.98058
        # mismatched negatives: gain ~0.98895 (between them), acquire 0
        #   -> AP = (1/1 + 2/3) / 2 = 5/6
        # antonym negative: lose -1 -> AP = 1
        # morphological negatives: wins, won (both above the positives)
        #   -> AP = (1/3 + 2/4) / 2 = 5/12
        report = detector_eval(
            [win_pair], tiny_win_store(), res,
            types=["mismatched", "antonym", "morphological"],
        )
        values = report.by_type()
        assert values["mismatched"] == pytest.approx(5 / 6)
        assert values["antonym"] == pytest.approx(1.0)
        assert values["morphological"] == pytest.approx(5 / 12)

    def test_matches_rank_oracle(self, res, win_pair):
        store = tiny_win_store()
        word = "win"
        profile = build_substitution_profile(win_pair.original, 2, res)
        pos = [store.similarity(word, m) for m in sorted(profile.m)]
        neg = [store.similarity(word, v) for v in sorted(profile.mm) if v in store]
        report = detector_eval([win_pair], store, res, types=["mismatched"])
        assert report.by_type()["mismatched"] == pytest.approx(aupr_oracle(pos, neg))

    def test_all_positives_above_gives_one(self, res, annotator):
        words = ["good", "fine", "nice", "bad", "evil"]
        matrix = np.array([[1, 0], [1, 0.1], [1, 0.2], [-1, 0.1], [-1, 0.2]], dtype=float)
        pair = make_pair("The movie was good .", "The movie was bad .", annotator)
        report = detector_eval([pair], VectorStore(words, matrix), res, types=["antonym"])
        assert report.by_type()["antonym"] == pytest.approx(1.0)

    def test_zero_sample_type_omitted_with_warning(self, res, win_pair):
        # the tiny store has no morphological words for "recommend" pairs;
        # easier: ask for random types without providing bands
        report = detector_eval(
            [win_pair], tiny_win_store(), res, types=["random_high"]
        )
        assert report.rows == []
        assert report.warnings

    def test_random_bands_balance_positives(self, res, win_pair, demo_store, demo_freq):
        bands = RandomBands(demo_freq, {"high": (5, 40), "low": (40, 100)})
        report = detector_eval(
            [win_pair], demo_store, res,
            types=["random_high", "random_low"], bands=bands, seed=3,
        )
        for _, _, n_pos, n_neg in report.rows:
            assert n_pos == n_neg

    def test_seeded_determinism(self, res, win_pair, demo_store, demo_freq):
        bands = RandomBands(demo_freq, {"high": (5, 40), "low": (40, 100)})
        a = detector_eval([win_pair], demo_store, res, bands=bands, seed=3)
        b = detector_eval([win_pair], demo_store, res, bands=bands, seed=3)
        assert a.rows == b.rows


ELIGIBLE_TEXT = "The strong team will win a big happy rise ."


class TestSwapSeries:
    @pytest.fixture()
    def rich_pair(self, annotator):
        # perturb strong, win, big, happy, rise: all four sets non-empty
        return make_pair(
            ELIGIBLE_TEXT,
            "The weak team will lose a small sad fall .",
            annotator,
        )

    def test_eligibility_guard(self, res, annotator):
        # recommend carries no antonyms: filtered out of the pool
        pair = make_pair("I highly recommend it .", "I highly urge it .", annotator)
        profiles = {
            i: build_substitution_profile(pair.original, i, res)
            for i in pair.perturbed_indices
        }
        assert eligible_positions(pair, profiles) == []
        with pytest.raises(EmptySeries):
            build_swap_series(pair, "matched", res, seed=1)

    def test_hamming_distance_equals_n(self, res, rich_pair):
        series = build_swap_series(rich_pair, "matched", res, n_max=10, seed=5)
        original = rich_pair.original
        for n, variant in enumerate(series.variants, start=1):
            diff = sum(
                1
                for i in range(original.length)
                if original[i].lower != variant[i].lower
            )
            assert diff == n

    def test_type_purity(self, res, rich_pair):
        for series_type in ("matched", "mismatched", "morphological", "antonym"):
            series = build_swap_series(rich_pair, series_type, res, n_max=10, seed=9)
            profiles = {
                i: build_substitution_profile(rich_pair.original, i, res)
                for i in rich_pair.perturbed_indices
            }
            for n, variant in enumerate(series.variants, start=1):
                p = series.order[n - 1]
                assert variant[p].lower in profile_set(profiles[p], series_type)

    def test_random_band_purity(self, res, rich_pair, demo_freq):
        bands = RandomBands(demo_freq, {"high": (5, 40), "low": (40, 100)})
        series = build_swap_series(
            rich_pair, "random_high", res, n_max=10, seed=9, bands=bands
        )
        pool = set(bands.pool("random_high"))
        for n, variant in enumerate(series.variants, start=1):
            p = series.order[n - 1]
            assert variant[p].lower in pool

    def test_seed_determinism_and_variation(self, res, rich_pair):
        a = build_swap_series(rich_pair, "matched", res, n_max=10, seed=21)
        b = build_swap_series(rich_pair, "matched", res, n_max=10, seed=21)
        assert a.order == b.order
        assert [v.surfaces() for v in a.variants] == [v.surfaces() for v in b.variants]
        orders = {build_swap_series(rich_pair, "matched", res, seed=s).order
                  for s in range(8)}
        assert len(orders) > 1

    def test_n_max_caps_steps(self, res, rich_pair):
        series = build_swap_series(rich_pair, "matched", res, n_max=2, seed=1)
        assert series.n_max == 2

    def test_fuzzed_pairs(self, res, annotator):
        rng = random.Random(31)
        eligible_words = ["strong", "win", "big", "happy", "rise", "good"]
        filler = ["the", "team", "banana", "will", "quickly", "gadget", "."]
        for _ in range(60):
            length = rng.randint(3, 12)
            words = [rng.choice(eligible_words + filler) for _ in range(length)]
            perturbed = sorted(
                rng.sample(range(length), rng.randint(1, max(1, length // 2)))
            )
            adv = list(words)
            for i in perturbed:
                adv[i] = words[i] + "qq"
            pair = make_pair(" ".join(words), " ".join(adv), annotator)
            profiles = {
                i: build_substitution_profile(pair.original, i, res)
                for i in pair.perturbed_indices
            }
            pool = eligible_positions(pair, profiles)
            seed = rng.randint(0, 10**6)
            if not pool:
                with pytest.raises(EmptySeries):
                    build_swap_series(pair, "antonym", res, seed=seed)
                continue
            series_type = rng.choice(
                ["matched", "mismatched", "morphological", "antonym"]
            )
            series = build_swap_series(pair, series_type, res, n_max=10, seed=seed)
            assert set(series.order) == set(pool)
            again = build_swap_series(pair, series_type, res, n_max=10, seed=seed)
            assert [v.surfaces() for v in series.variants] == [
                v.surfaces() for v in again.variants
            ]
            original = pair.original
            for n, variant in enumerate(series.variants, start=1):
                diff = [
                    i
                    for i in range(original.length)
                    if original[i].lower != variant[i].lower
                ]
                assert diff == sorted(series.order[:n])
                assert variant[series.order[n - 1]].lower in profile_set(
                    profiles[series.order[n - 1]], series_type
                )


class FailingEncoder:
    def __init__(self, after):
        self.after = after
        self.calls = 0

    def encode(self, texts):
        self.calls += 1
        if self.calls > self.after:
            raise AdapterError("encoder down")
        return HashEncoder(16).encode(texts)


class TestEncoderCurve:
    def test_identical_windows_score_one(self, annotator):
        encoder = HashEncoder(16)
        emb = encoder.encode(["same text here", "same text here"])
        from ssa_audit.embeddings import cosine

        assert cosine(emb[0], emb[1]) == pytest.approx(1.0)

    @pytest.fixture()
    def rich_pairs(self, annotator):
        texts = [
            ("The strong team will win a big happy rise .",
             "The weak team will lose a small sad fall ."),
            ("A good strong company will rise today .",
             "A bad weak company will fall today ."),
            ("They win the big happy game .",
             "They lose the small sad game ."),
        ]
        return [make_pair(a, b, annotator) for a, b in texts]

    def test_curves_shape_and_samples(self, res, rich_pairs):
        report = encoder_sensitivity_curve(
            rich_pairs, HashEncoder(16), res,
            types=["matched", "antonym"], n_max=4, w=2, seed=2,
        )
        for series_type in ("matched", "antonym"):
            points = report.curves[series_type]
            assert points, "expected curve points"
            for point in points:
                assert point.n >= 1 and point.samples >= 1
                assert -1.0 <= point.mean <= 1.0
            ns = [p.n for p in points]
            assert ns == sorted(ns)
        assert not report.partial

    def test_raw_scores_match_points(self, res, rich_pairs):
        report = encoder_sensitivity_curve(
            rich_pairs, HashEncoder(16), res, types=["matched"], n_max=3, w=2, seed=2
        )
        for point in report.curves["matched"]:
            raw = report.raw_scores["matched"][point.n]
            assert len(raw) == point.samples
            assert point.mean == pytest.approx(sum(raw) / len(raw))

    def test_vs_previous_mode(self, res, rich_pairs):
        report = encoder_sensitivity_curve(
            rich_pairs, HashEncoder(16), res,
            types=["matched"], n_max=3, w=2, compare_mode="vs_previous", seed=2,
        )
        assert report.curves["matched"]

    def test_whole_sentence_mode(self, res, rich_pairs):
        report = encoder_sensitivity_curve(
            rich_pairs, HashEncoder(16), res, types=["matched"], n_max=3, w=None, seed=2
        )
        assert report.curves["matched"]

    def test_seeded_determinism(self, res, rich_pairs):
        kwargs = dict(types=["matched"], n_max=4, w=2, seed=11)
        a = encoder_sensitivity_curve(rich_pairs, HashEncoder(16), res, **kwargs)
        b = encoder_sensitivity_curve(rich_pairs, HashEncoder(16), res, **kwargs)
        assert [(p.n, p.mean) for p in a.curves["matched"]] == [
            (p.n, p.mean) for p in b.curves["matched"]
        ]

    def test_adapter_failure_flags_partial(self, res, rich_pairs):
        report = encoder_sensitivity_curve(
            rich_pairs, FailingEncoder(after=1), res,
            types=["matched"], n_max=3, w=2, seed=2,
        )
        assert report.partial
        assert report.error

    def test_ineligible_pairs_counted(self, res, annotator):
        pair = make_pair("I highly recommend it .", "I highly urge it .", annotator)
        report = encoder_sensitivity_curve(
            [pair], HashEncoder(16), res, types=["matched"], n_max=3, w=2, seed=2
        )
        assert report.skipped_pairs["matched"] == 1
        assert report.curves["matched"] == []

    def test_curve_point_invariants(self):
        with pytest.raises(ValueError):
            CurvePoint(0, 0.5, 0.0, 3)
        with pytest.raises(ValueError):
            CurvePoint(1, 0.5, 0.0, 0)


class TestConvertVerbInflections:
    def test_third_person_to_base(self, res, annotator):
        s = sent("Storage servers bruise earnings but company misses expectations .", annotator)
        converted, count = convert_verb_inflections(s, res)
        idx = s.surfaces().index("misses")
        assert converted[idx].surface == "miss"
        assert count >= 1

    def test_past_to_gerund(self, res, annotator):
        s = sent("Michael Phelps won the gold medal .", annotator)
        converted, count = convert_verb_inflections(s, res)
        assert converted[2].surface == "winning"

    def test_base_to_third_person(self, res, annotator):
        s = sent("Phelps won the medal and set a world record .", annotator)
        converted, count = convert_verb_inflections(s, res)
        idx = s.surfaces().index("set")
        assert converted[idx].surface == "sets"
        assert converted[1].surface == "winning"
        assert count == 2

    def test_non_verbs_untouched(self, res, annotator):
        s = sent("The company misses expectations .", annotator)
        converted, _ = convert_verb_inflections(s, res)
        for i, token in enumerate(s.tokens):
            if token.pos not in ("VB", "VBP", "VBZ", "VBD", "VBG", "VBN"):
                assert converted[i].surface == token.surface

    def test_capitalization_preserved(self, res, annotator):
        s = pretok(["Winning", "teams", "win", "."], annotator)
        converted, _ = convert_verb_inflections(s, res)
        for tok in converted:
            if tok.surface[0].isalpha():
                assert tok.surface[0].isupper() == tok.surface[0].isupper()

    def test_every_converted_token_differs_fuzz(self, res, annotator):
        rng = random.Random(77)
        verbs = ["win", "wins", "won", "winning", "set", "sets", "setting",
                 "miss", "misses", "missed", "rise", "rises", "rose", "run",
                 "runs", "ran", "running", "falls", "fell", "recommend",
                 "recommends", "recommended"]
        others = ["the", "a", "team", "company", "banana", "good", "happy",
                  "quickly", ".", "they", "it"]
        for _ in range(300):
            length = rng.randint(1, 12)
            words = [rng.choice(verbs + others) for _ in range(length)]
            s = pretok(words, annotator)
            converted, count = convert_verb_inflections(s, res)
            changed = 0
            for before, after in zip(s.tokens, converted.tokens):
                if before.pos in ("VB", "VBP", "VBZ", "VBD", "VBG", "VBN"):
                    if before.lower != after.lower:
                        changed += 1
                else:
                    assert before.surface == after.surface
            assert changed == count


class TestGrammarStress:
    STRESS_TEXTS = [
        "The company misses expectations .",
        "Phelps won the medal .",
        "They set a date .",
    ]

    def test_blind_checker_gives_zero_ratio(self, res, annotator):
        sentences = [sent(t, annotator) for t in self.STRESS_TEXTS]
        report = grammar_stress(sentences, StaticGrammarChecker(()), res)
        assert report.grammatical == 3
        assert report.total_converted >= 3
        assert report.detection_ratio == 0.0

    def test_perfect_checker_gives_ratio_one(self, res, annotator):
        sentences = [sent(t, annotator) for t in self.STRESS_TEXTS]
        converted_forms = []
        for s in sentences:
            converted, _ = convert_verb_inflections(s, res)
            for before, after in zip(s.tokens, converted.tokens):
                if before.surface != after.surface:
                    converted_forms.append(after.surface)
        checker = StaticGrammarChecker(converted_forms)
        report = grammar_stress(sentences, checker, res)
        assert report.total_converted == len(converted_forms) == 3
        assert report.detection_ratio == pytest.approx(1.0)

    def test_unclean_sentences_screened_out(self, res, annotator):
        checker = StaticGrammarChecker(["banana"])
        sentences = [
            sent("The company misses expectations .", annotator),
            sent("banana banana banana", annotator),
        ]
        report = grammar_stress(sentences, checker, res)
        assert report.considered == 2
        assert report.grammatical == 1

    def test_averages(self, res, annotator):
        sentences = [sent(t, annotator) for t in self.STRESS_TEXTS]
        report = grammar_stress(sentences, StaticGrammarChecker(()), res)
        assert report.avg_perturbed_verbs == pytest.approx(
            report.total_converted / report.grammatical
        )
        assert report.avg_detected_errors == 0.0
