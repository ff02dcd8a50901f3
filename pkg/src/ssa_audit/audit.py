"""Validity audits for substitution attacks.

Covers per-swap taxonomy classification, candidate-set composition,
threshold-detector AUPR over word-embedding similarity, swap-series
encoder sensitivity curves, and the verb-inflection grammar stress test.
All audits are pure folds over pairs with order-independent aggregation.
"""

from __future__ import annotations

import random
import statistics
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .adapters import GrammarChecker, SentenceEncoder
from .constraints import VS_ORIGINAL, VS_PREVIOUS, window_extract
from .corpus import AdversarialPair, Sentence, Token
from .embeddings import FrequencyTable, VectorStore, cosine
from .errors import (
    AdapterError,
    EmptyPrediction,
    EmptySeries,
    InsufficientData,
    NotASubstitution,
)
from .lexsem import (
    LexicalResources,
    SubstitutionProfile,
    VERB_TAGS,
    build_substitution_profile,
)
from .transforms import Transform


class SubstitutionType(str, Enum):
    MATCHED = "matched"
    MISMATCHED = "mismatched"
    MORPHOLOGICAL = "morphological"
    ANTONYM = "antonym"
    OTHER = "other"


RANDOM_HIGH = "random_high"
RANDOM_LOW = "random_low"
PROFILE_TYPES = ("matched", "mismatched", "morphological", "antonym")
SERIES_TYPES = PROFILE_TYPES + (RANDOM_HIGH, RANDOM_LOW)
DETECTOR_TYPES = ("mismatched", "antonym", "morphological", RANDOM_HIGH, RANDOM_LOW)

_TYPE_ALIASES = {"morpheme": "morphological", "random-high": RANDOM_HIGH,
                 "random-low": RANDOM_LOW}


def canonical_type(name: str) -> str:
    name = name.strip().casefold().replace("-", "_")
    return _TYPE_ALIASES.get(name, name)


def classify_substitution(
    profile: SubstitutionProfile, replacement: str
) -> SubstitutionType:
    """Label one swap by membership checks in ML, M, MM, A order."""
    word = replacement.casefold()
    if word == profile.word:
        raise NotASubstitution(f"{replacement!r} equals the original word")
    if word in profile.ml:
        return SubstitutionType.MORPHOLOGICAL
    if word in profile.m:
        return SubstitutionType.MATCHED
    if word in profile.mm:
        return SubstitutionType.MISMATCHED
    if word in profile.a:
        return SubstitutionType.ANTONYM
    return SubstitutionType.OTHER


def profile_set(profile: SubstitutionProfile, series_type: str) -> frozenset[str]:
    return {
        "matched": profile.m,
        "mismatched": profile.mm,
        "morphological": profile.ml,
        "antonym": profile.a,
    }[series_type]


# -- taxonomy audit ---------------------------------------------------------


@dataclass
class TaxonomyReport:
    counts: dict[str, int]
    total: int
    pairs: int
    no_sense: int
    per_pair_swaps: float

    def fractions(self) -> dict[str, float]:
        if self.total == 0:
            return {t.value: 0.0 for t in SubstitutionType}
        return {t: c / self.total for t, c in self.counts.items()}


def _has_senses(sentence: Sentence, i: int, res: LexicalResources) -> bool:
    token = sentence[i]
    return res.inventory.has(token.lemma) or res.inventory.has(token.lower)


def merge_taxonomy_reports(parts: Sequence[TaxonomyReport]) -> TaxonomyReport:
    counts = {t.value: 0 for t in SubstitutionType}
    total = pairs = no_sense = 0
    for part in parts:
        for t, c in part.counts.items():
            counts[t] += c
        total += part.total
        pairs += part.pairs
        no_sense += part.no_sense
    per_pair = total / pairs if pairs else 0.0
    return TaxonomyReport(counts, total, pairs, no_sense, per_pair)


def audit_pairs(
    pairs: Iterable[AdversarialPair], res: LexicalResources
) -> TaxonomyReport:
    """Classify every perturbed position of every pair."""
    counts = {t.value: 0 for t in SubstitutionType}
    total = 0
    n_pairs = 0
    no_sense = 0
    for pair in pairs:
        n_pairs += 1
        for i in pair.perturbed_indices:
            profile = build_substitution_profile(pair.original, i, res)
            label = classify_substitution(profile, pair.adversarial[i].lower)
            counts[label.value] += 1
            total += 1
            if not _has_senses(pair.original, i, res):
                no_sense += 1
    per_pair = total / n_pairs if n_pairs else 0.0
    return TaxonomyReport(counts, total, n_pairs, no_sense, per_pair)


# -- candidate-set composition ---------------------------------------------


@dataclass
class CompositionReport:
    k: int
    positions: int
    totals: dict[str, int]
    error_positions: int
    mean_candidates: float

    def means(self) -> dict[str, float]:
        if self.positions == 0:
            return {t: 0.0 for t in self.totals}
        return {t: c / self.positions for t, c in self.totals.items()}


def candidate_composition(
    pairs: Iterable[AdversarialPair],
    transform: Transform,
    res: LexicalResources,
) -> CompositionReport:
    """Classify all k proposals at every perturbed position.

    Per-position type counts sum to the number of proposed candidates;
    adapter failures skip the position and are counted.
    """
    totals = {t.value: 0 for t in SubstitutionType}
    positions = 0
    errors = 0
    n_candidates = 0
    for pair in pairs:
        for i in pair.perturbed_indices:
            try:
                cands = transform(pair.original, i)
            except (AdapterError, EmptyPrediction):
                errors += 1
                continue
            profile = build_substitution_profile(pair.original, i, res)
            positions += 1
            for word in cands.words():
                totals[classify_substitution(profile, word).value] += 1
                n_candidates += 1
    mean_cands = n_candidates / positions if positions else 0.0
    return CompositionReport(
        transform.config.k or 0, positions, totals, errors, mean_cands
    )


def merge_composition_reports(parts: Sequence[CompositionReport]) -> CompositionReport:
    totals = {t.value: 0 for t in SubstitutionType}
    positions = errors = 0
    candidate_sum = 0.0
    k = 0
    for part in parts:
        for t, c in part.totals.items():
            totals[t] += c
        positions += part.positions
        errors += part.error_positions
        candidate_sum += part.mean_candidates * part.positions
        k = part.k
    mean_cands = candidate_sum / positions if positions else 0.0
    return CompositionReport(k, positions, totals, errors, mean_cands)


# -- threshold-detector AUPR -------------------------------------------------


def aupr(positive_scores: Sequence[float], negative_scores: Sequence[float]) -> float:
    """Rank-based average precision with pessimistic tie handling.

    Scores are ranked descending; among equal scores, negatives come
    first. The result is the mean, over positives, of the precision at
    each positive's rank.
    """
    if not positive_scores or not negative_scores:
        raise InsufficientData("both score lists must be non-empty")
    items = [(float(s), 1) for s in positive_scores]
    items += [(float(s), 0) for s in negative_scores]
    items.sort(key=lambda si: (-si[0], si[1]))
    tp = 0
    acc = 0.0
    for rank, (_, is_pos) in enumerate(items, start=1):
        if is_pos:
            tp += 1
            acc += tp / rank
    return acc / len(positive_scores)


@dataclass
class RandomBands:
    """Frequency-band word pools for the two random substitution types."""

    table: FrequencyTable
    intervals: dict[str, tuple[int, int]] | None = None

    def pool(self, band: str) -> list[str]:
        from .embeddings import HIGH_FREQ_BAND, LOW_FREQ_BAND

        bands = self.intervals or {"high": HIGH_FREQ_BAND, "low": LOW_FREQ_BAND}
        key = "high" if band == RANDOM_HIGH else "low"
        lo, hi = bands[key]
        return self.table.words_in_rank_interval(lo, hi)


@dataclass
class DetectorReport:
    rows: list[tuple[str, float, int, int]]  # type, aupr, n_pos, n_neg
    n_positives: int
    oov_positions: int
    warnings: list[str] = field(default_factory=list)

    def by_type(self) -> dict[str, float]:
        return {t: a for t, a, _, _ in self.rows}


def detector_eval(
    pairs: Iterable[AdversarialPair],
    store: VectorStore,
    res: LexicalResources,
    types: Sequence[str] = DETECTOR_TYPES,
    bands: RandomBands | None = None,
    seed: int = 0,
) -> DetectorReport:
    """AUPR of the word-embedding cosine detector, per invalid type.

    Positives are cosines between each perturbed word and its matched-sense
    substitutes; negatives come from the named invalid type. Random bands
    draw as many words per position as that position has positives, so the
    baseline detector sits near 0.5.
    """
    types = [canonical_type(t) for t in types]
    for t in types:
        if t not in DETECTOR_TYPES:
            raise ValueError(f"unknown detector type {t!r}")
    rng = random.Random(seed)
    positives: list[float] = []
    negatives: dict[str, list[float]] = {t: [] for t in types}
    oov_positions = 0
    for pair in pairs:
        for i in pair.perturbed_indices:
            word = pair.original[i].lower
            if word not in store:
                oov_positions += 1
                continue
            profile = build_substitution_profile(pair.original, i, res)
            pos_here = [
                store.similarity(word, m) for m in sorted(profile.m) if m in store
            ]
            positives.extend(pos_here)
            for t in types:
                if t in (RANDOM_HIGH, RANDOM_LOW):
                    if bands is None or not pos_here:
                        continue
                    pool = [
                        w for w in bands.pool(t) if w in store and w != word
                    ]
                    if len(pool) < len(pos_here):
                        continue
                    drawn = rng.sample(pool, len(pos_here))
                    negatives[t].extend(store.similarity(word, v) for v in drawn)
                else:
                    members = profile_set(profile, t)
                    negatives[t].extend(
                        store.similarity(word, v)
                        for v in sorted(members)
                        if v in store
                    )
    rows: list[tuple[str, float, int, int]] = []
    warnings: list[str] = []
    for t in types:
        if not negatives[t] or not positives:
            warnings.append(f"type {t!r} omitted: no scores to rank")
            continue
        rows.append((t, aupr(positives, negatives[t]), len(positives), len(negatives[t])))
    return DetectorReport(rows, len(positives), oov_positions, warnings)


# -- swap series and encoder sensitivity ------------------------------------


@dataclass
class SwapSeries:
    pair: AdversarialPair
    series_type: str
    order: tuple[int, ...]
    variants: tuple[Sentence, ...]
    seed: int

    @property
    def n_max(self) -> int:
        return len(self.variants)


def eligible_positions(
    pair: AdversarialPair, profiles: dict[int, SubstitutionProfile]
) -> list[int]:
    """Perturbed positions whose four profile sets are all non-empty, so
    every series type draws from one shared index pool."""
    return [
        i
        for i in pair.perturbed_indices
        if profiles[i].ml and profiles[i].m and profiles[i].mm and profiles[i].a
    ]


def _match_case(template: str, word: str) -> str:
    if template.isupper() and len(template) > 1:
        return word.upper()
    if template[:1].isupper():
        return word[:1].upper() + word[1:]
    return word


def _series_from_profiles(
    pair: AdversarialPair,
    profiles: dict[int, SubstitutionProfile],
    series_type: str,
    n_max: int,
    seed: int,
    bands: RandomBands | None,
) -> SwapSeries:
    series_type = canonical_type(series_type)
    if series_type not in SERIES_TYPES:
        raise ValueError(f"unknown series type {series_type!r}")
    pool = eligible_positions(pair, profiles)
    if not pool:
        raise EmptySeries("no position carries all four substitution sets")
    rng = random.Random(seed)
    order = list(pool)
    rng.shuffle(order)
    steps = min(n_max, len(order))
    band_pool: list[str] | None = None
    if series_type in (RANDOM_HIGH, RANDOM_LOW):
        if bands is None:
            raise ValueError("random series types need frequency bands")
        band_pool = bands.pool(series_type)
    variants: list[Sentence] = []
    current = pair.original
    for n in range(1, steps + 1):
        p = order[n - 1]
        original_word = pair.original[p].lower
        if band_pool is not None:
            choices = [w for w in band_pool if w != original_word]
        else:
            choices = sorted(profile_set(profiles[p], series_type))
        word = rng.choice(choices)
        surface = _match_case(pair.original[p].surface, word)
        current = current.with_token(p, Token.make(surface))
        variants.append(current)
    return SwapSeries(pair, series_type, tuple(order), tuple(variants), seed)


def build_swap_series(
    pair: AdversarialPair,
    series_type: str,
    res: LexicalResources,
    n_max: int = 10,
    seed: int = 0,
    bands: RandomBands | None = None,
) -> SwapSeries:
    """x_swap^1..x_swap^n: one shuffled position substituted per step, all
    steps drawing from the same substitution type, deterministic per seed."""
    profiles = {
        i: build_substitution_profile(pair.original, i, res)
        for i in pair.perturbed_indices
    }
    return _series_from_profiles(pair, profiles, series_type, n_max, seed, bands)


@dataclass
class CurvePoint:
    n: int
    mean: float
    stdev: float
    samples: int

    def __post_init__(self) -> None:
        if self.n < 1 or self.samples < 1:
            raise ValueError("curve points need n >= 1 and samples >= 1")


@dataclass
class CurveReport:
    compare_mode: str
    window: int | None
    n_max: int
    curves: dict[str, list[CurvePoint]] = field(default_factory=dict)
    raw_scores: dict[str, dict[int, list[float]]] = field(default_factory=dict)
    skipped_pairs: dict[str, int] = field(default_factory=dict)
    partial: bool = False
    error: str | None = None


def _derive_seed(seed: int, pair_index: int, type_index: int) -> int:
    return (seed * 1000003 + pair_index * 9176 + type_index * 53) % (2**31)


def encoder_sensitivity_curve(
    pairs: Sequence[AdversarialPair],
    encoder: SentenceEncoder,
    res: LexicalResources,
    types: Sequence[str] = SERIES_TYPES,
    n_max: int = 10,
    w: int | None = 7,
    compare_mode: str = VS_ORIGINAL,
    seed: int = 0,
    bands: RandomBands | None = None,
) -> CurveReport:
    """Mean/stdev cosine between windowed embeddings of x_swap^n and its
    reference, per substitution type and swap count n.

    The window is centered on the n-th swapped position. Adapter failures
    abort the audit, flagging the partial result.
    """
    if compare_mode not in (VS_ORIGINAL, VS_PREVIOUS):
        raise ValueError(f"unknown compare mode {compare_mode!r}")
    types = [canonical_type(t) for t in types]
    report = CurveReport(compare_mode, w, n_max)
    scores: dict[str, dict[int, list[float]]] = {t: {} for t in types}
    skipped = {t: 0 for t in types}
    try:
        for pi, pair in enumerate(pairs):
            profiles = {
                i: build_substitution_profile(pair.original, i, res)
                for i in pair.perturbed_indices
            }
            for ti, series_type in enumerate(types):
                try:
                    series = _series_from_profiles(
                        pair, profiles, series_type, n_max,
                        _derive_seed(seed, pi, ti), bands,
                    )
                except EmptySeries:
                    skipped[series_type] += 1
                    continue
                texts: list[str] = []
                for n, variant in enumerate(series.variants, start=1):
                    p = series.order[n - 1]
                    if compare_mode == VS_ORIGINAL:
                        reference = pair.original
                    else:
                        reference = (
                            series.variants[n - 2] if n >= 2 else pair.original
                        )
                    if w is not None:
                        texts.append(window_extract(reference, p, w).text())
                        texts.append(window_extract(variant, p, w).text())
                    else:
                        texts.append(reference.text())
                        texts.append(variant.text())
                emb = encoder.encode(texts)
                for n in range(1, len(series.variants) + 1):
                    score = cosine(emb[2 * (n - 1)], emb[2 * n - 1])
                    scores[series_type].setdefault(n, []).append(score)
    except AdapterError as exc:
        report.partial = True
        report.error = str(exc)
    for series_type in types:
        points = []
        for n in sorted(scores[series_type]):
            values = scores[series_type][n]
            stdev = statistics.pstdev(values) if len(values) > 1 else 0.0
            points.append(CurvePoint(n, statistics.fmean(values), stdev, len(values)))
        report.curves[series_type] = points
    report.raw_scores = scores
    report.skipped_pairs = skipped
    return report


# -- grammar stress test ------------------------------------------------------


def convert_verb_inflections(
    sentence: Sentence, res: LexicalResources
) -> tuple[Sentence, int]:
    """Deliberately break every verb's inflection.

    Third-person singular present goes to the base form, past tense to the
    gerund, and every other verb form to third-person singular present.
    Verbs whose converted form would not differ are skipped and not
    counted; non-verb tokens pass through untouched.
    """
    morph = res.morphology
    tokens = list(sentence.tokens)
    converted = 0
    for idx, token in enumerate(tokens):
        if token.pos not in VERB_TAGS:
            continue
        lemma = token.lemma or token.lower
        if token.pos == "VBZ":
            new_word = lemma
        elif token.pos == "VBD":
            new_word = morph.inflect(lemma, "VBG")
        else:
            new_word = morph.inflect(lemma, "VBZ")
        if new_word.casefold() == token.lower:
            continue
        surface = _match_case(token.surface, new_word)
        tokens[idx] = Token.make(surface, pos=token.pos, lemma=lemma)
        converted += 1
    return Sentence(tuple(tokens)), converted


@dataclass
class GrammarStressReport:
    considered: int
    grammatical: int
    total_converted: int
    total_detected: int

    @property
    def avg_perturbed_verbs(self) -> float:
        return self.total_converted / self.grammatical if self.grammatical else 0.0

    @property
    def avg_detected_errors(self) -> float:
        return self.total_detected / self.grammatical if self.grammatical else 0.0

    @property
    def detection_ratio(self) -> float:
        return self.total_detected / self.total_converted if self.total_converted else 0.0


def grammar_stress(
    sentences: Iterable[Sentence],
    checker: GrammarChecker,
    res: LexicalResources,
) -> GrammarStressReport:
    """Break verb inflections in checker-clean sentences and re-check."""
    considered = 0
    grammatical = 0
    total_converted = 0
    total_detected = 0
    for sentence in sentences:
        considered += 1
        if checker.check(sentence.text()):
            continue
        grammatical += 1
        perturbed, count = convert_verb_inflections(sentence, res)
        total_converted += count
        if count:
            total_detected += len(checker.check(perturbed.text()))
    return GrammarStressReport(considered, grammatical, total_converted, total_detected)
