"""Validity filters for swapped sentences.

Constraints evaluate in a fixed, cheapest-first order: word-embedding
similarity, POS consistency, windowed sentence-embedding similarity,
grammar check. A verdict names the first constraint that failed; scores
are reported for every constraint that ran.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .adapters import GrammarChecker, SentenceEncoder
from .corpus import Sentence
from .embeddings import VectorStore, cosine
from .errors import OovWord
from .lexsem import LexicalResources, NOUN, VERB, coarse_pos

VS_ORIGINAL = "vs_original"
VS_PREVIOUS = "vs_previous"
POS_STRICT = "strict"
POS_ALLOW_VERB_NOUN = "allow_verb_noun"
POS_OFF = "off"
GRAMMAR_NO_NEW_ERRORS = "no_new_errors"
GRAMMAR_OFF = "off"

CONSTRAINT_ORDER = ("word_embedding", "pos", "sentence_similarity", "grammar")


@dataclass(frozen=True)
class ConstraintConfig:
    word_sim_threshold: Optional[float] = None
    sent_sim_threshold: Optional[float] = None
    window: Optional[int] = None
    compare_mode: str = VS_ORIGINAL
    pos_mode: str = POS_OFF
    grammar_mode: str = GRAMMAR_OFF

    def __post_init__(self) -> None:
        for name, value in (
            ("word_sim_threshold", self.word_sim_threshold),
            ("sent_sim_threshold", self.sent_sim_threshold),
        ):
            if value is not None and not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.window is not None and self.window < 0:
            raise ValueError("window half-width must be non-negative")
        if self.compare_mode not in (VS_ORIGINAL, VS_PREVIOUS):
            raise ValueError(f"unknown compare_mode {self.compare_mode!r}")
        if self.pos_mode not in (POS_STRICT, POS_ALLOW_VERB_NOUN, POS_OFF):
            raise ValueError(f"unknown pos_mode {self.pos_mode!r}")
        if self.grammar_mode not in (GRAMMAR_NO_NEW_ERRORS, GRAMMAR_OFF):
            raise ValueError(f"unknown grammar_mode {self.grammar_mode!r}")


@dataclass(frozen=True)
class ConstraintVerdict:
    passed: bool
    scores: dict
    failed_constraint: Optional[str] = None

    def __post_init__(self) -> None:
        if self.passed != (self.failed_constraint is None):
            raise ValueError("passed must match failed_constraint being unset")


def _pass(scores: dict) -> ConstraintVerdict:
    return ConstraintVerdict(True, scores, None)


def _fail(scores: dict, name: str) -> ConstraintVerdict:
    return ConstraintVerdict(False, scores, name)


def word_embedding_constraint(
    original: str, replacement: str, store: VectorStore, threshold: float
) -> ConstraintVerdict:
    """Pass iff the two word vectors' cosine reaches the threshold.

    A replacement missing from the store fails closed with a null score.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    try:
        score = store.similarity(original.casefold(), replacement.casefold())
    except OovWord:
        return _fail({"word_embedding": None}, "word_embedding")
    scores = {"word_embedding": score}
    if score >= threshold:
        return _pass(scores)
    return _fail(scores, "word_embedding")


def window_extract(sentence: Sentence, i: int, w: int) -> Sentence:
    """Tokens at positions [max(0, i-w), min(T, i+w+1)), clamped at the
    sentence boundaries."""
    if not 0 <= i < sentence.length:
        raise IndexError(f"position {i} outside sentence of length {sentence.length}")
    if w < 0:
        raise ValueError("window half-width must be non-negative")
    lo = max(0, i - w)
    hi = min(sentence.length, i + w + 1)
    return Sentence(sentence.tokens[lo:hi])


def sentence_similarity_constraint(
    reference: Sentence,
    swapped: Sentence,
    i: int,
    cfg: ConstraintConfig,
    encoder: SentenceEncoder,
) -> ConstraintVerdict:
    """Windowed sentence-embedding cosine against the configured reference.

    The caller picks the reference per compare_mode: the original sentence,
    or the sentence from the previous substitution step. Both sides use the
    same index window around position i.
    """
    if cfg.window is not None:
        ref_text = window_extract(reference, i, cfg.window).text()
        swap_text = window_extract(swapped, i, cfg.window).text()
    else:
        ref_text = reference.text()
        swap_text = swapped.text()
    emb = encoder.encode([ref_text, swap_text])
    score = cosine(emb[0], emb[1])
    scores = {"sentence_similarity": score}
    threshold = cfg.sent_sim_threshold
    if threshold is None or score >= threshold:
        return _pass(scores)
    return _fail(scores, "sentence_similarity")


def pos_consistency_constraint(
    sentence: Sentence,
    i: int,
    replacement: str,
    mode: str,
    res: LexicalResources | None = None,
) -> ConstraintVerdict:
    """Coarse-POS agreement between the original token and the replacement
    tagged in the same context."""
    if mode == POS_OFF:
        return _pass({"pos": True})
    if res is None:
        raise ValueError("POS constraint needs lexical resources for tagging")
    original_pos = coarse_pos(sentence[i].pos)
    surfaces = sentence.surfaces()
    surfaces[i] = replacement
    replacement_pos = coarse_pos(res.tagger.tag(surfaces)[i][0])
    ok = replacement_pos == original_pos
    if not ok and mode == POS_ALLOW_VERB_NOUN:
        ok = {original_pos, replacement_pos} == {VERB, NOUN}
    scores = {"pos": ok}
    return _pass(scores) if ok else _fail(scores, "pos")


def grammar_constraint(
    original: Sentence, swapped: Sentence, checker: GrammarChecker
) -> ConstraintVerdict:
    """Pass iff the swap introduces no new grammar errors."""
    before = len(checker.check(original.text()))
    after = len(checker.check(swapped.text()))
    scores = {"grammar_delta": after - before}
    if after <= before:
        return _pass(scores)
    return _fail(scores, "grammar")


@dataclass
class ConstraintContext:
    """A constraint configuration bound to its resources and adapters."""

    config: ConstraintConfig
    store: VectorStore | None = None
    encoder: SentenceEncoder | None = None
    checker: GrammarChecker | None = None
    resources: LexicalResources | None = None

    def __post_init__(self) -> None:
        cfg = self.config
        if cfg.word_sim_threshold is not None and self.store is None:
            raise ValueError("word-embedding constraint needs a vector store")
        if cfg.sent_sim_threshold is not None and self.encoder is None:
            raise ValueError("sentence-similarity constraint needs an encoder")
        if cfg.grammar_mode == GRAMMAR_NO_NEW_ERRORS and self.checker is None:
            raise ValueError("grammar constraint needs a checker")

    def evaluate(
        self,
        original: Sentence,
        previous: Sentence,
        swapped: Sentence,
        i: int,
        replacement: str,
    ) -> ConstraintVerdict:
        """All configured constraints in fixed order; first failure wins."""
        cfg = self.config
        scores: dict = {}
        if cfg.word_sim_threshold is not None:
            verdict = word_embedding_constraint(
                original[i].lower, replacement, self.store, cfg.word_sim_threshold
            )
            scores.update(verdict.scores)
            if not verdict.passed:
                return _fail(scores, verdict.failed_constraint)
        if cfg.pos_mode != POS_OFF:
            verdict = pos_consistency_constraint(
                original, i, replacement, cfg.pos_mode, self.resources
            )
            scores.update(verdict.scores)
            if not verdict.passed:
                return _fail(scores, verdict.failed_constraint)
        if cfg.sent_sim_threshold is not None:
            reference = original if cfg.compare_mode == VS_ORIGINAL else previous
            verdict = sentence_similarity_constraint(
                reference, swapped, i, cfg, self.encoder
            )
            scores.update(verdict.scores)
            if not verdict.passed:
                return _fail(scores, verdict.failed_constraint)
        if cfg.grammar_mode == GRAMMAR_NO_NEW_ERRORS:
            verdict = grammar_constraint(original, swapped, self.checker)
            scores.update(verdict.scores)
            if not verdict.passed:
                return _fail(scores, verdict.failed_constraint)
        return _pass(scores)
