"""Deterministic rule-based POS tagging over the coarse tagset.

Tags are NOUN/VERB/ADJ/ADV/OTHER, with verbs refined to Penn-style
subtags VB/VBP/VBZ/VBD/VBG/VBN. Verb readings come from morphological
analysis against the known-lemma vocabulary, so tagging quality scales
with the loaded resources; unknown open-class words default to NOUN.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

from .morphology import ADJ, ADV, NOUN, OTHER, Morphology

PRONOUNS = {
    "i", "you", "he", "she", "it", "we", "they", "me", "him", "her", "us",
    "them", "myself", "yourself", "himself", "herself", "itself", "ourselves",
    "themselves", "who", "whom", "whose", "which", "what", "mine", "yours",
    "hers", "ours", "theirs", "this", "that", "these", "those", "someone",
    "anyone", "everyone", "something", "anything", "everything", "nothing",
}
DETERMINERS = {
    "the", "a", "an", "this", "that", "these", "those", "my", "your", "his",
    "her", "its", "our", "their", "no", "any", "some", "each", "every",
    "another", "both", "all", "most", "few", "several",
}
MODALS = {"can", "could", "may", "might", "must", "shall", "should", "will", "would"}
AUX_BE = {"be", "am", "is", "are", "was", "were", "been", "being"}
FUNCTION_WORDS = {
    "of", "in", "on", "at", "by", "for", "with", "from", "to", "into", "onto",
    "over", "under", "about", "against", "between", "through", "during",
    "before", "after", "above", "below", "up", "down", "out", "off", "than",
    "as", "and", "or", "but", "nor", "so", "yet", "if", "because", "while",
    "when", "where", "why", "how", "not", "n't", "there", "here", "then",
    "once", "again", "also", "just", "only", "too", "very", "per", "via",
    "amid", "among", "until", "since", "though", "although", "unless",
    "whether", "’s", "'s",
}
CLOSED_CLASS = PRONOUNS | DETERMINERS | MODALS | AUX_BE | FUNCTION_WORDS

NOUN_SUFFIXES = ("tion", "sion", "ment", "ness", "ity", "ism", "ship", "ance", "ence", "ist")
ADJ_SUFFIXES = ("ous", "ful", "ive", "able", "ible", "less", "ish")


def _is_number(word: str) -> bool:
    stripped = word.replace(",", "").replace(".", "").replace("-", "")
    return bool(stripped) and stripped.isdigit()


class RuleTagger:
    """Lexicon-driven tagger with a handful of context rules."""

    def __init__(self, morphology: Morphology | None = None):
        self.morphology = morphology or Morphology()

    def tag(self, surfaces: Sequence[str]) -> list[tuple[str, str]]:
        """Return one (tag, lemma) per surface form."""
        out: list[tuple[str, str]] = []
        prev_lower = ""
        prev_tag = OTHER
        for surface in surfaces:
            tag, lemma = self._tag_one(surface, prev_lower, prev_tag)
            out.append((tag, lemma))
            prev_lower = surface.casefold()
            prev_tag = tag
        return out

    def _tag_one(self, surface: str, prev_lower: str, prev_tag: str) -> tuple[str, str]:
        word = surface.casefold()
        if not any(c.isalpha() for c in word):
            return OTHER, word
        if _is_number(word):
            return OTHER, word
        if word in CLOSED_CLASS:
            return OTHER, word

        morph = self.morphology
        verb_readings = morph.verb_analyses(word)
        noun_lemma = self._noun_lemma(word)
        adj_lemma = self._adj_lemma(word)
        adv_ok = morph.known_lemma(word, ADV)

        if prev_lower == "to" and any(t == "VB" for _, t in verb_readings):
            return "VB", verb_readings[0][0]
        if (prev_lower in DETERMINERS or prev_tag == ADJ) and (noun_lemma or adj_lemma):
            if noun_lemma:
                return NOUN, noun_lemma
            return ADJ, adj_lemma or word

        if verb_readings:
            return self._refine_verb(verb_readings, prev_lower)
        if noun_lemma:
            return NOUN, noun_lemma
        if adj_lemma:
            return ADJ, adj_lemma
        if adv_ok or word.endswith("ly"):
            return ADV, word
        if word.endswith(ADJ_SUFFIXES):
            return ADJ, word
        if word.endswith(NOUN_SUFFIXES):
            return NOUN, word
        return NOUN, self._noun_lemma(word) or word

    def _refine_verb(
        self, readings: list[tuple[str, str]], prev_lower: str
    ) -> tuple[str, str]:
        tags = {tag: lemma for lemma, tag in reversed(readings)}
        if "VB" in tags:
            if prev_lower == "to" or prev_lower in MODALS:
                return "VB", tags["VB"]
            return "VBP", tags["VB"]
        for tag in ("VBZ", "VBG"):
            if tag in tags:
                return tag, tags[tag]
        if "VBD" in tags and "VBN" in tags:
            chosen = "VBN" if prev_lower in AUX_BE | {"has", "have", "had"} else "VBD"
            return chosen, tags[chosen]
        for tag in ("VBD", "VBN"):
            if tag in tags:
                return tag, tags[tag]
        lemma, tag = readings[0]
        return tag, lemma

    def _noun_lemma(self, word: str) -> str | None:
        morph = self.morphology
        if morph.known_lemma(word, NOUN):
            return word
        lemma = morph.lemmatize(word, NOUN)
        if lemma != word and morph.known_lemma(lemma, NOUN):
            return lemma
        return None

    def _adj_lemma(self, word: str) -> str | None:
        morph = self.morphology
        if morph.known_lemma(word, ADJ):
            return word
        lemma = morph.lemmatize(word, ADJ)
        if lemma != word and morph.known_lemma(lemma, ADJ):
            return lemma
        return None


class SentenceAnnotator:
    """corpus.Annotator implementation backed by a RuleTagger."""

    def __init__(self, tagger: RuleTagger):
        self.tagger = tagger

    def __call__(self, surfaces: Sequence[str]) -> list[tuple[str, str]]:
        return self.tagger.tag(surfaces)


@lru_cache(maxsize=1)
def _bundled_morphology() -> Morphology:
    from .resources import bundled_inflections

    return Morphology(bundled_inflections())


def default_annotator() -> SentenceAnnotator:
    """Annotator over the bundled irregular-form table only."""
    return SentenceAnnotator(RuleTagger(_bundled_morphology()))


def pos_tag(sentence, tagger: RuleTagger | None = None):
    """Re-tag a sentence, returning a new one with pos and lemma filled in."""
    from ..corpus import Sentence, Token

    t = tagger or RuleTagger(_bundled_morphology())
    tags = t.tag([tok.surface for tok in sentence.tokens])
    return Sentence(
        tuple(
            Token.make(tok.surface, pos=tag, lemma=lemma)
            for tok, (tag, lemma) in zip(sentence.tokens, tags)
        )
    )
