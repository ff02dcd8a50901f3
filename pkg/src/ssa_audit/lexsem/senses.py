"""Word sense disambiguation and per-position substitution profiles.

The profile splits a word's lexical substitutes into four disjoint sets:
morphological relatives (ML), synonyms of the in-context sense (M),
synonyms of its other senses (MM), and antonyms (A). Overlaps are removed
in that order, so a lemma shared between the matched sense and any other
sense lands in M only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..corpus import Sentence
from ..errors import NoSense
from .inventory import Sense, SenseInventory
from .morphology import Morphology, OPEN_CLASS, coarse_pos
from .tagging import RuleTagger, SentenceAnnotator

STOPWORDS = frozenset(
    """a an the and or but if then of in on at by for with from to as is are was
    were be been being am do does did have has had it its this that these those
    he she they we you i his her their our your my me him them us not no nor so
    such too very can could may might must shall should will would there here
    what which who whom when where why how all any both each few more most other
    some only own same s t don now up down out over under again further""".split()
)

_WORD_RE = re.compile(r"[a-z]+")


@dataclass(frozen=True)
class SubstitutionProfile:
    position: int
    word: str
    ml: frozenset[str]
    m: frozenset[str]
    mm: frozenset[str]
    a: frozenset[str]

    def check_invariants(self) -> None:
        sets = {"ML": self.ml, "M": self.m, "MM": self.mm, "A": self.a}
        for name, s in sets.items():
            if self.word in s:
                raise AssertionError(f"{name} contains the original word")
            if any(w != w.casefold() for w in s):
                raise AssertionError(f"{name} contains a non-casefolded word")
        names = list(sets)
        for i, x in enumerate(names):
            for y in names[i + 1:]:
                if sets[x] & sets[y]:
                    raise AssertionError(f"{x} and {y} overlap: {sets[x] & sets[y]}")


class LexicalResources:
    """Sense inventory plus morphology, wired into one annotator stack."""

    def __init__(self, inventory: SenseInventory, morphology: Morphology):
        self.inventory = inventory
        self.morphology = morphology
        self.morphology.lemma_vocab = self._merged_vocab()
        self.tagger = RuleTagger(self.morphology)

    def _merged_vocab(self) -> dict[str, set[str]]:
        vocab = {pos: set(ws) for pos, ws in self.morphology.lemma_vocab.items()}
        for pos, ws in self.inventory.lemma_vocab().items():
            vocab.setdefault(pos, set()).update(ws)
        return vocab

    @classmethod
    def from_paths(cls, inventory_path, inflections_path=None) -> "LexicalResources":
        inventory = SenseInventory.from_file(inventory_path)
        morphology = (
            Morphology.from_file(inflections_path)
            if inflections_path
            else Morphology()
        )
        return cls(inventory, morphology)

    @classmethod
    def bundled(cls) -> "LexicalResources":
        from .resources import bundled_inflections, bundled_inventory

        return cls(
            SenseInventory.from_dict(bundled_inventory()),
            Morphology(bundled_inflections()),
        )

    def annotator(self) -> SentenceAnnotator:
        return SentenceAnnotator(self.tagger)


def _gloss_words(sense: Sense) -> set[str]:
    return set(_WORD_RE.findall(sense.gloss.casefold())) - STOPWORDS


def _context_words(sentence: Sentence, i: int) -> set[str]:
    words: set[str] = set()
    for j, tok in enumerate(sentence.tokens):
        if j == i:
            continue
        words.add(tok.lower)
        words.add(tok.lemma)
    return words - STOPWORDS


def _senses_for_token(sentence: Sentence, i: int, res: LexicalResources) -> list[Sense]:
    token = sentence[i]
    pos_hint = coarse_pos(token.pos)
    for query in (token.lemma, token.lower):
        senses = res.inventory.senses(query, pos_hint if pos_hint in OPEN_CLASS else None)
        if senses:
            return senses
    return []


def disambiguate(sentence: Sentence, i: int, res: LexicalResources) -> Sense:
    """Simplified Lesk: pick the sense whose gloss shares the most words
    with the sentence context; ties fall back to the first listed sense."""
    senses = _senses_for_token(sentence, i, res)
    if not senses:
        raise NoSense(f"no senses for {sentence[i].surface!r}")
    context = _context_words(sentence, i)
    best = senses[0]
    best_overlap = len(_gloss_words(best) & context)
    for sense in senses[1:]:
        overlap = len(_gloss_words(sense) & context)
        if overlap > best_overlap:
            best, best_overlap = sense, overlap
    return best


def morphological_set(sentence: Sentence, i: int, res: LexicalResources) -> set[str]:
    """Inflections over the word's possible POS classes plus depth-1
    derivational relatives; the word itself is excluded."""
    token = sentence[i]
    word = token.lower
    lemma = token.lemma or word
    pos_classes = res.inventory.pos_classes(lemma)
    if not pos_classes:
        pos_classes = [p for p in OPEN_CLASS if res.morphology.known_lemma(lemma, p)]
    forms: set[str] = set()
    if pos_classes:
        for pos in pos_classes:
            forms.update(res.morphology.inflections(lemma, pos).values())
    else:
        forms.update(res.morphology.inflected_forms(lemma))
    forms.add(lemma)
    forms.update(res.inventory.derived(lemma))
    forms.discard(word)
    return forms


def build_substitution_profile(
    sentence: Sentence, i: int, res: LexicalResources
) -> SubstitutionProfile:
    """Four disjoint substitution sets for position i, subtraction order
    ML, then M, then MM, with antonyms cleaned against all three."""
    token = sentence[i]
    word = token.lower
    ml = {w.casefold() for w in morphological_set(sentence, i, res)}
    ml.discard(word)
    try:
        matched_sense = disambiguate(sentence, i, res)
    except NoSense:
        return SubstitutionProfile(
            i, word, frozenset(ml), frozenset(), frozenset(), frozenset()
        )
    senses = _senses_for_token(sentence, i, res)
    m = set(matched_sense.synonyms) - ml - {word}
    mm: set[str] = set()
    for sense in senses:
        if sense.sense_id != matched_sense.sense_id:
            mm.update(sense.synonyms)
    mm -= m
    mm -= ml
    mm.discard(word)
    a: set[str] = set()
    for sense in senses:
        a.update(sense.antonyms)
    a.discard(word)
    a -= ml
    a -= m
    a -= mm
    return SubstitutionProfile(
        i, word, frozenset(ml), frozenset(m), frozenset(mm), frozenset(a)
    )
