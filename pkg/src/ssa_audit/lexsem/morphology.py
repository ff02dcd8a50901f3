"""Rule-based English morphology with an irregular-form table.

The inflection table file is JSON:

    {"<lemma>|<pos>": {"VBZ": str, "VBD": str, "VBG": str, "VBN": str,
                       "NNS": str, "JJR": str, "JJS": str, ...}}

Anything absent from the table falls back to regular rules (+s/+es, +ed,
+ing, +ies and friends). The lemmatizer prefers analyses that land on a
known lemma and is idempotent: lemmatize(lemmatize(w)) == lemmatize(w).
"""

from __future__ import annotations

import json
from pathlib import Path

NOUN, VERB, ADJ, ADV, OTHER = "NOUN", "VERB", "ADJ", "ADV", "OTHER"
VERB_TAGS = ("VB", "VBP", "VBZ", "VBD", "VBG", "VBN")
OPEN_CLASS = (VERB, NOUN, ADJ)

VOWELS = set("aeiou")
SIBILANT_ENDINGS = ("s", "x", "z", "ch", "sh", "o")


def coarse_pos(tag: str) -> str:
    return VERB if tag in VERB_TAGS else tag


def _ends_sibilant(word: str) -> bool:
    return word.endswith(SIBILANT_ENDINGS)


def _monosyllabic(word: str) -> bool:
    groups = 0
    prev_vowel = False
    for c in word:
        is_vowel = c in VOWELS or c == "y"
        if is_vowel and not prev_vowel:
            groups += 1
        prev_vowel = is_vowel
    return groups <= 1


def _doubles_final(word: str) -> bool:
    """CVC doubling heuristic for monosyllables: stop -> stopped."""
    if len(word) < 3 or not _monosyllabic(word):
        return False
    a, b, c = word[-3], word[-2], word[-1]
    return c not in VOWELS and c not in "wxy" and b in VOWELS and a not in VOWELS


def _plural_like(lemma: str) -> str:
    if lemma.endswith("y") and len(lemma) > 1 and lemma[-2] not in VOWELS:
        return lemma[:-1] + "ies"
    if _ends_sibilant(lemma):
        return lemma + "es"
    return lemma + "s"


def _past_like(lemma: str) -> str:
    if lemma.endswith("e"):
        return lemma + "d"
    if lemma.endswith("y") and len(lemma) > 1 and lemma[-2] not in VOWELS:
        return lemma[:-1] + "ied"
    if _doubles_final(lemma):
        return lemma + lemma[-1] + "ed"
    return lemma + "ed"


def _gerund(lemma: str) -> str:
    if lemma.endswith("ie"):
        return lemma[:-2] + "ying"
    if lemma.endswith("e") and not lemma.endswith(("ee", "oe", "ye")):
        return lemma[:-1] + "ing"
    if _doubles_final(lemma):
        return lemma + lemma[-1] + "ing"
    return lemma + "ing"


def _comparative(lemma: str, superlative: bool) -> str:
    suffix = "est" if superlative else "er"
    if lemma.endswith("e"):
        return lemma + suffix[1:]
    if lemma.endswith("y") and len(lemma) > 1 and lemma[-2] not in VOWELS:
        return lemma[:-1] + "i" + suffix
    if _doubles_final(lemma):
        return lemma + lemma[-1] + suffix
    return lemma + suffix


def regular_inflections(lemma: str, pos: str) -> dict[str, str]:
    if pos == VERB:
        return {
            "VBZ": _plural_like(lemma),
            "VBD": _past_like(lemma),
            "VBG": _gerund(lemma),
            "VBN": _past_like(lemma),
        }
    if pos == NOUN:
        return {"NNS": _plural_like(lemma)}
    if pos in (ADJ, ADV):
        return {"JJR": _comparative(lemma, False), "JJS": _comparative(lemma, True)}
    return {}


class Morphology:
    """Inflection, form analysis, and lemmatization over a lemma vocabulary."""

    def __init__(
        self,
        table: dict[str, dict[str, str]] | None = None,
        lemma_vocab: dict[str, set[str]] | None = None,
    ):
        self.table = {k: dict(v) for k, v in (table or {}).items()}
        self.lemma_vocab = {pos: set(ws) for pos, ws in (lemma_vocab or {}).items()}
        for key in self.table:
            lemma, _, pos = key.partition("|")
            self.lemma_vocab.setdefault(pos, set()).add(lemma)
        # form -> (lemma, tag); first writer wins, keys visited in sorted order
        self._reverse: dict[str, tuple[str, str]] = {}
        for key in sorted(self.table):
            lemma, _, pos = key.partition("|")
            for tag in sorted(self.table[key]):
                form = self.table[key][tag]
                if form != lemma:
                    self._reverse.setdefault(form, (lemma, tag))

    @classmethod
    def from_file(
        cls, path: str | Path, lemma_vocab: dict[str, set[str]] | None = None
    ) -> "Morphology":
        with open(path, "r", encoding="utf-8") as fh:
            return cls(json.load(fh), lemma_vocab)

    def add_lemmas(self, pos: str, lemmas: set[str]) -> None:
        self.lemma_vocab.setdefault(pos, set()).update(lemmas)

    def known_lemma(self, word: str, pos: str | None = None) -> bool:
        if pos is not None:
            return word in self.lemma_vocab.get(pos, ())
        return any(word in ws for ws in self.lemma_vocab.values())

    def inflections(self, lemma: str, pos: str) -> dict[str, str]:
        forms = regular_inflections(lemma, pos)
        forms.update(self.table.get(f"{lemma}|{pos}", {}))
        return forms

    def inflect(self, lemma: str, tag: str) -> str:
        pos = VERB if tag in VERB_TAGS else (NOUN if tag == "NNS" else ADJ)
        if tag in ("VB", "VBP"):
            return lemma
        return self.inflections(lemma, pos).get(tag, lemma)

    def inflected_forms(self, lemma: str, pos: str | None = None) -> set[str]:
        """All inflected forms under the given POS, or every open-class POS."""
        hypotheses = [pos] if pos in OPEN_CLASS else list(OPEN_CLASS)
        forms: set[str] = set()
        for hyp in hypotheses:
            forms.update(self.inflections(lemma, hyp).values())
        forms.discard(lemma)
        return forms

    # -- lemmatization ----------------------------------------------------

    def _strip_candidates(self, word: str, pos: str) -> list[str]:
        """Stem candidates for one suffix family, best guess last-resort first."""
        cands: list[str] = []
        if pos in (VERB, NOUN):
            if word.endswith("ies") and len(word) > 4:
                cands.append(word[:-3] + "y")
            if word.endswith("es") and len(word) > 3:
                cands.append(word[:-2])
            if word.endswith("s") and not word.endswith("ss") and len(word) > 2:
                cands.append(word[:-1])
        if pos == VERB:
            if word.endswith("ied") and len(word) > 4:
                cands.append(word[:-3] + "y")
            if word.endswith("ed") and len(word) > 3:
                stem = word[:-2]
                cands.extend([stem, stem + "e", self._undouble(stem)])
            if word.endswith("ing") and len(word) > 4:
                stem = word[:-3]
                cands.extend([stem, stem + "e", self._undouble(stem)])
        if pos == ADJ:
            for suf, extra in (("ier", "y"), ("iest", "y")):
                if word.endswith(suf) and len(word) > len(suf) + 1:
                    cands.append(word[: -len(suf)] + extra)
            for suf in ("er", "est"):
                if word.endswith(suf) and len(word) > len(suf) + 1:
                    stem = word[: -len(suf)]
                    cands.extend([stem, stem + "e"])
        seen: set[str] = set()
        out = []
        for c in cands:
            if c and c != word and c not in seen:
                seen.add(c)
                out.append(c)
        return out

    @staticmethod
    def _undouble(stem: str) -> str:
        if (
            len(stem) >= 3
            and stem[-1] == stem[-2]
            and stem[-1] not in VOWELS
            and not stem.endswith(("ll", "ss", "ff", "zz"))
        ):
            return stem[:-1]
        return stem

    def _fallback_stem(self, word: str, pos: str) -> str | None:
        if pos in (VERB, NOUN):
            if word.endswith("ies") and len(word) > 4:
                return word[:-3] + "y"
            if word.endswith("es") and len(word) > 3 and _ends_sibilant(word[:-2]):
                return word[:-2]
            if word.endswith("s") and not word.endswith(("ss", "us", "is")) and len(word) > 2:
                return word[:-1]
        if pos == VERB:
            if word.endswith("ied") and len(word) > 4:
                return word[:-3] + "y"
            if word.endswith("ed") and len(word) > 3:
                return self._undouble(word[:-2])
            if word.endswith("ing") and len(word) > 4:
                return self._undouble(word[:-3])
        return None

    def lemmatize(self, word: str, pos: str | None = None) -> str:
        """Map an inflected form to its lemma; unknown words pass through."""
        word = word.casefold()
        if self.known_lemma(word, pos if pos in OPEN_CLASS else None):
            return word
        if word in self._reverse:
            return self._reverse[word][0]
        hypotheses = [pos] if pos in OPEN_CLASS else [VERB, NOUN, ADJ]
        for hyp in hypotheses:
            for cand in self._strip_candidates(word, hyp):
                if self.known_lemma(cand, hyp) or self.known_lemma(cand):
                    return cand
        for hyp in hypotheses:
            stem = self._fallback_stem(word, hyp)
            if stem:
                return stem
        return word

    def verb_analyses(self, word: str) -> list[tuple[str, str]]:
        """(lemma, tag) readings of the form as a known verb, base form first."""
        word = word.casefold()
        out: list[tuple[str, str]] = []
        verbs = self.lemma_vocab.get(VERB, set())
        if word in verbs:
            out.append((word, "VB"))
        candidates = set(self._strip_candidates(word, VERB))
        if word in verbs:
            candidates.add(word)
        if word in self._reverse:
            candidates.add(self._reverse[word][0])
        for lemma in sorted(candidates):
            if lemma not in verbs:
                continue
            for tag, form in sorted(self.inflections(lemma, VERB).items()):
                if form == word:
                    out.append((lemma, tag))
        seen: set[tuple[str, str]] = set()
        ordered = []
        for item in out:
            if item not in seen:
                seen.add(item)
                ordered.append(item)
        return ordered
