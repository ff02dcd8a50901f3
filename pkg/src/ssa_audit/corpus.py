"""Sentence data model and aligned original/adversarial pair ingestion.

Pair files are JSON Lines, one object per line:

    {"original": "<space-separated tokens>",
     "adversarial": "<space-separated tokens>",
     "label": <int, optional>}

Pairs are position-wise word substitutions: both sides must have the same
length, and the perturbed index set is recomputed on load.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator, Sequence

from .errors import AlignmentError, EmptyInput, ParseError

# Annotator: maps a token-surface sequence to one (pos, lemma) per token.
Annotator = Callable[[Sequence[str]], list[tuple[str, str]]]

TERMINAL_PUNCT = ".,!?;:"


@dataclass(frozen=True)
class Token:
    surface: str
    lower: str
    pos: str = "OTHER"
    lemma: str = ""

    @staticmethod
    def make(surface: str, pos: str = "OTHER", lemma: str | None = None) -> "Token":
        lower = surface.casefold()
        return Token(surface=surface, lower=lower, pos=pos, lemma=lemma or lower)


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]

    def __post_init__(self) -> None:
        if len(self.tokens) < 1:
            raise ValueError("a sentence needs at least one token")

    @property
    def length(self) -> int:
        return len(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    def __getitem__(self, i: int) -> Token:
        return self.tokens[i]

    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    def text(self) -> str:
        return " ".join(t.surface for t in self.tokens)

    def with_token(self, i: int, token: Token) -> "Sentence":
        toks = list(self.tokens)
        toks[i] = token
        return Sentence(tuple(toks))


@dataclass(frozen=True)
class AdversarialPair:
    original: Sentence
    adversarial: Sentence
    perturbed_indices: tuple[int, ...]
    label: int | None = None

    def validate(self) -> None:
        if self.original.length != self.adversarial.length:
            raise AlignmentError("original and adversarial lengths differ")
        changed = set(align(self.original, self.adversarial))
        if changed != set(self.perturbed_indices):
            raise AlignmentError("perturbed_indices do not match the alignment")

    @staticmethod
    def from_sentences(
        original: Sentence, adversarial: Sentence, label: int | None = None
    ) -> "AdversarialPair":
        indices = align(original, adversarial)
        return AdversarialPair(original, adversarial, tuple(indices), label)


@dataclass
class SkipRecord:
    line_number: int
    reason: str


@dataclass
class LoadedPairs:
    """Pairs that aligned, plus a record per line that was skipped."""

    pairs: list[AdversarialPair] = field(default_factory=list)
    skipped: list[SkipRecord] = field(default_factory=list)

    def __iter__(self) -> Iterator[AdversarialPair]:
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)


def _default_annotator() -> Annotator:
    from .lexsem import default_annotator

    return default_annotator()


def _annotate(surfaces: Sequence[str], annotator: Annotator | None) -> Sentence:
    ann = annotator if annotator is not None else _default_annotator()
    tags = ann(surfaces)
    if len(tags) != len(surfaces):
        raise ValueError("annotator returned a tag list of the wrong length")
    return Sentence(
        tuple(Token.make(s, pos=p, lemma=m) for s, (p, m) in zip(surfaces, tags))
    )


def _split_terminal_punct(chunk: str) -> list[str]:
    """Detach a trailing run of terminal punctuation as its own token."""
    if all(c in TERMINAL_PUNCT for c in chunk):
        return [chunk]
    core = chunk.rstrip(TERMINAL_PUNCT)
    if core == chunk:
        return [chunk]
    return [core, chunk[len(core):]]


def tokenize(text: str, annotator: Annotator | None = None) -> Sentence:
    """Whitespace tokenization with terminal punctuation split off.

    Deterministic for a fixed input; POS and lemma come from the
    annotator (default: the bundled rule tagger).
    """
    if not text or not text.strip():
        raise EmptyInput("cannot tokenize empty text")
    surfaces: list[str] = []
    for chunk in text.split():
        surfaces.extend(_split_terminal_punct(chunk))
    return _annotate(surfaces, annotator)


def sentence_from_pretokenized(
    surfaces: Sequence[str], annotator: Annotator | None = None
) -> Sentence:
    """Build a sentence from already-tokenized words, no punctuation handling."""
    if not surfaces:
        raise EmptyInput("empty token sequence")
    return _annotate(list(surfaces), annotator)


def align(original: Sentence, adversarial: Sentence) -> list[int]:
    """Positions where the two sentences differ under case folding, ascending.

    A length mismatch means the pair is not a pure word-substitution pair.
    """
    if original.length != adversarial.length:
        raise AlignmentError(
            f"length mismatch: {original.length} vs {adversarial.length}"
        )
    return [
        i
        for i in range(original.length)
        if original[i].lower != adversarial[i].lower
    ]


def pair_to_dict(pair: AdversarialPair) -> dict:
    out: dict = {
        "original": pair.original.text(),
        "adversarial": pair.adversarial.text(),
    }
    if pair.label is not None:
        out["label"] = pair.label
    return out


def save_pairs(pairs: Sequence[AdversarialPair], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for pair in pairs:
            fh.write(json.dumps(pair_to_dict(pair), sort_keys=True) + "\n")


def load_pairs(path: str | Path, annotator: Annotator | None = None) -> LoadedPairs:
    """Load a JSONL pair file; misaligned lines are skipped and counted.

    Malformed JSON raises ParseError with the offending line number.
    """
    ann = annotator if annotator is not None else _default_annotator()
    result = LoadedPairs()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"line {lineno}: invalid JSON ({exc.msg})", lineno)
            if not isinstance(obj, dict):
                raise ParseError(f"line {lineno}: expected a JSON object", lineno)
            try:
                orig_text = obj["original"]
                adv_text = obj["adversarial"]
            except KeyError as exc:
                raise ParseError(f"line {lineno}: missing key {exc}", lineno)
            if not isinstance(orig_text, str) or not isinstance(adv_text, str):
                raise ParseError(f"line {lineno}: texts must be strings", lineno)
            label = obj.get("label")
            if label is not None and not isinstance(label, int):
                raise ParseError(f"line {lineno}: label must be an integer", lineno)
            orig_words = orig_text.split()
            adv_words = adv_text.split()
            if not orig_words or not adv_words:
                raise ParseError(f"line {lineno}: empty sentence", lineno)
            if len(orig_words) != len(adv_words):
                result.skipped.append(
                    SkipRecord(lineno, "length mismatch, not a pure substitution pair")
                )
                continue
            original = _annotate(orig_words, ann)
            adversarial = _annotate(adv_words, ann)
            result.pairs.append(AdversarialPair.from_sentences(original, adversarial, label))
    return result
