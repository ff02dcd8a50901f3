"""Sense inventory: a self-contained JSON snapshot of a lexical database.

File format, one key per lemma and part of speech:

    {"<lemma>|<pos>": [{"id": str, "gloss": str, "synonyms": [str],
                        "antonyms": [str], "derived": [str]}]}

"derived" (first-degree derivational relatives) is optional and defaults
to empty. Sense order within a key is the resource order and is stable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .morphology import ADJ, ADV, NOUN, VERB

POS_ORDER = (NOUN, VERB, ADJ, ADV)


@dataclass(frozen=True)
class Sense:
    sense_id: str
    gloss: str
    synonyms: tuple[str, ...]
    antonyms: tuple[str, ...]
    pos: str
    derived: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if any(not s for s in self.synonyms):
            raise ValueError(f"sense {self.sense_id}: empty synonym")


@dataclass
class SenseInventory:
    entries: dict[str, list[Sense]] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "SenseInventory":
        inv = cls()
        seen_ids: set[str] = set()
        for key, senses in data.items():
            lemma, _, pos = key.partition("|")
            parsed = []
            for s in senses:
                sense = Sense(
                    sense_id=s["id"],
                    gloss=s["gloss"],
                    synonyms=tuple(w.casefold() for w in s["synonyms"]),
                    antonyms=tuple(w.casefold() for w in s.get("antonyms", [])),
                    pos=pos,
                    derived=tuple(w.casefold() for w in s.get("derived", [])),
                )
                if sense.sense_id in seen_ids:
                    raise ValueError(f"duplicate sense id {sense.sense_id}")
                seen_ids.add(sense.sense_id)
                parsed.append(sense)
            inv.entries[f"{lemma.casefold()}|{pos}"] = parsed
        return inv

    @classmethod
    def from_file(cls, path: str | Path) -> "SenseInventory":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def senses(self, lemma: str, pos: str | None = None) -> list[Sense]:
        """Senses of a lemma; with a POS hint, that POS's senses come first."""
        lemma = lemma.casefold()
        order = POS_ORDER
        if pos in POS_ORDER:
            order = (pos,) + tuple(p for p in POS_ORDER if p != pos)
        out: list[Sense] = []
        for p in order:
            out.extend(self.entries.get(f"{lemma}|{p}", []))
        return out

    def has(self, lemma: str) -> bool:
        lemma = lemma.casefold()
        return any(f"{lemma}|{p}" in self.entries for p in POS_ORDER)

    def pos_classes(self, lemma: str) -> list[str]:
        lemma = lemma.casefold()
        return [p for p in POS_ORDER if f"{lemma}|{p}" in self.entries]

    def all_synonyms(self, lemma: str, pos: str | None = None) -> set[str]:
        """Union of the synonym sets over every sense, sense-oblivious."""
        return {w for s in self.senses(lemma, pos) for w in s.synonyms}

    def antonyms(self, lemma: str, pos: str | None = None) -> set[str]:
        return {w for s in self.senses(lemma, pos) for w in s.antonyms}

    def derived(self, lemma: str, pos: str | None = None) -> set[str]:
        return {w for s in self.senses(lemma, pos) for w in s.derived}

    def lemma_vocab(self) -> dict[str, set[str]]:
        """Per-POS lemma sets, for seeding the morphology vocabulary."""
        vocab: dict[str, set[str]] = {}
        for key in self.entries:
            lemma, _, pos = key.partition("|")
            vocab.setdefault(pos, set()).add(lemma)
        return vocab
