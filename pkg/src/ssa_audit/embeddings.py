"""Word-vector store: cosine similarity, kNN lookup, frequency-band sampling.

Vector files use the plain-text GloVe convention, one entry per line:
``word v1 v2 ... vd``. Frequency tables are TSV ``word<TAB>count`` with
ranks assigned by descending count (stable on ties).
"""

from __future__ import annotations

import random
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import BandOutOfRange, DegenerateVector, OovWord

# 1-based rank intervals [lo, hi); the top-49 words are excluded from the
# high band because they are dominated by stop words.
HIGH_FREQ_BAND = (50, 550)
LOW_FREQ_BAND = (10000, 10500)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise DegenerateVector("cosine of a zero vector is undefined")
    return float(np.dot(u, v) / (nu * nv))


class VectorStore:
    """Immutable word-embedding matrix with unit-normalized rows cached."""

    def __init__(self, words: Sequence[str], matrix: np.ndarray):
        if len(words) != len(set(words)):
            raise ValueError("vocabulary entries must be unique")
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != len(words):
            raise ValueError("matrix shape does not match vocabulary")
        norms = np.linalg.norm(matrix, axis=1)
        if np.any(norms == 0.0):
            raise DegenerateVector("all-zero vectors are not admitted")
        self.words: tuple[str, ...] = tuple(words)
        self.matrix = matrix
        self._index = {w: i for i, w in enumerate(self.words)}
        self._unit = matrix / norms[:, None]

    def __len__(self) -> int:
        return len(self.words)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[1])

    def __contains__(self, word: str) -> bool:
        return word in self._index

    def vector(self, word: str) -> np.ndarray:
        try:
            return self.matrix[self._index[word]]
        except KeyError:
            raise OovWord(f"{word!r} is not in the vocabulary")

    def similarity(self, a: str, b: str) -> float:
        return cosine(self.vector(a), self.vector(b))

    def knn(self, word: str, k: int) -> list[tuple[str, float]]:
        """The k most cosine-similar words, excluding the query itself.

        Ties are broken by vocabulary order.
        """
        if k < 0:
            raise ValueError("k must be non-negative")
        idx = self._index.get(word)
        if idx is None:
            raise OovWord(f"{word!r} is not in the vocabulary")
        if k == 0:
            return []
        sims = self._unit @ self._unit[idx]
        order = np.argsort(-sims, kind="stable")
        out: list[tuple[str, float]] = []
        for j in order:
            if j == idx:
                continue
            out.append((self.words[j], float(sims[j])))
            if len(out) == k:
                break
        return out

    @classmethod
    def from_file(cls, path: str | Path) -> "VectorStore":
        """Load GloVe-format text vectors; duplicate words keep the first entry."""
        words: list[str] = []
        rows: list[list[float]] = []
        seen: set[str] = set()
        dim: int | None = None
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                parts = line.rstrip("\n").split(" ")
                if len(parts) < 2:
                    continue
                word, values = parts[0], parts[1:]
                if dim is None:
                    dim = len(values)
                elif len(values) != dim:
                    raise ValueError(f"inconsistent dimension at {word!r}")
                if word in seen:
                    continue
                seen.add(word)
                words.append(word)
                rows.append([float(v) for v in values])
        if not words:
            raise ValueError(f"no vectors found in {path}")
        return cls(words, np.array(rows, dtype=np.float64))


def knn(store: VectorStore, word: str, k: int) -> list[tuple[str, float]]:
    return store.knn(word, k)


class FrequencyTable:
    """Token occurrence counts with 1-based descending-count ranks."""

    def __init__(self, counts: Iterable[tuple[str, int]]):
        items = list(counts)
        if len({w for w, _ in items}) != len(items):
            raise ValueError("duplicate words in frequency table")
        items.sort(key=lambda wc: -wc[1])  # stable: input order breaks ties
        self.ranked: tuple[str, ...] = tuple(w for w, _ in items)
        self.counts: dict[str, int] = dict(items)
        self._rank = {w: i + 1 for i, w in enumerate(self.ranked)}

    def __len__(self) -> int:
        return len(self.ranked)

    def rank(self, word: str) -> int:
        return self._rank[word]

    def words_in_rank_interval(self, lo: int, hi: int) -> list[str]:
        """Words with rank in [lo, hi), most frequent first."""
        if lo < 1 or hi <= lo:
            raise ValueError(f"bad rank interval [{lo}, {hi})")
        if hi - 1 > len(self.ranked):
            raise BandOutOfRange(
                f"interval [{lo}, {hi}) exceeds vocabulary of {len(self.ranked)}"
            )
        return list(self.ranked[lo - 1: hi - 1])

    @classmethod
    def from_file(cls, path: str | Path) -> "FrequencyTable":
        items: list[tuple[str, int]] = []
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                word, _, count = line.partition("\t")
                items.append((word, int(count)))
        return cls(items)

    @classmethod
    def from_tokens(cls, tokens: Iterable[str]) -> "FrequencyTable":
        counts: dict[str, int] = {}
        for tok in tokens:
            counts[tok] = counts.get(tok, 0) + 1
        return cls(list(counts.items()))

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for word in self.ranked:
                fh.write(f"{word}\t{self.counts[word]}\n")


def sample_rank_interval(
    table: FrequencyTable, lo: int, hi: int, n: int, seed: int
) -> list[str]:
    """Uniform sample without replacement from a rank interval, seeded."""
    pool = table.words_in_rank_interval(lo, hi)
    if n > len(pool):
        raise BandOutOfRange(f"cannot sample {n} from {len(pool)} words")
    return random.Random(seed).sample(pool, n)


def sample_frequency_band(
    table: FrequencyTable,
    band: str,
    n: int,
    seed: int,
    intervals: dict[str, tuple[int, int]] | None = None,
) -> list[str]:
    """Sample from the canonical high or low frequency band.

    ``intervals`` overrides the canonical rank bands, which small fixture
    tables cannot cover.
    """
    bands = intervals or {"high": HIGH_FREQ_BAND, "low": LOW_FREQ_BAND}
    if band not in bands:
        raise ValueError(f"unknown band {band!r}; expected one of {sorted(bands)}")
    lo, hi = bands[band]
    return sample_rank_interval(table, lo, hi, n, seed)
