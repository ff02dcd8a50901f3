"""Candidate-set transformations: WordNet-style synonym union, embedding
kNN, and MLM mask-infilling / reconstruction with lemma post-processing.

The synonym transformation is deliberately sense-oblivious: it unions the
synonym sets of every sense, which is exactly the behavior whose validity
the audit module measures.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .adapters import MlmAdapter, MlmCandidate
from .corpus import Sentence
from .embeddings import VectorStore
from .errors import EmptyPrediction, OovWord
from .lexsem import LexicalResources, coarse_pos

WORDNET = "wordnet"
EMBEDDING_KNN = "embedding_knn"
MLM_INFILL = "mlm_infill"
MLM_RECONSTRUCT = "mlm_reconstruct"
SOURCES = (WORDNET, EMBEDDING_KNN, MLM_INFILL, MLM_RECONSTRUCT)

Lemmatizer = Callable[[str], str]


@dataclass(frozen=True)
class CandidateSet:
    position: int
    source: str
    candidates: tuple[tuple[str, float], ...]
    k: int
    oov: bool = False

    def words(self) -> list[str]:
        return [w for w, _ in self.candidates]

    def check_invariants(self, original: str) -> None:
        if len(self.candidates) > self.k:
            raise AssertionError("more candidates than requested")
        lowered = original.casefold()
        scores = [s for _, s in self.candidates]
        if any(w == lowered for w, _ in self.candidates):
            raise AssertionError("candidate equals the original word")
        if any(w != w.casefold() for w, _ in self.candidates):
            raise AssertionError("candidate not lower-cased")
        if any(a < b for a, b in zip(scores, scores[1:])):
            raise AssertionError("candidates not sorted by descending score")


@dataclass(frozen=True)
class MlmQuery:
    tokens: tuple[str, ...]
    target: int
    masked: bool
    top_k: int

    def __post_init__(self) -> None:
        if not (0 <= self.target < len(self.tokens)):
            raise ValueError("target out of range")
        if self.top_k < 1:
            raise ValueError("top_k must be at least 1")


def wordnet_transform(
    sentence: Sentence, i: int, res: LexicalResources, k: int | None = None
) -> CandidateSet:
    """Sense-oblivious synonym union over every sense of the word."""
    token = sentence[i]
    seen: set[str] = set()
    words: list[str] = []
    for query in (token.lemma, token.lower):
        for sense in res.inventory.senses(query, coarse_pos(token.pos)):
            for syn in sense.synonyms:
                if syn != token.lower and syn not in seen:
                    seen.add(syn)
                    words.append(syn)
        if words or res.inventory.has(query):
            break
    if k is not None:
        words = words[:k]
    cap = k if k is not None else max(len(words), 1)
    return CandidateSet(i, WORDNET, tuple((w, 1.0) for w in words), cap)


def embedding_knn_transform(
    sentence: Sentence, i: int, k: int, store: VectorStore
) -> CandidateSet:
    """kNN in the word-vector space; OOV words yield a flagged empty set."""
    if k < 1:
        raise ValueError("k must be at least 1")
    token = sentence[i]
    try:
        neighbors = store.knn(token.lower, k)
    except OovWord:
        return CandidateSet(i, EMBEDDING_KNN, (), k, oov=True)
    cands = tuple(
        (w.casefold(), float(s)) for w, s in neighbors if w.casefold() != token.lower
    )
    return CandidateSet(i, EMBEDDING_KNN, cands, k)


def filter_subwords(candidates: Sequence) -> list:
    """Drop pure punctuation and continuation pieces, keeping rank order.

    Accepts either plain strings or MlmCandidate items; a candidate is a
    continuation piece if the adapter flagged it or it carries a ``##``
    marker.
    """
    out = []
    for cand in candidates:
        if isinstance(cand, MlmCandidate):
            token, flagged = cand.token, cand.is_subword
        else:
            token, flagged = cand, False
        if flagged or token.startswith("##"):
            continue
        if not any(c.isalnum() for c in token):
            continue
        out.append(cand)
    return out


def lemma_dedup(candidates: Sequence, lemmatizer: Lemmatizer) -> list:
    """Replace each word by its lemma unless that lemma is already present.

    For each candidate in rank order: emit the lemma when it appears
    neither among the raw candidates nor among already-emitted words,
    otherwise emit the candidate unchanged. Idempotent for an idempotent
    lemmatizer.
    """
    def word_of(c) -> str:
        return c.token if isinstance(c, MlmCandidate) else c

    raw = {word_of(c) for c in candidates}
    emitted: set[str] = set()
    out = []
    for cand in candidates:
        word = word_of(cand)
        lemma = lemmatizer(word)
        if lemma not in raw and lemma not in emitted:
            chosen = lemma
        else:
            chosen = word
        emitted.add(chosen)
        if isinstance(cand, MlmCandidate):
            out.append(MlmCandidate(chosen, cand.score, cand.is_subword))
        else:
            out.append(chosen)
    return out


def mlm_transform(
    query: MlmQuery,
    adapter: MlmAdapter,
    lemmatizer: Lemmatizer | None = None,
) -> CandidateSet:
    """Adapter top-k at the target position, then subword filtering, lemma
    dedup, and removal of the original word; adapter rank is preserved."""
    raw = adapter.predict(query.tokens, query.target, query.masked, query.top_k)
    if not raw:
        raise EmptyPrediction(
            f"MLM returned no candidates at position {query.target}"
        )
    original = query.tokens[query.target].casefold()
    cands = filter_subwords(raw)
    if lemmatizer is not None:
        cands = lemma_dedup(cands, lemmatizer)
    kept: list[tuple[str, float]] = []
    seen: set[str] = set()
    for cand in cands:
        word = cand.token.casefold()
        if word == original or word in seen:
            continue
        seen.add(word)
        kept.append((word, cand.score))
    source = MLM_INFILL if query.masked else MLM_RECONSTRUCT
    return CandidateSet(query.target, source, tuple(kept), query.top_k)


@dataclass
class TransformConfig:
    source: str
    k: int | None = 30
    store: VectorStore | None = None
    adapter: MlmAdapter | None = None
    resources: LexicalResources | None = None

    def __post_init__(self) -> None:
        if self.source not in SOURCES:
            raise ValueError(f"unknown transformation source {self.source!r}")


@dataclass
class Transform:
    """A configured transformation: call with (sentence, i) to propose swaps."""

    config: TransformConfig
    oov_positions: list[int] = field(default_factory=list)

    def __call__(self, sentence: Sentence, i: int) -> CandidateSet:
        cfg = self.config
        if cfg.source == WORDNET:
            if cfg.resources is None:
                raise ValueError("wordnet transformation needs lexical resources")
            return wordnet_transform(sentence, i, cfg.resources, cfg.k)
        if cfg.source == EMBEDDING_KNN:
            if cfg.store is None:
                raise ValueError("kNN transformation needs a vector store")
            out = embedding_knn_transform(sentence, i, cfg.k or 30, cfg.store)
            if out.oov:
                self.oov_positions.append(i)
            return out
        if cfg.adapter is None:
            raise ValueError("MLM transformations need an adapter")
        lemmatizer = None
        if cfg.resources is not None:
            morph = cfg.resources.morphology
            pos = coarse_pos(sentence[i].pos)
            lemmatizer = lambda w, _pos=pos: morph.lemmatize(w, _pos)
        query = MlmQuery(
            tuple(t.surface for t in sentence.tokens),
            i,
            masked=cfg.source == MLM_INFILL,
            top_k=cfg.k or 30,
        )
        return mlm_transform(query, cfg.adapter, lemmatizer)
