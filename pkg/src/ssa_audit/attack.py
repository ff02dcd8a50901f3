"""Greedy word-substitution attack loop with deletion-based importance.

The loop follows the canonical recipe: rank positions by how much deleting
each word drops the classifier's confidence in its current prediction,
then walk positions in that order, keeping the constraint-passing
candidate with the largest confidence drop, stopping at the first label
flip. Presets reproduce the published transformation/constraint stacks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .adapters import VictimClassifier
from .constraints import (
    GRAMMAR_NO_NEW_ERRORS,
    POS_ALLOW_VERB_NOUN,
    POS_STRICT,
    VS_ORIGINAL,
    VS_PREVIOUS,
    ConstraintConfig,
    ConstraintContext,
)
from .corpus import Sentence, Token
from .errors import UnknownPreset
from .transforms import (
    EMBEDDING_KNN,
    MLM_INFILL,
    MLM_RECONSTRUCT,
    WORDNET,
    Transform,
    TransformConfig,
)


@dataclass
class AttackConfig:
    transformation: TransformConfig
    constraints: ConstraintConfig
    max_candidates_per_word: Optional[int] = None
    preset_name: Optional[str] = None

    def __post_init__(self) -> None:
        if self.transformation.k is not None and self.transformation.k < 1:
            raise ValueError("k must be at least 1")


@dataclass
class StepRecord:
    position: int
    original: str
    replacement: str
    prob_before: float
    prob_after: float
    flipped: bool


@dataclass
class AttackResult:
    success: bool
    adversarial: Optional[Sentence]
    perturbed_indices: tuple[int, ...]
    queries: int
    per_step_log: list[StepRecord] = field(default_factory=list)
    vacuous: bool = False


def _delete_token(sentence: Sentence, i: int) -> str:
    return " ".join(t.surface for j, t in enumerate(sentence.tokens) if j != i)


def word_importance(
    sentence: Sentence, victim: VictimClassifier
) -> tuple[list[int], int, int, list[float]]:
    """Positions ranked by confidence drop under single-token deletion.

    Returns (ranked positions, reference label, victim queries used,
    reference probs). Ties keep positional order.
    """
    label, probs = victim.classify(sentence.text())
    queries = 1
    if sentence.length == 1:
        return [0], label, queries, probs
    drops: list[tuple[float, int]] = []
    for i in range(sentence.length):
        _, del_probs = victim.classify(_delete_token(sentence, i))
        queries += 1
        drops.append((probs[label] - del_probs[label], i))
    ranked = sorted(drops, key=lambda di: (-di[0], di[1]))
    return [i for _, i in ranked], label, queries, probs


def _match_case(template: str, word: str) -> str:
    if template.isupper() and len(template) > 1:
        return word.upper()
    if template[:1].isupper():
        return word[:1].upper() + word[1:]
    return word


def _substitute(
    sentence: Sentence, i: int, word: str, constraints: ConstraintContext
) -> Sentence:
    surface = _match_case(sentence[i].surface, word)
    res = constraints.resources
    if res is not None:
        surfaces = sentence.surfaces()
        surfaces[i] = surface
        tag, lemma = res.tagger.tag(surfaces)[i]
        token = Token.make(surface, pos=tag, lemma=lemma)
    else:
        token = Token.make(surface)
    return sentence.with_token(i, token)


def run_attack(
    sentence: Sentence,
    cfg: AttackConfig,
    victim: VictimClassifier,
    transform: Transform,
    constraints: ConstraintContext,
    expected_label: Optional[int] = None,
) -> AttackResult:
    """Greedy constrained substitution until the victim's label flips.

    Each position is visited once, in importance order; the passing
    candidate with the largest drop in the reference-class probability is
    committed when it helps. A correct prediction on the input is required
    for the attack to be meaningful; otherwise the result is vacuous.
    """
    order, ref_label, queries, ref_probs = word_importance(sentence, victim)
    if expected_label is not None and ref_label != expected_label:
        return AttackResult(False, None, (), queries, vacuous=True)

    current = sentence
    current_prob = ref_probs[ref_label]
    log: list[StepRecord] = []
    committed: list[int] = []

    for i in order:
        candidates = transform(current, i).words()
        if cfg.max_candidates_per_word is not None:
            candidates = candidates[: cfg.max_candidates_per_word]
        best_swap: Sentence | None = None
        best_word: str | None = None
        best_prob = current_prob
        flipped_now = False
        for word in candidates:
            swapped = _substitute(current, i, word, constraints)
            verdict = constraints.evaluate(sentence, current, swapped, i, word)
            if not verdict.passed:
                continue
            label, probs = victim.classify(swapped.text())
            queries += 1
            if label != ref_label:
                best_swap, best_word, best_prob = swapped, word, probs[ref_label]
                flipped_now = True
                break
            if probs[ref_label] < best_prob:
                best_swap, best_word, best_prob = swapped, word, probs[ref_label]
        if best_swap is not None:
            log.append(
                StepRecord(i, current[i].lower, best_word, current_prob, best_prob, flipped_now)
            )
            committed.append(i)
            current = best_swap
            current_prob = best_prob
            if flipped_now:
                return AttackResult(
                    True, current, tuple(sorted(committed)), queries, log
                )
    return AttackResult(False, None, tuple(sorted(committed)), queries, log)


PRESETS = ("pwws", "textfooler", "bert_attack", "bae", "textfooler_adj", "a2t")


def preset(name: str) -> AttackConfig:
    """Published transformation/constraint stacks, addressable by name."""
    if name == "pwws":
        return AttackConfig(
            TransformConfig(WORDNET, k=None),
            ConstraintConfig(),
            preset_name=name,
        )
    if name == "textfooler":
        return AttackConfig(
            TransformConfig(EMBEDDING_KNN, k=50),
            ConstraintConfig(
                word_sim_threshold=0.5,
                sent_sim_threshold=0.878,
                window=7,
                compare_mode=VS_ORIGINAL,
                pos_mode=POS_ALLOW_VERB_NOUN,
            ),
            preset_name=name,
        )
    if name == "bert_attack":
        return AttackConfig(
            TransformConfig(MLM_INFILL, k=48),
            ConstraintConfig(
                sent_sim_threshold=0.7,
                window=None,
                compare_mode=VS_ORIGINAL,
            ),
            preset_name=name,
        )
    if name == "bae":
        return AttackConfig(
            TransformConfig(MLM_RECONSTRUCT, k=30),
            ConstraintConfig(
                sent_sim_threshold=0.936,
                window=7,
                compare_mode=VS_PREVIOUS,
            ),
            preset_name=name,
        )
    if name == "textfooler_adj":
        return AttackConfig(
            TransformConfig(EMBEDDING_KNN, k=50),
            ConstraintConfig(
                word_sim_threshold=0.9,
                sent_sim_threshold=0.98,
                window=7,
                compare_mode=VS_ORIGINAL,
                pos_mode=POS_ALLOW_VERB_NOUN,
                grammar_mode=GRAMMAR_NO_NEW_ERRORS,
            ),
            preset_name=name,
        )
    if name == "a2t":
        return AttackConfig(
            TransformConfig(EMBEDDING_KNN, k=20),
            ConstraintConfig(
                word_sim_threshold=0.8,
                sent_sim_threshold=0.9,
                window=7,
                compare_mode=VS_ORIGINAL,
                pos_mode=POS_STRICT,
            ),
            preset_name=name,
        )
    raise UnknownPreset(f"unknown preset {name!r}; expected one of {PRESETS}")
