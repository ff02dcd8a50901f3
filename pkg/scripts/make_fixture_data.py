"""Regenerate the bundled demo vectors and frequency table.

The vectors are synthetic 8-d embeddings with a counter-fitted flavor:
synonym clusters share a direction, morphological variants sit very close
to their base word, and antonyms point the opposite way. Output is
deterministic for the fixed seed.
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

DIM = 8
SEED = 20240817

# cluster name -> (synonym-ish members, morphological variants, antonyms)
CLUSTERS = {
    "recommend": (
        ["recommend", "commend", "urge", "advocate"],
        ["recommends", "recommended", "recommending", "recommendation"],
        [],
    ),
    "win": (
        ["win", "triumph", "prevail", "gain", "acquire"],
        ["wins", "won", "winning", "winner"],
        ["lose", "loses", "lost"],
    ),
    "good": (
        ["good", "fine", "nice", "virtuous", "righteous"],
        ["better", "best", "goodness"],
        ["bad", "evil", "poor", "worse", "worst"],
    ),
    "set": (
        ["set", "fix", "establish", "determine", "define",
         "put", "place", "position", "collection", "group"],
        ["sets", "setting"],
        [],
    ),
    "big": (["big", "large", "great", "major"], ["bigger", "biggest"], ["small", "little"]),
    "strong": (["strong", "firm", "robust"], ["stronger", "strongest", "strength"], ["weak"]),
    "happy": (
        ["happy", "glad", "cheerful", "felicitous", "apt"],
        ["happier", "happiest", "happiness"],
        ["sad", "unhappy"],
    ),
    "fast": (["fast", "quick", "speedy"], ["faster", "fastest"], ["slow", "sluggish"]),
    "rise": (
        ["rise", "climb", "ascend", "grow", "increase"],
        ["rises", "rose", "risen", "rising"],
        ["fall", "descend", "drop", "fell", "fallen"],
    ),
    "miss": (["miss"], ["misses", "missed", "missing"], ["hit", "strike", "hits"]),
    "company": (["company", "corporation"], ["companies"], []),
    "team": (["team", "squad", "crew"], ["teams"], []),
    "launch": (["launch", "launching"], ["launches", "launched"], []),
    "date": (["date", "day"], ["dates", "days"], []),
    "expectation": (["expectation", "outlook", "prospect"], ["expectations"], []),
}

FILLER = [
    "banana", "table", "cosmos", "movie", "gold", "medal", "river", "stone",
    "cloud", "music", "apple", "orange", "window", "bridge", "garden",
    "pencil", "ocean", "mountain", "coffee", "paper", "market", "street",
    "doctor", "planet", "engine", "forest", "silver", "bottle", "castle",
    "violin", "pepper", "shadow", "ticket", "jungle", "helmet",
]

# filler words that lead the synthetic counts so band tests have a head
FREQ_HEAD = ["the", "a", "to", "of", "and", "in", "on", "for", "is", "it"]


def build_vectors(rng: np.random.Generator) -> dict[str, np.ndarray]:
    vecs: dict[str, np.ndarray] = {}
    for _, (syns, morphs, ants) in CLUSTERS.items():
        base = rng.normal(size=DIM)
        base /= np.linalg.norm(base)
        for i, w in enumerate(syns):
            noise = 0.05 if i == 0 else 0.30
            vecs.setdefault(w, base + rng.normal(scale=noise, size=DIM))
        for w in morphs:
            vecs.setdefault(w, base + rng.normal(scale=0.06, size=DIM))
        for w in ants:
            vecs.setdefault(w, -0.8 * base + rng.normal(scale=0.25, size=DIM))
    for w in FILLER + FREQ_HEAD:
        vecs.setdefault(w, rng.normal(size=DIM))
    return vecs


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out-dir",
        type=Path,
        default=Path(__file__).resolve().parents[1] / "src" / "ssa_audit" / "resources",
    )
    args = parser.parse_args()
    rng = np.random.default_rng(SEED)
    vecs = build_vectors(rng)

    vec_path = args.out_dir / "mini_vectors.txt"
    with open(vec_path, "w", encoding="utf-8") as fh:
        for word, vec in vecs.items():
            values = " ".join(f"{x:.6f}" for x in vec)
            fh.write(f"{word} {values}\n")

    words = FREQ_HEAD + [w for w in vecs if w not in FREQ_HEAD]
    freq_path = args.out_dir / "freq_table.tsv"
    with open(freq_path, "w", encoding="utf-8") as fh:
        for i, word in enumerate(words):
            fh.write(f"{word}\t{100000 // (i + 1)}\n")

    print(f"wrote {vec_path} ({len(vecs)} words) and {freq_path} ({len(words)} rows)")


if __name__ == "__main__":
    main()
