"""Synonym-substitution attack tooling and validity audits.

The package builds and dissects word-substitution adversarial samples:
candidate transformations (synonym sets, embedding kNN, MLM infilling and
reconstruction), validity constraints (word/sentence similarity, POS,
grammar), a greedy attack loop with published presets, and the audit suite
that measures how valid the resulting substitutions actually are.
"""

__version__ = "0.1.0"

from . import adapters, attack, audit, constraints, corpus, embeddings
from . import errors, lexsem, reports, transforms

__all__ = [
    "adapters",
    "attack",
    "audit",
    "constraints",
    "corpus",
    "embeddings",
    "errors",
    "lexsem",
    "reports",
    "transforms",
    "__version__",
]
