"""Lexical-semantic layer: senses, disambiguation, morphology, tagging."""

from .inventory import Sense, SenseInventory
from .morphology import (
    ADJ,
    ADV,
    NOUN,
    OTHER,
    VERB,
    VERB_TAGS,
    Morphology,
    coarse_pos,
)
from .senses import (
    STOPWORDS,
    LexicalResources,
    SubstitutionProfile,
    build_substitution_profile,
    disambiguate,
    morphological_set,
)
from .tagging import RuleTagger, SentenceAnnotator, default_annotator, pos_tag

__all__ = [
    "ADJ",
    "ADV",
    "NOUN",
    "OTHER",
    "VERB",
    "VERB_TAGS",
    "Morphology",
    "RuleTagger",
    "Sense",
    "SenseInventory",
    "SentenceAnnotator",
    "STOPWORDS",
    "LexicalResources",
    "SubstitutionProfile",
    "build_substitution_profile",
    "coarse_pos",
    "default_annotator",
    "disambiguate",
    "morphological_set",
    "pos_tag",
]
