import pytest

from ssa_audit import corpus
from ssa_audit.embeddings import FrequencyTable, VectorStore
from ssa_audit.lexsem import LexicalResources
from ssa_audit.lexsem.resources import resource_path


@pytest.fixture(scope="session")
def res() -> LexicalResources:
    return LexicalResources.bundled()


@pytest.fixture(scope="session")
def annotator(res):
    return res.annotator()


@pytest.fixture(scope="session")
def demo_pairs(annotator):
    return corpus.load_pairs(resource_path("demo_pairs.jsonl"), annotator).pairs


@pytest.fixture(scope="session")
def demo_store() -> VectorStore:
    return VectorStore.from_file(resource_path("mini_vectors.txt"))


@pytest.fixture(scope="session")
def demo_freq() -> FrequencyTable:
    return FrequencyTable.from_file(resource_path("freq_table.tsv"))


def sentence(text: str, annotator) -> corpus.Sentence:
    return corpus.tokenize(text, annotator)
