import pytest

from corpusgen import write_corpus


@pytest.fixture
def tiny_corpus(tmp_path):
    """The shared synthetic corpus, materialized on disk."""
    return write_corpus(tmp_path)
