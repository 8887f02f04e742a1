from importlib import resources
from pathlib import Path

import pytest

from simpletags.corpus import ingest_corpus


@pytest.fixture(scope="session")
def demo_corpus_path() -> Path:
    return Path(str(resources.files("simpletags").joinpath("data/demo_corpus.jsonl")))


@pytest.fixture(scope="session")
def demo_docs(demo_corpus_path):
    return ingest_corpus(demo_corpus_path)
