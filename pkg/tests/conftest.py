import pytest

from logomt.data import sample_corpus_paths, sample_table_path
from logomt.decomposition import load_table


@pytest.fixture(scope="session")
def sample_table():
    return load_table(sample_table_path())


@pytest.fixture(scope="session")
def sample_corpus_lines():
    src, _ = sample_corpus_paths()
    lines = src.read_text(encoding="utf-8").splitlines()
    return [line.split() for line in lines]
