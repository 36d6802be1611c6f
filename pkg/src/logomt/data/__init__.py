"""Bundled sample data: a test-scale decomposition table and a small
synthetic parallel corpus over it. Regenerated by scripts/make_sample_data.py."""

from importlib import resources
from pathlib import Path

__all__ = ["sample_table_path", "sample_corpus_paths"]


def _path(name: str) -> Path:
    with resources.as_file(resources.files(__package__) / name) as p:
        return Path(p)


def sample_table_path() -> Path:
    """Path of the bundled character decomposition table."""
    return _path("sample_table.tsv")


def sample_corpus_paths() -> tuple[Path, Path]:
    """(source, target) paths of the bundled parallel corpus."""
    return _path("sample_corpus.src"), _path("sample_corpus.tgt")
