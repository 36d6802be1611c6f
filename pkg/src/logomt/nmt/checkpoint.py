"""Model serialization as a single .npz archive.

The archive holds every parameter array under its own name plus one
JSON metadata entry: dimensions, vocabulary sizes and content hashes,
sharing and attention flags, and the training step count. Loading
rebuilds the model and refuses archives whose arrays do not match the
shapes the metadata implies.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .model import Dims, Seq2SeqModel, init_model

META_KEY = "__meta__"


class CheckpointError(ValueError):
    """Malformed or inconsistent checkpoint archive."""


def save_checkpoint(
    path: str | Path,
    model: Seq2SeqModel,
    step: int = 0,
    src_vocab_hash: str = "",
    tgt_vocab_hash: str = "",
) -> None:
    meta = {
        "d_emb": model.dims.d_emb,
        "d_hidden": model.dims.d_hidden,
        "n_layers": model.dims.n_layers,
        "src_vocab_size": model.src_vocab_size,
        "tgt_vocab_size": model.tgt_vocab_size,
        "shared": model.shared,
        "normalized_attention": model.normalized_attention,
        "step": step,
        "src_vocab_hash": src_vocab_hash,
        "tgt_vocab_hash": tgt_vocab_hash,
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savez(path, **{META_KEY: np.array(json.dumps(meta))}, **model.params)


def load_checkpoint(path: str | Path) -> tuple[Seq2SeqModel, dict]:
    """Returns (model, metadata). Raises CheckpointError on shape drift."""
    with np.load(path, allow_pickle=False) as archive:
        if META_KEY not in archive:
            raise CheckpointError(f"{path}: missing metadata entry")
        try:
            meta = json.loads(str(archive[META_KEY]))
        except json.JSONDecodeError as err:
            raise CheckpointError(f"{path}: unreadable metadata") from err
        arrays = {k: archive[k] for k in archive.files if k != META_KEY}

    try:
        dims = Dims(meta["d_emb"], meta["d_hidden"], meta["n_layers"])
        reference = init_model(
            dims,
            meta["src_vocab_size"],
            meta["tgt_vocab_size"],
            shared=meta["shared"],
            normalized_attention=meta["normalized_attention"],
        )
    except (KeyError, TypeError, ValueError) as err:
        raise CheckpointError(f"{path}: bad metadata: {err}") from err

    expected = {k: v.shape for k, v in reference.params.items()}
    actual = {k: v.shape for k, v in arrays.items()}
    if expected.keys() != actual.keys():
        missing = sorted(expected.keys() - actual.keys())
        extra = sorted(actual.keys() - expected.keys())
        raise CheckpointError(
            f"{path}: parameter set mismatch (missing {missing}, extra {extra})"
        )
    for name in expected:
        if expected[name] != actual[name]:
            raise CheckpointError(
                f"{path}: {name} has shape {actual[name]}, expected {expected[name]}"
            )
    params = {k: np.asarray(v, dtype=np.float64) for k, v in arrays.items()}
    model = Seq2SeqModel(
        dims,
        meta["src_vocab_size"],
        meta["tgt_vocab_size"],
        meta["shared"],
        meta["normalized_attention"],
        params,
    )
    return model, meta
