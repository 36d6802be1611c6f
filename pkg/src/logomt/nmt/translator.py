"""Estimator front end over the whole translation stack."""

from __future__ import annotations

from pathlib import Path

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from ..metrics import bleu
from .checkpoint import load_checkpoint, save_checkpoint
from .decoding import translate
from .model import Dims, init_model
from .training import TrainConfig, train
from .vocab import Vocab


def _as_token_lists(X) -> list[list[str]]:
    if isinstance(X, str):
        raise TypeError("pass a sequence of sentences, not one string")
    out = []
    for row in X:
        out.append(row.split() if isinstance(row, str) else list(row))
    return out


class Seq2SeqTranslator(BaseEstimator):
    """Sequence-to-sequence translator with a fit/predict interface.

    fit(X, y) takes parallel sentences, each a list of tokens or a
    whitespace-joined string; it builds both vocabularies from the
    training data and runs the full SGD schedule. predict decodes new
    source sentences to token lists. score returns corpus BLEU scaled
    to [0, 1].

    Parameters mirror the underlying pieces: model size (d_emb,
    d_hidden, n_layers, shared_embeddings, normalized_attention),
    vocabulary truncation (max_vocab, min_count), the training recipe
    (steps, batch_size, learning_rate, dropout), decoding width
    (beam_size, max_len), and the run seed.
    """

    def __init__(
        self,
        d_emb: int = 16,
        d_hidden: int = 32,
        n_layers: int = 2,
        shared_embeddings: bool = False,
        normalized_attention: bool = True,
        max_vocab: int | None = None,
        min_count: int = 1,
        steps: int = 1000,
        batch_size: int = 16,
        learning_rate: float = 0.5,
        dropout: float = 0.0,
        beam_size: int = 1,
        max_len: int | None = None,
        seed: int = 0,
    ):
        self.d_emb = d_emb
        self.d_hidden = d_hidden
        self.n_layers = n_layers
        self.shared_embeddings = shared_embeddings
        self.normalized_attention = normalized_attention
        self.max_vocab = max_vocab
        self.min_count = min_count
        self.steps = steps
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.dropout = dropout
        self.beam_size = beam_size
        self.max_len = max_len
        self.seed = seed

    def fit(self, X, y):
        sources = _as_token_lists(X)
        targets = _as_token_lists(y)
        if len(sources) != len(targets):
            raise ValueError(
                f"{len(sources)} source sentences but {len(targets)} targets"
            )
        if not sources:
            raise ValueError("empty training corpus")
        if self.shared_embeddings:
            joint = Vocab.build(
                sources + targets, max_size=self.max_vocab, min_count=self.min_count
            )
            self.src_vocab_ = joint
            self.tgt_vocab_ = joint
        else:
            self.src_vocab_ = Vocab.build(
                sources, max_size=self.max_vocab, min_count=self.min_count
            )
            self.tgt_vocab_ = Vocab.build(
                targets, max_size=self.max_vocab, min_count=self.min_count
            )
        pairs = [
            (self.src_vocab_.encode(s), self.tgt_vocab_.encode(t))
            for s, t in zip(sources, targets)
        ]
        self.model_ = init_model(
            Dims(self.d_emb, self.d_hidden, self.n_layers),
            len(self.src_vocab_),
            len(self.tgt_vocab_),
            shared=self.shared_embeddings,
            normalized_attention=self.normalized_attention,
            seed=self.seed,
        )
        config = TrainConfig(
            steps=self.steps,
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            dropout=self.dropout,
            seed=self.seed,
        )
        self.loss_curve_ = train(self.model_, pairs, config)
        return self

    def _check_fitted(self):
        if not hasattr(self, "model_"):
            raise NotFittedError("Seq2SeqTranslator is not fitted; call fit first")

    def predict(self, X) -> list[list[str]]:
        self._check_fitted()
        out = []
        for tokens in _as_token_lists(X):
            ids = translate(
                self.model_,
                self.src_vocab_.encode(tokens),
                beam_size=self.beam_size,
                max_len=self.max_len,
            )
            out.append(self.tgt_vocab_.decode(ids))
        return out

    def score(self, X, y) -> float:
        """Corpus BLEU of predict(X) against y, divided by 100."""
        self._check_fitted()
        return bleu(self.predict(X), _as_token_lists(y)).score / 100.0

    def save(self, path: str | Path) -> None:
        """Checkpoint plus the two vocabularies next to it (.src/.tgt.vocab)."""
        self._check_fitted()
        path = Path(path)
        save_checkpoint(
            path,
            self.model_,
            step=len(self.loss_curve_),
            src_vocab_hash=self.src_vocab_.content_hash(),
            tgt_vocab_hash=self.tgt_vocab_.content_hash(),
        )
        self.src_vocab_.save(path.with_suffix(".src.vocab"))
        self.tgt_vocab_.save(path.with_suffix(".tgt.vocab"))

    def load(self, path: str | Path) -> "Seq2SeqTranslator":
        """Restore model_ and vocabularies saved by save(); returns self."""
        path = Path(path)
        self.model_, meta = load_checkpoint(path)
        self.src_vocab_ = Vocab.load(path.with_suffix(".src.vocab"))
        self.tgt_vocab_ = Vocab.load(path.with_suffix(".tgt.vocab"))
        for side, vocab in (("src", self.src_vocab_), ("tgt", self.tgt_vocab_)):
            want = meta[f"{side}_vocab_hash"]
            if want and want != vocab.content_hash():
                raise ValueError(f"{side} vocabulary does not match the checkpoint")
        self.loss_curve_ = [float("nan")] * int(meta.get("step", 0))
        return self
