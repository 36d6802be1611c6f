"""Plain SGD training with a fixed two-stage learning-rate schedule."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .model import Seq2SeqModel, backward, forward, iter_minibatches
from .vocab import BOS_ID, PAD_ID

logger = logging.getLogger(__name__)

Pair = tuple[list[int], list[int]]


class TrainingDiverged(RuntimeError):
    """Raised when the loss stops being finite."""


@dataclass
class TrainConfig:
    steps: int = 1000
    batch_size: int = 16
    learning_rate: float = 0.5
    dropout: float = 0.0
    seed: int = 0
    log_every: int = 100
    decay_step: int = field(init=False)

    def __post_init__(self):
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must be in [0, 1)")
        # last third of training runs at a quarter of the base rate
        self.decay_step = math.ceil(2 * self.steps / 3)

    def lr_at(self, step: int) -> float:
        """Learning rate for a 1-based step index."""
        if not 1 <= step <= max(self.steps, 1):
            raise ValueError(f"step {step} outside 1..{self.steps}")
        if self.steps and step >= self.decay_step and self.decay_step > 0:
            return self.learning_rate / 4.0
        return self.learning_rate


def pad_batch(pairs: list[Pair]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pack id pairs into padded (src, tgt_in, tgt_out) matrices.

    Sequences already carry their end-of-sentence id; the decoder input is
    the target shifted right behind the begin-of-sentence id.
    """
    if not pairs:
        raise ValueError("empty batch")
    max_s = max(len(s) for s, _ in pairs)
    max_t = max(len(t) for _, t in pairs)
    if max_t == 0:
        raise ValueError("batch has no target tokens")
    B = len(pairs)
    src = np.full((B, max(max_s, 1)), PAD_ID, dtype=np.int64)
    tgt_in = np.full((B, max_t), PAD_ID, dtype=np.int64)
    tgt_out = np.full((B, max_t), PAD_ID, dtype=np.int64)
    for i, (s, t) in enumerate(pairs):
        src[i, : len(s)] = s
        tgt_out[i, : len(t)] = t
        tgt_in[i, 0] = BOS_ID
        tgt_in[i, 1 : len(t)] = t[:-1]
    return src, tgt_in, tgt_out


def train(
    model: Seq2SeqModel,
    pairs: list[Pair],
    config: TrainConfig,
) -> list[float]:
    """Run SGD in place for config.steps updates; returns the loss curve.

    Batches walk a fresh permutation of the corpus each epoch, all
    randomness from one generator seeded by config.seed so identical
    inputs give identical parameters. Zero steps leaves the model alone.
    """
    if not pairs:
        raise ValueError("no training pairs")
    for s, t in pairs:
        if not t:
            raise ValueError("training pair with empty target")
    if config.steps == 0:
        return []

    rng = np.random.default_rng(config.seed)
    batches = iter_minibatches(len(pairs), config.batch_size, rng)
    losses: list[float] = []
    for step in range(1, config.steps + 1):
        idx = next(batches)
        src, tgt_in, tgt_out = pad_batch([pairs[i] for i in idx])
        loss, _, cache = forward(
            model, src, tgt_in, tgt_out, dropout=config.dropout, rng=rng
        )
        if not np.isfinite(loss):
            raise TrainingDiverged(f"non-finite loss at step {step}")
        grads = backward(model, cache)
        lr = config.lr_at(step)
        for name, g in grads.items():
            model.params[name] -= lr * g
        losses.append(float(loss))
        if config.log_every and step % config.log_every == 0:
            logger.info("step %d loss %.4f lr %.4g", step, loss, lr)
    return losses


def evaluate_loss(model: Seq2SeqModel, pairs: list[Pair]) -> float:
    """Mean teacher-forced cross-entropy over the whole set, no dropout."""
    src, tgt_in, tgt_out = pad_batch(pairs)
    loss, _, _ = forward(model, src, tgt_in, tgt_out)
    return float(loss)


def token_accuracy(model: Seq2SeqModel, pairs: list[Pair]) -> float:
    """Teacher-forced argmax accuracy over non-pad target positions."""
    src, tgt_in, tgt_out = pad_batch(pairs)
    p = model.params
    _, _, cache = forward(model, src, tgt_in, tgt_out)
    logits = cache["concat"] @ p["out_W"].T + p["out_b"]
    pred = logits.argmax(axis=2)
    mask = cache["tgt_mask"]
    hits = ((pred == tgt_out) * mask).sum()
    return float(hits / mask.sum())
