"""Corpus BLEU and paired bootstrap significance testing.

Sentences are token sequences. The tokenizer hook converts whatever the
caller passes (usually raw strings) into tokens; the default hook is the
identity, for pre-tokenized input.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

Tokenizer = Callable[[object], Sequence[str]]


def identity_tokenize(sentence) -> Sequence[str]:
    return sentence


def whitespace_tokenize(sentence: str) -> list[str]:
    return sentence.split()


def char_tokenize(sentence: str) -> list[str]:
    """Non-space code points, for tokenizer-free scoring of CJK text."""
    return [c for c in sentence if not c.isspace()]


@dataclass(frozen=True)
class BleuResult:
    score: float
    precisions: tuple[float, ...]
    brevity_penalty: float
    hyp_length: int
    ref_length: int

    def as_dict(self) -> dict:
        return {
            "score": self.score,
            "precisions": list(self.precisions),
            "brevity_penalty": self.brevity_penalty,
            "hyp_length": self.hyp_length,
            "ref_length": self.ref_length,
        }

    def __str__(self) -> str:
        ps = "/".join(f"{100 * p:.1f}" for p in self.precisions)
        return (
            f"BLEU = {self.score:.2f} {ps} "
            f"(BP = {self.brevity_penalty:.3f}, hyp_len = {self.hyp_length}, "
            f"ref_len = {self.ref_length})"
        )


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def sentence_stats(hyp: Sequence[str], ref: Sequence[str], max_n: int) -> np.ndarray:
    """Sufficient statistics: per-n clipped matches and totals, then lengths."""
    stats = np.zeros(2 * max_n + 2, dtype=np.int64)
    for n in range(1, max_n + 1):
        hyp_counts = _ngrams(hyp, n)
        if hyp_counts:
            ref_counts = _ngrams(ref, n)
            stats[2 * (n - 1)] = sum(
                min(c, ref_counts[g]) for g, c in hyp_counts.items()
            )
            stats[2 * (n - 1) + 1] = sum(hyp_counts.values())
    stats[2 * max_n] = len(hyp)
    stats[2 * max_n + 1] = len(ref)
    return stats


def _score_from_stats(stats: np.ndarray, max_n: int, smoothing: bool) -> BleuResult:
    precisions = []
    for n in range(1, max_n + 1):
        matches = int(stats[2 * (n - 1)])
        total = int(stats[2 * (n - 1) + 1])
        if smoothing and n > 1:
            matches, total = matches + 1, total + 1
        precisions.append(matches / total if total else 0.0)
    hyp_len = int(stats[2 * max_n])
    ref_len = int(stats[2 * max_n + 1])
    if hyp_len == 0:
        bp = 0.0
    elif hyp_len > ref_len:
        bp = 1.0
    else:
        bp = math.exp(1.0 - ref_len / hyp_len)
    if any(p == 0.0 for p in precisions):
        score = 0.0
    else:
        score = bp * math.exp(sum(math.log(p) for p in precisions) / max_n) * 100.0
    return BleuResult(
        score=score,
        precisions=tuple(precisions),
        brevity_penalty=bp,
        hyp_length=hyp_len,
        ref_length=ref_len,
    )


def _tokenize_corpus(
    hypotheses: Iterable, references: Iterable, tokenizer_hook: Tokenizer | None
) -> tuple[list[Sequence[str]], list[Sequence[str]]]:
    hook = tokenizer_hook or identity_tokenize
    hyps = [list(hook(h)) for h in hypotheses]
    refs = [list(hook(r)) for r in references]
    if len(hyps) != len(refs):
        raise ValueError(f"{len(hyps)} hypotheses vs {len(refs)} references")
    if not hyps:
        raise ValueError("empty corpus")
    return hyps, refs


def bleu(
    hypotheses: Iterable,
    references: Iterable,
    max_n: int = 4,
    tokenizer_hook: Tokenizer | None = None,
    smoothing: bool = False,
) -> BleuResult:
    """Corpus-level modified n-gram precision with brevity penalty.

    With smoothing off (the default), any empty n-gram precision zeroes the
    score. The add-one smoothing flag adjusts orders above 1 only.
    """
    hyps, refs = _tokenize_corpus(hypotheses, references, tokenizer_hook)
    total = np.zeros(2 * max_n + 2, dtype=np.int64)
    for hyp, ref in zip(hyps, refs):
        total += sentence_stats(hyp, ref, max_n)
    return _score_from_stats(total, max_n, smoothing)


@dataclass(frozen=True)
class SignificanceResult:
    n_samples: int
    bleu_a: float
    bleu_b: float
    wins_a: int
    wins_b: int
    ties: int
    p_value: float
    alpha: float
    significant: bool

    def as_dict(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "bleu_a": self.bleu_a,
            "bleu_b": self.bleu_b,
            "wins_a": self.wins_a,
            "wins_b": self.wins_b,
            "ties": self.ties,
            "p_value": self.p_value,
            "alpha": self.alpha,
            "significant": self.significant,
        }

    def __str__(self) -> str:
        verdict = "significant" if self.significant else "not significant"
        return (
            f"BLEU A = {self.bleu_a:.2f}, B = {self.bleu_b:.2f} | "
            f"wins A/B/tie = {self.wins_a}/{self.wins_b}/{self.ties} | "
            f"p = {self.p_value:.6f} ({verdict} at alpha = {self.alpha})"
        )


def bootstrap_significance(
    hyps_a: Iterable,
    hyps_b: Iterable,
    references: Iterable,
    samples: int = 1000,
    alpha: float = 0.0001,
    seed: int = 0,
    max_n: int = 4,
    tokenizer_hook: Tokenizer | None = None,
    smoothing: bool = False,
) -> SignificanceResult:
    """Paired bootstrap over sentences (resampled with replacement).

    The overall lower-scoring system is the null candidate; each sample
    where it scores at least as high as the other counts toward p. The
    estimate is bias-corrected as (wins + ties + 1) / (samples + 1), so
    identical systems give p = 1 and a perfect separation over 999
    samples gives p = 0.001.
    """
    if samples <= 0:
        raise ValueError("samples must be positive")
    ref_list = list(references)
    a, refs = _tokenize_corpus(hyps_a, ref_list, tokenizer_hook)
    b, _ = _tokenize_corpus(hyps_b, ref_list, tokenizer_hook)

    stats_a = np.stack([sentence_stats(h, r, max_n) for h, r in zip(a, refs)])
    stats_b = np.stack([sentence_stats(h, r, max_n) for h, r in zip(b, refs)])
    full_a = _score_from_stats(stats_a.sum(axis=0), max_n, smoothing).score
    full_b = _score_from_stats(stats_b.sum(axis=0), max_n, smoothing).score

    n = len(refs)
    rng = np.random.default_rng(seed)
    wins_a = wins_b = ties = 0
    for _ in range(samples):
        idx = rng.integers(0, n, size=n)
        sa = _score_from_stats(stats_a[idx].sum(axis=0), max_n, smoothing).score
        sb = _score_from_stats(stats_b[idx].sum(axis=0), max_n, smoothing).score
        if sa > sb:
            wins_a += 1
        elif sb > sa:
            wins_b += 1
        else:
            ties += 1

    lower_wins = wins_b if full_a >= full_b else wins_a
    p = (lower_wins + ties + 1) / (samples + 1)
    return SignificanceResult(
        n_samples=samples,
        bleu_a=full_a,
        bleu_b=full_b,
        wins_a=wins_a,
        wins_b=wins_b,
        ties=ties,
        p_value=p,
        alpha=alpha,
        significant=p <= alpha,
    )
