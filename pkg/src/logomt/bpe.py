"""Byte pair encoding over unit streams.

Merges the most frequent adjacent symbol pair inside words, never across
word boundaries but freely across end-of-character markers, so frequent
characters and even multi-character chunks can re-emerge from sub-character
streams. Ties break lexicographically on (left, right) and a pair needs
corpus frequency >= 2 to become a rule, which keeps training deterministic:
the same corpus and target always produce a byte-identical model file.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .units import UnitStream, retokenize

MIN_PAIR_FREQUENCY = 2


class BpeTrainError(ValueError):
    pass


class BpeFormatError(ValueError):
    """Malformed model file."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


@dataclass(frozen=True)
class MergeRule:
    left: str
    right: str
    rank: int

    def __post_init__(self):
        if not self.left or not self.right:
            raise ValueError("merge rule sides must be non-empty")
        if self.rank < 0:
            raise ValueError("rank must be non-negative")

    @property
    def merged(self) -> str:
        return self.left + self.right


@dataclass
class BpeModel:
    """Ordered merge rules plus bookkeeping about the training alphabet.

    A model loaded from file knows only the base alphabet's size, not its
    symbols or their corpus frequencies; those exist on freshly trained
    models and are needed by vocab_report only.
    """

    rules: list[MergeRule]
    base_size: int
    target_vocab: int
    base_symbols: frozenset[str] | None = None
    frequencies: dict[str, int] | None = field(default=None, repr=False)

    def __post_init__(self):
        for rank, rule in enumerate(self.rules):
            if rule.rank != rank:
                raise ValueError(f"rule ranks must be dense, got {rule.rank} at {rank}")
        if self.base_symbols is not None and len(self.base_symbols) != self.base_size:
            raise ValueError("base_size disagrees with base_symbols")

    @property
    def vocab_size(self) -> int:
        return self.base_size + len(self.rules)

    def vocabulary(self) -> set[str]:
        if self.base_symbols is None:
            raise ValueError("model lacks base symbols (loaded from file?)")
        return set(self.base_symbols) | {r.merged for r in self.rules}

    def save(self, path) -> None:
        lines = [f"{self.base_size}\t{self.target_vocab}"]
        lines.extend(f"{r.left}\t{r.right}" for r in self.rules)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path) -> "BpeModel":
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
        if not lines:
            raise BpeFormatError("empty model file")
        head = lines[0].split("\t")
        if len(head) != 2:
            raise BpeFormatError("header must be base_size<TAB>target_vocab", line_no=1)
        try:
            base_size, target = int(head[0]), int(head[1])
        except ValueError:
            raise BpeFormatError("header fields must be integers", line_no=1) from None
        rules = []
        for i, line in enumerate(lines[1:], start=2):
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise BpeFormatError("rule must be left<TAB>right", line_no=i)
            rules.append(MergeRule(parts[0], parts[1], rank=len(rules)))
        return cls(rules=rules, base_size=base_size, target_vocab=target)


def _word_counts(corpus: Iterable[UnitStream]) -> Counter:
    counts: Counter = Counter()
    for stream in corpus:
        for word in stream.words:
            counts[word] += 1
    return counts


def _merge_word(syms: list[str], left: str, right: str, label: str) -> list[str]:
    # leftmost, non-overlapping
    out: list[str] = []
    i = 0
    n = len(syms)
    while i < n:
        if i + 1 < n and syms[i] == left and syms[i + 1] == right:
            out.append(label)
            i += 2
        else:
            out.append(syms[i])
            i += 1
    return out


def _pairs_of(syms: list[str]) -> Counter:
    return Counter(zip(syms, syms[1:]))


def train(corpus: list[UnitStream], target_vocab: int) -> BpeModel:
    """Greedy pair merging until the vocabulary reaches target_vocab.

    The vocabulary is counted as base symbols plus merge products. Training
    stops early when no pair occurs MIN_PAIR_FREQUENCY times.
    """
    word_freq = _word_counts(corpus)
    if not word_freq:
        raise BpeTrainError("empty corpus")
    base = frozenset(s for word in word_freq for s in word)
    if target_vocab < len(base):
        raise BpeTrainError(
            f"target_vocab {target_vocab} below base alphabet size {len(base)}"
        )

    words: list[list[str]] = [list(w) for w in word_freq]
    freqs: list[int] = list(word_freq.values())
    pair_counts: Counter = Counter()
    pair_sites: dict[tuple[str, str], set[int]] = {}
    for i, syms in enumerate(words):
        for pair, k in _pairs_of(syms).items():
            pair_counts[pair] += k * freqs[i]
            pair_sites.setdefault(pair, set()).add(i)

    vocab = set(base)
    rules: list[MergeRule] = []
    while len(vocab) < target_vocab:
        best = None
        best_count = MIN_PAIR_FREQUENCY - 1
        for pair, count in pair_counts.items():
            if count > best_count or (count == best_count and (best is None or pair < best)):
                best, best_count = pair, count
        if best is None or best_count < MIN_PAIR_FREQUENCY:
            break
        left, right = best
        label = left + right
        if label in vocab:
            raise BpeTrainError(
                f"merge product {label!r} collides with an existing symbol"
            )
        rules.append(MergeRule(left, right, rank=len(rules)))
        vocab.add(label)

        for i in sorted(pair_sites[best]):
            before = _pairs_of(words[i])
            words[i] = _merge_word(words[i], left, right, label)
            after = _pairs_of(words[i])
            for pair in before.keys() | after.keys():
                delta = after[pair] - before[pair]
                if delta:
                    pair_counts[pair] += delta * freqs[i]
                    if pair_counts[pair] == 0:
                        del pair_counts[pair]
                if after[pair]:
                    pair_sites.setdefault(pair, set()).add(i)
                elif before[pair]:
                    sites = pair_sites.get(pair)
                    if sites is not None:
                        sites.discard(i)

    symbol_freq: Counter = Counter()
    for i, syms in enumerate(words):
        for s in syms:
            symbol_freq[s] += freqs[i]
    frequencies = {s: symbol_freq.get(s, 0) for s in vocab}

    return BpeModel(
        rules=rules,
        base_size=len(base),
        target_vocab=target_vocab,
        base_symbols=base,
        frequencies=frequencies,
    )


def train_shared(
    src_corpus: list[UnitStream], tgt_corpus: list[UnitStream], target_vocab: int
) -> BpeModel:
    """One model over the concatenated source and target corpora."""
    return train(list(src_corpus) + list(tgt_corpus), target_vocab)


def apply(model: BpeModel, stream: UnitStream) -> UnitStream:
    """Replay merge rules in rank order inside each word."""
    out = []
    for word in stream.words:
        syms = list(word)
        for rule in model.rules:
            if len(syms) < 2:
                break
            syms = _merge_word(syms, rule.left, rule.right, rule.merged)
        out.append(tuple(syms))
    return UnitStream(out)


def desegment(stream: UnitStream, model: BpeModel | None = None) -> UnitStream:
    """Undo apply by re-splitting fused labels into their original units.

    Without a model, labels split at atomic token boundaries (end-of-character
    markers, the escaped word separator, single code points), which is exact
    for streams built from sub-character or character units. Passing the model
    that produced the stream unwinds its merge rules instead, which is exact
    for any stream.
    """
    if model is None:
        return UnitStream(
            tuple(t for sym in word for t in retokenize(sym)) for word in stream.words
        )
    unmerge = {r.merged: (r.left, r.right) for r in model.rules}

    def split(sym: str) -> list[str]:
        out: list[str] = []
        stack = [sym]
        while stack:
            s = stack.pop()
            rule = unmerge.get(s)
            if rule is None:
                out.append(s)
            else:
                stack.append(rule[1])
                stack.append(rule[0])
        return out

    return UnitStream(
        tuple(t for sym in word for t in split(sym)) for word in stream.words
    )


@dataclass
class VocabReport:
    rows: list[tuple[str, int, str]]  # symbol, frequency, "base" | "merged"
    n_base: int
    n_merged: int

    def to_csv(self) -> str:
        lines = ["symbol,frequency,origin"]
        for sym, freq, origin in self.rows:
            quoted = '"' + sym.replace('"', '""') + '"'
            lines.append(f"{quoted},{freq},{origin}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        lines = [f"vocabulary: {self.n_base} base + {self.n_merged} merged symbols"]
        width = max((len(s) for s, _, _ in self.rows), default=1)
        for sym, freq, origin in self.rows:
            lines.append(f"  {sym:<{width}}  {freq:>8}  {origin}")
        return "\n".join(lines) + "\n"


def vocab_report(model: BpeModel) -> VocabReport:
    """Final vocabulary with training-corpus frequencies.

    Needs a freshly trained model; models loaded from file carry no
    frequency information.
    """
    if model.frequencies is None or model.base_symbols is None:
        raise ValueError("vocab_report needs a trained model with frequencies")
    merged = {r.merged for r in model.rules}
    rows = []
    for sym in sorted(model.vocabulary(), key=lambda s: (-model.frequencies[s], s)):
        origin = "merged" if sym in merged else "base"
        rows.append((sym, model.frequencies[sym], origin))
    return VocabReport(rows=rows, n_base=model.base_size, n_merged=len(model.rules))


class BpeSegmenter(TransformerMixin, BaseEstimator):
    """Estimator wrapper: fit trains merge rules, transform segments streams.

    Parameters
    ----------
    vocab_size : int, target vocabulary (base symbols plus merge products).
    model_file : optional path; when set, fit loads the model instead of
        training and ignores X.
    """

    def __init__(self, vocab_size: int = 1000, model_file=None):
        self.vocab_size = vocab_size
        self.model_file = model_file

    def fit(self, X=None, y=None):
        if self.model_file is not None:
            self.model_ = BpeModel.load(self.model_file)
        else:
            if X is None:
                raise ValueError("fit needs a corpus of unit streams")
            self.model_ = train(list(X), self.vocab_size)
        return self

    def _check_fitted(self):
        if not hasattr(self, "model_"):
            raise NotFittedError("BpeSegmenter is not fitted; call fit first")

    def transform(self, X) -> list[UnitStream]:
        self._check_fitted()
        return [apply(self.model_, s) for s in X]

    def inverse_transform(self, X) -> list[UnitStream]:
        self._check_fitted()
        return [desegment(s, self.model_) for s in X]
