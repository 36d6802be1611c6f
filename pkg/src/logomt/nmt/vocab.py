"""Symbol/id bijection with four reserved ids."""

from __future__ import annotations

import hashlib
from collections import Counter
from typing import Iterable, Iterator

PAD_ID = 0
BOS_ID = 1
EOS_ID = 2
UNK_ID = 3

PAD, BOS, EOS, UNK = "<pad>", "<s>", "</s>", "<unk>"
RESERVED = (PAD, BOS, EOS, UNK)


class Vocab:
    """Bidirectional symbol/id map. Ids 0..3 are pad, bos, eos, unk."""

    def __init__(self, symbols: Iterable[str] = ()):
        self._symbols: list[str] = list(RESERVED)
        self._ids: dict[str, int] = {s: i for i, s in enumerate(self._symbols)}
        for sym in symbols:
            self.add(sym)

    def add(self, symbol: str) -> int:
        if not symbol:
            raise ValueError("empty symbol")
        if symbol in self._ids:
            if symbol in RESERVED:
                return self._ids[symbol]
            raise ValueError(f"duplicate symbol {symbol!r}")
        self._ids[symbol] = len(self._symbols)
        self._symbols.append(symbol)
        return self._ids[symbol]

    @classmethod
    def build(
        cls,
        corpus: Iterable[Iterable[str]],
        max_size: int | None = None,
        min_count: int = 1,
    ) -> "Vocab":
        """Vocabulary from a token corpus, most frequent first, ties by symbol."""
        counts = Counter(tok for sent in corpus for tok in sent)
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        kept = [s for s, c in ranked if c >= min_count and s not in RESERVED]
        if max_size is not None:
            if max_size < len(RESERVED):
                raise ValueError(f"max_size below the {len(RESERVED)} reserved ids")
            kept = kept[: max_size - len(RESERVED)]
        return cls(kept)

    def __len__(self) -> int:
        return len(self._symbols)

    def __contains__(self, symbol: str) -> bool:
        return symbol in self._ids

    def __iter__(self) -> Iterator[str]:
        return iter(self._symbols)

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocab) and self._symbols == other._symbols

    def id_of(self, symbol: str) -> int:
        return self._ids.get(symbol, UNK_ID)

    def symbol_of(self, idx: int) -> str:
        if not 0 <= idx < len(self._symbols):
            raise IndexError(f"id {idx} outside vocabulary of {len(self._symbols)}")
        return self._symbols[idx]

    def encode(self, tokens: Iterable[str], append_eos: bool = True) -> list[int]:
        ids = [self.id_of(t) for t in tokens]
        if append_eos:
            ids.append(EOS_ID)
        return ids

    def decode(self, ids: Iterable[int], strip_specials: bool = True) -> list[str]:
        toks = [self.symbol_of(i) for i in ids]
        if strip_specials:
            toks = [t for t in toks if t not in RESERVED]
        return toks

    def content_hash(self) -> str:
        blob = "\n".join(self._symbols).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()

    def save(self, path) -> None:
        # reserved ids are implicit; one symbol per line in id order
        with open(path, "w", encoding="utf-8") as fh:
            for sym in self._symbols[len(RESERVED):]:
                fh.write(sym + "\n")

    @classmethod
    def load(cls, path) -> "Vocab":
        with open(path, encoding="utf-8") as fh:
            return cls(line.rstrip("\n") for line in fh if line.rstrip("\n"))
