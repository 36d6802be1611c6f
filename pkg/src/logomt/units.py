"""Unit streams: the token representation shared by every pipeline stage.

A stream is a tokenized sentence whose words are sequences of discrete
symbols. Depending on the granularity a symbol can be a whole word, a
character, an ideograph, a stroke, an end-of-character marker, or a
passthrough grapheme that has no decomposition.

Text form (one sentence per line): symbols are space separated, words are
separated by the ``▁`` sentinel, end-of-character markers are written
``</c0>``, ``</c1>``, ... and everything else is written verbatim.

Flat form (used by the translation model): word structure is carried by a
``@@`` continuation suffix on every symbol that is not the last of its
word, exactly like classic subword-segmented NMT corpora.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from enum import Enum

WORD_SEP = "▁"  # ▁
CONTINUATION = "@@"
EOC_PATTERN = re.compile(r"</c(\d+)>")
_EOC_TOKEN = re.compile(r"^</c(\d+)>$")

# A raw ▁ in input text would collide with the word separator, so it is
# stored escaped and restored on decode.
ESCAPED_WORD_SEP = "\\u2581"

# Multi-character tokens that must survive symbol fusion in one piece.
_ATOMIC = re.compile(r"</c\d+>|\\u2581")


class UnitKind(Enum):
    IDEOGRAPH = "ideograph"
    STROKE = "stroke"
    EOC_MARKER = "eoc_marker"
    PASSTHROUGH = "passthrough"
    WORD_BOUNDARY = "word_boundary"


@dataclass(frozen=True)
class Unit:
    """One symbol of a stream, with its role made explicit.

    Only end-of-character markers carry ``tag_index``; the other kinds
    carry a textual ``symbol``.
    """

    kind: UnitKind
    symbol: str = ""
    tag_index: int | None = None

    def __post_init__(self):
        if self.kind is UnitKind.EOC_MARKER:
            if self.tag_index is None or self.tag_index < 0:
                raise ValueError("end-of-character marker needs tag_index >= 0")
        elif self.tag_index is not None:
            raise ValueError(f"{self.kind.value} units carry no tag_index")
        elif self.kind is not UnitKind.WORD_BOUNDARY and not self.symbol:
            raise ValueError(f"{self.kind.value} units need a symbol")

    @property
    def token(self) -> str:
        """Textual token used in streams."""
        if self.kind is UnitKind.EOC_MARKER:
            return f"</c{self.tag_index}>"
        if self.kind is UnitKind.WORD_BOUNDARY:
            return WORD_SEP
        return self.symbol

    @classmethod
    def eoc(cls, tag_index: int) -> "Unit":
        return cls(UnitKind.EOC_MARKER, tag_index=tag_index)

    @classmethod
    def ideograph(cls, symbol: str) -> "Unit":
        return cls(UnitKind.IDEOGRAPH, symbol)

    @classmethod
    def stroke(cls, symbol: str) -> "Unit":
        return cls(UnitKind.STROKE, symbol)

    @classmethod
    def passthrough(cls, symbol: str) -> "Unit":
        return cls(UnitKind.PASSTHROUGH, symbol)


def parse_eoc(token: str) -> int | None:
    """Tag index of an end-of-character token, or None."""
    m = _EOC_TOKEN.match(token)
    return int(m.group(1)) if m else None


class UnitStream:
    """A sentence as a list of words, each word a tuple of symbol strings."""

    __slots__ = ("words",)

    def __init__(self, words: Iterable[Iterable[str]] = ()):
        self.words: list[tuple[str, ...]] = [tuple(w) for w in words]
        for word in self.words:
            if not word:
                raise ValueError("stream words must contain at least one symbol")
            for tok in word:
                if not tok or tok == WORD_SEP:
                    raise ValueError(f"invalid symbol inside word: {tok!r}")

    def __eq__(self, other) -> bool:
        return isinstance(other, UnitStream) and self.words == other.words

    def __hash__(self):
        return hash(tuple(self.words))

    def __repr__(self) -> str:
        return f"UnitStream({self.words!r})"

    def __iter__(self) -> Iterator[tuple[str, ...]]:
        return iter(self.words)

    def __len__(self) -> int:
        return self.n_units

    @property
    def n_words(self) -> int:
        return len(self.words)

    @property
    def n_units(self) -> int:
        return sum(len(w) for w in self.words)

    def symbols(self) -> Iterator[str]:
        """All symbols in order, without word boundaries."""
        for word in self.words:
            yield from word

    # -- text form ---------------------------------------------------------

    def to_text(self) -> str:
        return f" {WORD_SEP} ".join(" ".join(word) for word in self.words)

    @classmethod
    def from_text(cls, line: str) -> "UnitStream":
        line = line.strip()
        if not line:
            return cls()
        words: list[list[str]] = [[]]
        for tok in line.split():
            if tok == WORD_SEP:
                words.append([])
            else:
                words[-1].append(tok)
        if any(not w for w in words):
            raise ValueError(f"word boundary without a word next to it: {line!r}")
        return cls(words)

    # -- flat form ---------------------------------------------------------

    def to_flat(self) -> list[str]:
        """Symbols with ``@@`` continuation suffixes instead of boundaries."""
        out: list[str] = []
        for word in self.words:
            for tok in word[:-1]:
                out.append(tok + CONTINUATION)
            out.append(word[-1])
        return out

    @classmethod
    def from_flat(cls, tokens: Iterable[str], strict: bool = True) -> "UnitStream":
        """Rebuild word structure from continuation-marked symbols.

        With ``strict`` a trailing continuation marker raises; otherwise it
        is dropped, which is the right behaviour for raw model output.
        """
        words: list[list[str]] = []
        current: list[str] = []
        for tok in tokens:
            if tok.endswith(CONTINUATION) and len(tok) > len(CONTINUATION):
                current.append(tok[: -len(CONTINUATION)])
            else:
                current.append(tok)
                words.append(current)
                current = []
        if current:
            if strict:
                raise ValueError("dangling continuation marker at sentence end")
            words.append(current)
        return cls(words)


def retokenize(text: str) -> list[str]:
    """Split fused symbol text back into atomic symbols.

    End-of-character markers are kept whole; everything else becomes one
    symbol per code point. This inverts symbol concatenation for streams
    whose base symbols are single graphemes or markers, which is the only
    kind of stream the pair-merging stage operates on.
    """
    out: list[str] = []
    pos = 0
    for m in _ATOMIC.finditer(text):
        out.extend(text[pos : m.start()])
        out.append(m.group(0))
        pos = m.end()
    out.extend(text[pos:])
    return out


def read_stream_file(path) -> list[UnitStream]:
    with open(path, encoding="utf-8") as fh:
        return [UnitStream.from_text(line) for line in fh]


def write_stream_file(path, streams: Iterable[UnitStream]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for stream in streams:
            fh.write(stream.to_text() + "\n")
