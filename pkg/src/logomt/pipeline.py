"""End-to-end experiment orchestration.

One experiment is a straight line: ingest a parallel corpus, carve off
dev/test sets, drop overlong training pairs, re-express each side at a
granularity level, optionally train and apply BPE, train the model,
translate the test set, invert every preprocessing step, and score.
Every stage writes its artifacts under the output directory and the
manifest records enough to re-run the experiment byte for byte: the
whole chain is deterministic given the seed.

Granularity levels: "word" keeps tokens whole, "char" splits them into
code points, "char_bpe" does the same but trains BPE on top, and
"ideograph_bpe"/"stroke_bpe" decompose characters through the table
before BPE.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bpe import BpeModel, apply as bpe_apply, desegment, train as bpe_train
from .bpe import train_shared as bpe_train_shared
from .decomposition import DecompositionTable, decode_text, encode_text, load_table
from .metrics import bleu
from .nmt.checkpoint import save_checkpoint
from .nmt.model import Dims, init_model
from .nmt.training import TrainConfig, token_accuracy, train as nmt_train
from .nmt.vocab import Vocab
from .nmt.decoding import translate_corpus
from .units import ESCAPED_WORD_SEP, WORD_SEP, UnitStream, write_stream_file

LEVELS = ("word", "char", "char_bpe", "ideograph_bpe", "stroke_bpe")
BPE_LEVELS = frozenset({"char_bpe", "ideograph_bpe", "stroke_bpe"})
SUBCHAR_LEVELS = frozenset({"ideograph_bpe", "stroke_bpe"})


def check_granularity(level: str) -> str:
    if level not in LEVELS:
        raise ValueError(f"unknown granularity {level!r}, expected one of {LEVELS}")
    return level


def _table_level(level: str) -> str:
    return "ideograph" if level == "ideograph_bpe" else "stroke"


class PipelineError(RuntimeError):
    """A stage failed; the message carries the stage name."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage


@dataclass
class ParallelCorpus:
    """Aligned (source tokens, target tokens) pairs.

    n_dropped counts pairs removed because one side was empty; source is
    a free-form provenance note.
    """

    pairs: list[tuple[list[str], list[str]]] = field(default_factory=list)
    n_dropped: int = 0
    source: str = ""

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def sources(self) -> list[list[str]]:
        return [s for s, _ in self.pairs]

    def targets(self) -> list[list[str]]:
        return [t for _, t in self.pairs]


def ingest(
    src_file: str | Path | None = None,
    tgt_file: str | Path | None = None,
    tsv_file: str | Path | None = None,
) -> ParallelCorpus:
    """Read a parallel corpus from two line-aligned files or one TSV.

    Input is whitespace-tokenized text. Pairs with an empty side are
    dropped and counted rather than kept or raised on.
    """
    if tsv_file is not None:
        if src_file is not None or tgt_file is not None:
            raise ValueError("give either two files or one TSV, not both")
        rows = []
        with open(tsv_file, encoding="utf-8") as fh:
            for line in fh:
                left, _, right = line.rstrip("\n").partition("\t")
                rows.append((left.split(), right.split()))
        source = f"tsv:{tsv_file}"
    else:
        if src_file is None or tgt_file is None:
            raise ValueError("two-file ingestion needs both src_file and tgt_file")
        with open(src_file, encoding="utf-8") as fh:
            src_lines = [line.rstrip("\n").split() for line in fh]
        with open(tgt_file, encoding="utf-8") as fh:
            tgt_lines = [line.rstrip("\n").split() for line in fh]
        if len(src_lines) != len(tgt_lines):
            raise ValueError(
                f"line count mismatch: {src_file} has {len(src_lines)}, "
                f"{tgt_file} has {len(tgt_lines)}"
            )
        rows = list(zip(src_lines, tgt_lines))
        source = f"{src_file}+{tgt_file}"

    pairs = [(s, t) for s, t in rows if s and t]
    return ParallelCorpus(pairs, n_dropped=len(rows) - len(pairs), source=source)


def write_corpus(corpus: ParallelCorpus, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s, t in corpus:
            fh.write(" ".join(s) + "\t" + " ".join(t) + "\n")


def split(
    corpus: ParallelCorpus, dev_n: int, test_n: int, seed: int
) -> tuple[ParallelCorpus, ParallelCorpus, ParallelCorpus]:
    """Seeded disjoint train/dev/test selection without replacement."""
    if dev_n < 0 or test_n < 0:
        raise ValueError("split sizes must be non-negative")
    n = len(corpus)
    if n <= dev_n + test_n:
        raise ValueError(
            f"corpus of {n} pairs cannot spare dev={dev_n} plus test={test_n}"
        )
    perm = np.random.default_rng(seed).permutation(n)
    test_idx = sorted(perm[:test_n].tolist())
    dev_idx = sorted(perm[test_n : test_n + dev_n].tolist())
    train_idx = sorted(perm[test_n + dev_n :].tolist())

    def take(indices, name):
        return ParallelCorpus(
            [corpus.pairs[i] for i in indices], source=f"{name} of {corpus.source}"
        )

    return take(train_idx, "train"), take(dev_idx, "dev"), take(test_idx, "test")


def _side_length(tokens: list[str], level: str, table: DecompositionTable | None) -> int:
    if level == "word":
        return len(tokens)
    if level in SUBCHAR_LEVELS:
        return encode_text(table, tokens, _table_level(level)).n_units
    return sum(len(tok) for tok in tokens)  # char and char_bpe


def length_filter(
    corpus: ParallelCorpus,
    coverage: float = 0.90,
    level: str = "word",
    table: DecompositionTable | None = None,
    tgt_level: str | None = None,
) -> tuple[ParallelCorpus, int]:
    """Drop pairs longer than the smallest cap covering the given fraction.

    A pair's length is the max over its two sides, each measured in units
    at its granularity (tgt_level defaults to level). Returns the filtered
    corpus and the cap that was used.
    """
    if not 0.0 < coverage <= 1.0:
        raise ValueError("coverage must be in (0, 1]")
    check_granularity(level)
    tgt_level = level if tgt_level is None else check_granularity(tgt_level)
    if not len(corpus):
        raise ValueError("cannot length-filter an empty corpus")
    lengths = [
        max(_side_length(s, level, table), _side_length(t, tgt_level, table))
        for s, t in corpus
    ]
    ranked = sorted(lengths)
    n = len(ranked)
    # smallest rank k with k/n >= coverage; comparing the ratio rather than
    # taking ceil(coverage*n) keeps 0.9 * 10 from rounding past 9.0
    k = next(i + 1 for i in range(n) if (i + 1) / n >= coverage)
    max_len = ranked[k - 1]
    kept = [pair for pair, n in zip(corpus.pairs, lengths) if n <= max_len]
    filtered = ParallelCorpus(
        kept, n_dropped=len(corpus) - len(kept), source=corpus.source
    )
    return filtered, max_len


def transform(
    sentences: list[list[str]], level: str, table: DecompositionTable | None = None
) -> list[UnitStream]:
    """Re-express one corpus side as unit streams at a granularity level.

    Word keeps each token as a single unit; char splits tokens into code
    points; the BPE levels produce the base streams BPE trains on, with
    the sub-character ones routed through the decomposition table. Every
    level remains exactly invertible via detransform.
    """
    check_granularity(level)
    if level in SUBCHAR_LEVELS:
        if table is None:
            raise ValueError(f"{level} needs a decomposition table")
        return [encode_text(table, toks, _table_level(level)) for toks in sentences]

    def esc(sym: str) -> str:
        return ESCAPED_WORD_SEP if sym == WORD_SEP else sym

    if level == "word":
        return [UnitStream([[esc(tok)] for tok in toks]) for toks in sentences]
    return [UnitStream([[esc(c) for c in tok] for tok in toks]) for toks in sentences]


def detransform(
    streams: list[UnitStream],
    level: str,
    table: DecompositionTable | None = None,
    lenient: bool = False,
    unknown_char: str = "\N{REPLACEMENT CHARACTER}",
) -> list[list[str]]:
    """Invert transform: unit streams back to token sequences."""
    check_granularity(level)
    if level in SUBCHAR_LEVELS:
        if table is None:
            raise ValueError(f"{level} needs a decomposition table")
        return [
            decode_text(table, s, _table_level(level), lenient, unknown_char)
            for s in streams
        ]

    def unesc(sym: str) -> str:
        return WORD_SEP if sym == ESCAPED_WORD_SEP else sym

    return [["".join(unesc(u) for u in word) for word in s] for s in streams]


@dataclass
class ExperimentConfig:
    """Flat description of one experiment, readable from key=value files.

    Corpus input is either src+tgt (two aligned files) or tsv. An empty
    table path means the bundled sample table. max_vocab 0 means no cap.
    """

    src: str = ""
    tgt: str = ""
    tsv: str = ""
    src_level: str = "ideograph_bpe"
    tgt_level: str = "ideograph_bpe"
    table: str = ""
    bpe_vocab: int = 500
    shared_vocab: bool = False
    coverage: float = 0.90
    dev_n: int = 1000
    test_n: int = 1000
    max_vocab: int = 0
    min_count: int = 1
    d_emb: int = 32
    d_hidden: int = 64
    n_layers: int = 1
    normalized_attention: bool = True
    steps: int = 3000
    batch_size: int = 8
    learning_rate: float = 0.5
    dropout: float = 0.0
    beam_size: int = 1
    eval_train: bool = False
    out_dir: str = "run"
    seed: int = 0

    def __post_init__(self):
        check_granularity(self.src_level)
        check_granularity(self.tgt_level)
        if self.shared_vocab and self.src_level != self.tgt_level:
            raise ValueError(
                "shared_vocab requires the same granularity on both sides, "
                f"got {self.src_level} and {self.tgt_level}"
            )
        if bool(self.tsv) == bool(self.src or self.tgt):
            raise ValueError("configure either src+tgt or tsv, exactly one")
        if (self.src == "") != (self.tgt == ""):
            raise ValueError("src and tgt must be given together")

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        """Parse `key = value` lines; # starts a comment; unknown keys fail."""
        types = {f.name: type(f.default) for f in dataclasses.fields(cls)}
        values: dict = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                key, eq, value = line.partition("=")
                key, value = key.strip(), value.strip()
                if not eq or not key:
                    raise ValueError(f"{path}:{lineno}: expected key = value")
                if key not in types:
                    raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
                kind = types[key]
                try:
                    if kind is bool:
                        if value not in ("true", "false"):
                            raise ValueError("expected true or false")
                        values[key] = value == "true"
                    else:
                        values[key] = kind(value)
                except ValueError as err:
                    raise ValueError(f"{path}:{lineno}: bad {key}: {err}") from None
        return cls(**values)

    def to_file(self, path: str | Path) -> None:
        Path(path).write_text(self.canonical(), encoding="utf-8")

    def canonical(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if isinstance(value, bool):
                value = "true" if value else "false"
            lines.append(f"{f.name} = {value}")
        return "\n".join(lines) + "\n"

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical().encode("utf-8")).hexdigest()

    def load_table(self) -> DecompositionTable | None:
        if not (self.src_level in SUBCHAR_LEVELS or self.tgt_level in SUBCHAR_LEVELS):
            return None
        if self.table:
            return load_table(self.table)
        from .data import sample_table_path

        return load_table(sample_table_path())


def _write_tokens(path: Path, sentences: list[list[str]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for toks in sentences:
            fh.write(" ".join(toks) + "\n")


class _Stage:
    """Tags exceptions with the stage that raised them."""

    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and not isinstance(exc, PipelineError):
            raise PipelineError(self.name, exc) from exc
        return False


def run_experiment(config: ExperimentConfig) -> dict:
    """Execute the full chain and return the manifest (also written to
    out_dir/manifest.json, with human-readable and CSV reports beside it)."""
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "streams").mkdir(exist_ok=True)
    table = None
    if config.src_level in SUBCHAR_LEVELS or config.tgt_level in SUBCHAR_LEVELS:
        with _Stage("table"):
            table = config.load_table()

    with _Stage("ingest"):
        corpus = ingest(
            src_file=config.src or None,
            tgt_file=config.tgt or None,
            tsv_file=config.tsv or None,
        )
        write_corpus(corpus, out / "corpus.tsv")

    with _Stage("split"):
        train_c, dev_c, test_c = split(corpus, config.dev_n, config.test_n, config.seed)

    with _Stage("filter"):
        train_c, max_len = length_filter(
            train_c, config.coverage, config.src_level, table, config.tgt_level
        )
        n_filtered = train_c.n_dropped
        for name, part in (("train", train_c), ("dev", dev_c), ("test", test_c)):
            write_corpus(part, out / f"{name}.tsv")

    splits = {"train": train_c, "dev": dev_c, "test": test_c}
    streams: dict[tuple[str, str], list[UnitStream]] = {}
    with _Stage("transform"):
        for name, part in splits.items():
            streams[name, "src"] = transform(part.sources(), config.src_level, table)
            streams[name, "tgt"] = transform(part.targets(), config.tgt_level, table)

    bpe_models: dict[str, BpeModel | None] = {"src": None, "tgt": None}
    with _Stage("bpe"):
        if config.shared_vocab and config.src_level in BPE_LEVELS:
            shared_model = bpe_train_shared(
                streams["train", "src"], streams["train", "tgt"], config.bpe_vocab
            )
            shared_model.save(out / "shared.bpe")
            bpe_models = {"src": shared_model, "tgt": shared_model}
        else:
            for side, level in (("src", config.src_level), ("tgt", config.tgt_level)):
                if level in BPE_LEVELS:
                    model = bpe_train(streams["train", side], config.bpe_vocab)
                    model.save(out / f"{side}.bpe")
                    bpe_models[side] = model
        for (name, side), part in streams.items():
            model = bpe_models[side]
            if model is not None:
                streams[name, side] = [bpe_apply(model, s) for s in part]
        for (name, side), part in streams.items():
            write_stream_file(out / "streams" / f"{name}.{side}.units", part)

    flat = {key: [s.to_flat() for s in part] for key, part in streams.items()}
    with _Stage("vocab"):
        max_vocab = config.max_vocab or None
        if config.shared_vocab:
            joint = Vocab.build(
                flat["train", "src"] + flat["train", "tgt"],
                max_size=max_vocab,
                min_count=config.min_count,
            )
            src_vocab = tgt_vocab = joint
        else:
            src_vocab = Vocab.build(
                flat["train", "src"], max_size=max_vocab, min_count=config.min_count
            )
            tgt_vocab = Vocab.build(
                flat["train", "tgt"], max_size=max_vocab, min_count=config.min_count
            )
        src_vocab.save(out / "src.vocab")
        tgt_vocab.save(out / "tgt.vocab")

    with _Stage("train"):
        pairs = [
            (src_vocab.encode(s), tgt_vocab.encode(t))
            for s, t in zip(flat["train", "src"], flat["train", "tgt"])
        ]
        model = init_model(
            Dims(config.d_emb, config.d_hidden, config.n_layers),
            len(src_vocab),
            len(tgt_vocab),
            shared=config.shared_vocab,
            normalized_attention=config.normalized_attention,
            seed=config.seed,
        )
        train_cfg = TrainConfig(
            steps=config.steps,
            batch_size=config.batch_size,
            learning_rate=config.learning_rate,
            dropout=config.dropout,
            seed=config.seed,
        )
        losses = nmt_train(model, pairs, train_cfg)
        accuracy = token_accuracy(model, pairs)
        save_checkpoint(
            out / "checkpoint.npz",
            model,
            step=len(losses),
            src_vocab_hash=src_vocab.content_hash(),
            tgt_vocab_hash=tgt_vocab.content_hash(),
        )

    def decode_side(name: str) -> list[list[str]]:
        """translate -> ids -> flat tokens -> streams -> original tokens."""
        encoded = [src_vocab.encode(s) for s in flat[name, "src"]]
        id_out = translate_corpus(model, encoded, beam_size=config.beam_size)
        token_out = [tgt_vocab.decode(ids) for ids in id_out]
        hyp_streams = [UnitStream.from_flat(toks, strict=False) for toks in token_out]
        if bpe_models["tgt"] is not None:
            hyp_streams = [desegment(s, bpe_models["tgt"]) for s in hyp_streams]
        # model output may be malformed, so decoding is always lenient here
        return detransform(hyp_streams, config.tgt_level, table, lenient=True)

    results: dict = {
        "initial_loss": losses[0] if losses else None,
        "final_loss": losses[-1] if losses else None,
        "token_accuracy_train": accuracy,
        "bleu_test": None,
        "bleu_train": None,
    }
    with _Stage("evaluate"):
        if len(test_c):
            hyps = decode_side("test")
            _write_tokens(out / "test.hyp.txt", hyps)
            results["bleu_test"] = bleu(hyps, test_c.targets()).score
        if config.eval_train:
            hyps = decode_side("train")
            _write_tokens(out / "train.hyp.txt", hyps)
            results["bleu_train"] = bleu(hyps, train_c.targets()).score

    manifest = {
        "config": {
            f.name: getattr(config, f.name) for f in dataclasses.fields(config)
        },
        "config_hash": config.config_hash(),
        "seed": config.seed,
        "counts": {
            "ingested": len(corpus),
            "ingest_dropped": corpus.n_dropped,
            "train": len(train_c),
            "dev": len(dev_c),
            "test": len(test_c),
            "filter_dropped": n_filtered,
            "max_len": max_len,
        },
        "vocab": {"src": len(src_vocab), "tgt": len(tgt_vocab)},
        "artifacts": {
            "corpus": "corpus.tsv",
            "splits": ["train.tsv", "dev.tsv", "test.tsv"],
            "streams": sorted(
                str(p.relative_to(out)) for p in (out / "streams").glob("*.units")
            ),
            "bpe": sorted(str(p.relative_to(out)) for p in out.glob("*.bpe")),
            "vocabs": ["src.vocab", "tgt.vocab"],
            "checkpoint": "checkpoint.npz",
        },
        "results": results,
    }
    with _Stage("report"):
        (out / "manifest.json").write_text(
            json.dumps(manifest, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        (out / "report.csv").write_text(_report_csv(manifest), encoding="utf-8")
        (out / "report.txt").write_text(_report_text(manifest), encoding="utf-8")
    return manifest


def _report_rows(manifest: dict) -> list[tuple[str, object]]:
    rows: list[tuple[str, object]] = []
    for key, value in manifest["counts"].items():
        rows.append((key, value))
    rows.append(("src_vocab", manifest["vocab"]["src"]))
    rows.append(("tgt_vocab", manifest["vocab"]["tgt"]))
    for key, value in manifest["results"].items():
        if value is not None:
            rows.append((key, round(value, 4) if isinstance(value, float) else value))
    return rows


def _report_csv(manifest: dict) -> str:
    lines = ["metric,value"]
    lines += [f"{k},{v}" for k, v in _report_rows(manifest)]
    return "\n".join(lines) + "\n"


def _report_text(manifest: dict) -> str:
    rows = _report_rows(manifest)
    width = max(len(k) for k, _ in rows)
    lines = [f"{k.ljust(width)}  {v}" for k, v in rows]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class StatsRow:
    level: str
    vocab: int
    avg_units: float
    passthrough_rate: float | None


@dataclass
class StatsReport:
    """Granularity comparison: what each level does to one corpus side."""

    rows: list[StatsRow]

    def to_csv(self) -> str:
        lines = ["level,vocab,avg_units,passthrough_rate"]
        for r in self.rows:
            pt = "" if r.passthrough_rate is None else f"{r.passthrough_rate:.4f}"
            lines.append(f"{r.level},{r.vocab},{r.avg_units:.2f},{pt}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        header = f"{'level':<12}{'vocab':>8}{'avg units':>12}{'passthrough':>14}"
        lines = [header, "-" * len(header)]
        for r in self.rows:
            pt = "-" if r.passthrough_rate is None else f"{r.passthrough_rate:.2%}"
            lines.append(f"{r.level:<12}{r.vocab:>8}{r.avg_units:>12.2f}{pt:>14}")
        return "\n".join(lines) + "\n"


def stats_report(
    sentences: list[list[str]], table: DecompositionTable | None = None
) -> StatsReport:
    """Vocabulary size, mean units per sentence, and passthrough rate of
    one corpus side at each granularity (pre-BPE streams)."""
    levels = ["word", "char"] + (["ideograph_bpe", "stroke_bpe"] if table else [])
    rows = []
    n = len(sentences)
    for level in levels:
        streams = transform(sentences, level, table)
        symbols: set[str] = set()
        total = 0
        passthrough = 0
        for stream in streams:
            for sym in stream.symbols():
                symbols.add(sym)
                total += 1
                if level in SUBCHAR_LEVELS and _is_passthrough(sym, table, level):
                    passthrough += 1
        if level in SUBCHAR_LEVELS:
            rate = passthrough / total if total else 0.0
        else:
            rate = None
        rows.append(
            StatsRow(
                level=level.replace("_bpe", ""),
                vocab=len(symbols),
                avg_units=total / n if n else 0.0,
                passthrough_rate=rate,
            )
        )
    return StatsReport(rows)


def _is_passthrough(sym: str, table: DecompositionTable, level: str) -> bool:
    from .units import parse_eoc

    if parse_eoc(sym) is not None:
        return False
    return sym not in table.inventory(_table_level(level))
