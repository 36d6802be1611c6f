"""Command line front end.

Each subcommand wraps one library operation and reads/writes plain
files, so a full experiment can be assembled by hand stage by stage or
run in one shot with `run`. Text files are UTF-8, one sentence per
line; parallel corpora are TSV (source TAB target); unit streams use
their text form with the word separator between words.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import bpe
from .decomposition import load_table
from .metrics import bleu, bootstrap_significance
from .nmt.checkpoint import load_checkpoint
from .nmt.decoding import translate_corpus
from .nmt.translator import Seq2SeqTranslator
from .nmt.vocab import Vocab
from .pipeline import (
    ExperimentConfig,
    PipelineError,
    detransform,
    ingest,
    length_filter,
    run_experiment,
    split,
    stats_report,
    transform,
    write_corpus,
)
from .units import read_stream_file, write_stream_file


def _read_token_lines(path: str) -> list[list[str]]:
    with open(path, encoding="utf-8") as fh:
        return [line.rstrip("\n").split() for line in fh]


def _write_token_lines(path: str, sentences: list[list[str]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for toks in sentences:
            fh.write(" ".join(toks) + "\n")


def _load_table_arg(path: str | None):
    if path:
        return load_table(path)
    from .data import sample_table_path

    return load_table(sample_table_path())


def cmd_ingest(args) -> int:
    corpus = ingest(src_file=args.src, tgt_file=args.tgt, tsv_file=args.tsv)
    write_corpus(corpus, args.out)
    print(f"{len(corpus)} pairs written to {args.out} ({corpus.n_dropped} dropped)")
    return 0


def cmd_split(args) -> int:
    corpus = ingest(tsv_file=args.corpus)
    train, dev, test = split(corpus, args.dev_n, args.test_n, args.seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, part in (("train", train), ("dev", dev), ("test", test)):
        write_corpus(part, out / f"{name}.tsv")
        print(f"{name}: {len(part)} pairs")
    return 0


def cmd_filter(args) -> int:
    corpus = ingest(tsv_file=args.corpus)
    table = None
    if args.level in ("ideograph_bpe", "stroke_bpe") or args.tgt_level in (
        "ideograph_bpe",
        "stroke_bpe",
    ):
        table = _load_table_arg(args.table)
    filtered, max_len = length_filter(
        corpus, args.coverage, args.level, table, args.tgt_level
    )
    write_corpus(filtered, args.out)
    print(
        f"max_len {max_len}: kept {len(filtered)} of {len(corpus)} pairs "
        f"({filtered.n_dropped} dropped)"
    )
    return 0


def cmd_transform(args) -> int:
    sentences = _read_token_lines(args.input)
    table = None
    if args.level in ("ideograph_bpe", "stroke_bpe"):
        table = _load_table_arg(args.table)
    streams = transform(sentences, args.level, table)
    write_stream_file(args.out, streams)
    print(f"{len(streams)} streams written to {args.out}")
    return 0


def cmd_bpe_train(args) -> int:
    corpus = read_stream_file(args.input)
    if args.shared_with:
        corpus = corpus + read_stream_file(args.shared_with)
    model = bpe.train(corpus, args.vocab_size)
    model.save(args.out)
    print(f"{len(model.rules)} merges learned, model written to {args.out}")
    return 0


def cmd_bpe_apply(args) -> int:
    model = bpe.BpeModel.load(args.model)
    streams = [bpe.apply(model, s) for s in read_stream_file(args.input)]
    write_stream_file(args.out, streams)
    print(f"{len(streams)} streams written to {args.out}")
    return 0


def cmd_train(args) -> int:
    translator = Seq2SeqTranslator(
        d_emb=args.d_emb,
        d_hidden=args.d_hidden,
        n_layers=args.n_layers,
        shared_embeddings=args.shared_embeddings,
        max_vocab=args.max_vocab or None,
        steps=args.steps,
        batch_size=args.batch_size,
        learning_rate=args.learning_rate,
        dropout=args.dropout,
        seed=args.seed,
    )
    translator.fit(_read_token_lines(args.src), _read_token_lines(args.tgt))
    translator.save(args.out)
    print(
        f"{args.steps} steps done, final loss {translator.loss_curve_[-1]:.4f}, "
        f"checkpoint written to {args.out}"
    )
    return 0


def cmd_translate(args) -> int:
    model, _meta = load_checkpoint(args.checkpoint)
    ck = Path(args.checkpoint)
    src_vocab = Vocab.load(ck.with_suffix(".src.vocab"))
    tgt_vocab = Vocab.load(ck.with_suffix(".tgt.vocab"))
    encoded = [src_vocab.encode(s) for s in _read_token_lines(args.input)]
    outputs = translate_corpus(model, encoded, beam_size=args.beam_size)
    _write_token_lines(args.out, [tgt_vocab.decode(ids) for ids in outputs])
    print(f"{len(outputs)} sentences written to {args.out}")
    return 0


def cmd_decode(args) -> int:
    streams = read_stream_file(args.input)
    if args.bpe_model:
        model = bpe.BpeModel.load(args.bpe_model)
        streams = [bpe.desegment(s, model) for s in streams]
    elif args.desegment:
        streams = [bpe.desegment(s) for s in streams]
    table = None
    if args.level in ("ideograph_bpe", "stroke_bpe"):
        table = _load_table_arg(args.table)
    sentences = detransform(streams, args.level, table, lenient=args.lenient)
    _write_token_lines(args.out, sentences)
    print(f"{len(sentences)} sentences written to {args.out}")
    return 0


def cmd_bleu(args) -> int:
    result = bleu(
        _read_token_lines(args.hyp),
        _read_token_lines(args.ref),
        max_n=args.max_n,
        smoothing=args.smooth,
    )
    precisions = " ".join(f"{p:.4f}" for p in result.precisions)
    print(f"BLEU = {result.score:.2f}")
    print(
        f"precisions {precisions}  BP {result.brevity_penalty:.4f}  "
        f"lengths {result.hyp_length}/{result.ref_length}"
    )
    if args.csv:
        rows = ["metric,value", f"bleu,{result.score:.4f}"]
        rows += [
            f"p{n},{p:.6f}" for n, p in enumerate(result.precisions, start=1)
        ]
        rows.append(f"brevity_penalty,{result.brevity_penalty:.6f}")
        Path(args.csv).write_text("\n".join(rows) + "\n", encoding="utf-8")
    return 0


def cmd_signif(args) -> int:
    result = bootstrap_significance(
        _read_token_lines(args.hyp_a),
        _read_token_lines(args.hyp_b),
        _read_token_lines(args.ref),
        samples=args.samples,
        alpha=args.alpha,
        seed=args.seed,
    )
    verdict = "significant" if result.significant else "not significant"
    print(
        f"BLEU A {result.bleu_a:.2f} vs B {result.bleu_b:.2f}: "
        f"p = {result.p_value:.6f} ({verdict} at alpha = {args.alpha})"
    )
    return 0


def cmd_stats(args) -> int:
    sentences = _read_token_lines(args.input)
    report = stats_report(sentences, _load_table_arg(args.table))
    print(report.to_text(), end="")
    if args.csv:
        Path(args.csv).write_text(report.to_csv(), encoding="utf-8")
    return 0


def cmd_run(args) -> int:
    config = ExperimentConfig.from_file(args.config)
    run_experiment(config)
    out = Path(config.out_dir)
    print((out / "report.txt").read_text(encoding="utf-8"), end="")
    print(f"manifest written to {out / 'manifest.json'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="logomt",
        description="sub-character machine translation experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="read a parallel corpus into clean TSV")
    p.add_argument("--src", help="source text file (two-file mode)")
    p.add_argument("--tgt", help="target text file (two-file mode)")
    p.add_argument("--tsv", help="tab-separated parallel file")
    p.add_argument("--out", required=True, help="output TSV path")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("split", help="seeded train/dev/test split")
    p.add_argument("--corpus", required=True, help="parallel TSV")
    p.add_argument("--dev-n", type=int, default=1000)
    p.add_argument("--test-n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("filter", help="drop overlong pairs by coverage quantile")
    p.add_argument("--corpus", required=True, help="parallel TSV")
    p.add_argument("--coverage", type=float, default=0.90)
    p.add_argument("--level", default="word")
    p.add_argument("--tgt-level", default=None, help="defaults to --level")
    p.add_argument("--table", help="decomposition table (default: bundled)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("transform", help="re-express text at a granularity level")
    p.add_argument("--input", required=True, help="tokenized text file")
    p.add_argument("--level", required=True)
    p.add_argument("--table", help="decomposition table (default: bundled)")
    p.add_argument("--out", required=True, help="unit stream file")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("bpe-train", help="learn merge rules from unit streams")
    p.add_argument("--input", required=True, help="unit stream file")
    p.add_argument("--shared-with", help="second stream file for a shared model")
    p.add_argument("--vocab-size", type=int, required=True)
    p.add_argument("--out", required=True, help="model file")
    p.set_defaults(func=cmd_bpe_train)

    p = sub.add_parser("bpe-apply", help="segment streams with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True, help="unit stream file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bpe_apply)

    p = sub.add_parser("train", help="train the translation model")
    p.add_argument("--src", required=True, help="source token file")
    p.add_argument("--tgt", required=True, help="target token file")
    p.add_argument("--d-emb", type=int, default=32)
    p.add_argument("--d-hidden", type=int, default=64)
    p.add_argument("--n-layers", type=int, default=1)
    p.add_argument("--shared-embeddings", action="store_true")
    p.add_argument("--max-vocab", type=int, default=0, help="0 = no cap")
    p.add_argument("--steps", type=int, default=3000)
    p.add_argument("--batch-size", type=int, default=8)
    p.add_argument("--learning-rate", type=float, default=0.5)
    p.add_argument("--dropout", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="checkpoint path (.npz)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("translate", help="decode a token file with a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--input", required=True, help="source token file")
    p.add_argument("--beam-size", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("decode", help="invert streams back to tokenized text")
    p.add_argument("--input", required=True, help="unit stream file")
    p.add_argument("--level", required=True)
    p.add_argument("--table", help="decomposition table (default: bundled)")
    p.add_argument("--bpe-model", help="undo this model's merges first")
    p.add_argument(
        "--desegment",
        action="store_true",
        help="undo merges without a model, splitting labels at unit boundaries",
    )
    p.add_argument(
        "--lenient",
        action="store_true",
        help="substitute the replacement character instead of failing",
    )
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("bleu", help="corpus BLEU of hypothesis vs reference")
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--max-n", type=int, default=4)
    p.add_argument("--smooth", action="store_true")
    p.add_argument("--csv", help="also write metrics as CSV here")
    p.set_defaults(func=cmd_bleu)

    p = sub.add_parser("signif", help="paired bootstrap significance test")
    p.add_argument("--hyp-a", required=True)
    p.add_argument("--hyp-b", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_signif)

    p = sub.add_parser("stats", help="granularity comparison for one corpus side")
    p.add_argument("--input", required=True, help="tokenized text file")
    p.add_argument("--table", help="decomposition table (default: bundled)")
    p.add_argument("--csv", help="also write the report as CSV here")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("run", help="full experiment from a config file")
    p.add_argument("--config", required=True, help="key=value config file")
    p.set_defaults(func=cmd_run)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, PipelineError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
