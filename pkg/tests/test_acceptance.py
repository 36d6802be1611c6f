"""Acceptance gate for the whole toolkit.

Every test prints one PASS/FAIL line with the measured values and the
pinned tolerance, so a bare `pytest tests/test_acceptance.py` run reads
as a checklist. Tolerances live in the assertions, not in config.
"""

import json
import time
from collections import Counter

import numpy as np
import pytest

from logomt.bpe import BpeModel, apply as bpe_apply, desegment, train as bpe_train
from logomt.cli import main as cli_main
from logomt.data import sample_corpus_paths, sample_table_path
from logomt.decomposition import coverage_stats, decode_text, encode_text, load_table
from logomt.metrics import bleu, bootstrap_significance
from logomt.nmt.model import Dims, forward, grad_check, init_model
from logomt.pipeline import ExperimentConfig, run_experiment
from logomt.units import UnitStream


def _verdict(capsys, num, name, ok, detail):
    with capsys.disabled():
        print(f"\n[acceptance {num:02d}] {'PASS' if ok else 'FAIL'} {name}: {detail}")


# ---------------------------------------------------------------- helpers


def random_mixed_sentences(table, n, seed):
    """Sentences over table characters with passthrough symbols mixed in."""
    chars = sorted(table.entries)
    passthrough = list("かきくけこさしすせそABCdef012①②、。!？▁ｱｲｳ")
    rng = np.random.default_rng(seed)
    sentences = []
    for _ in range(n):
        words = []
        for _ in range(int(rng.integers(1, 9))):
            length = int(rng.integers(1, 6))
            words.append(
                "".join(
                    chars[int(rng.integers(0, len(chars)))]
                    if rng.random() < 0.7
                    else passthrough[int(rng.integers(0, len(passthrough)))]
                    for _ in range(length)
                )
            )
        sentences.append(words)
    return sentences


def oracle_bpe_rules(raw_words, target_vocab):
    """Reference trainer: full recount each round, no dedup, no caching."""
    words = [list(w) for w in raw_words]
    vocab = {s for w in words for s in w}
    rules = []
    while len(vocab) < target_vocab:
        counts = Counter()
        for w in words:
            for pair in zip(w, w[1:]):
                counts[pair] += 1
        if not counts or max(counts.values()) < 2:
            break
        top = max(counts.values())
        pair = min(p for p, c in counts.items() if c == top)
        label = pair[0] + pair[1]
        assert label not in vocab, "oracle hit a label collision"
        rules.append(pair)
        vocab.add(label)
        for w_i, w in enumerate(words):
            out, i = [], 0
            while i < len(w):
                if i + 1 < len(w) and (w[i], w[i + 1]) == pair:
                    out.append(label)
                    i += 2
                else:
                    out.append(w[i])
                    i += 1
            words[w_i] = out
    return rules


def random_letter_corpus(seed):
    rng = np.random.default_rng(seed)
    n_letters = int(rng.integers(3, 13))
    letters = [chr(ord("a") + i) for i in range(n_letters)]
    words = []
    for _ in range(int(rng.integers(30, 201))):
        length = int(rng.integers(1, 9))
        words.append(tuple(letters[k] for k in rng.integers(0, n_letters, size=length)))
    merges = int(rng.integers(5, 51))
    streams = [UnitStream(words=list(words[i : i + 10])) for i in range(0, len(words), 10)]
    base = {s for w in words for s in w}
    return streams, words, len(base) + merges


SHARED_RADICALS = list("木水火土金日月山口田心手目石竹米虫马")
STROKE_POOL = list("㇐㇑㇒㇔㇏㇆")


def build_shared_radical_assets(root, n_pairs=2000, seed=0):
    """Synthetic two-radical character inventory plus a parallel corpus.

    Every character is a radical pair; the translation maps characters
    through a fixed radical permutation, so the task factors through the
    sub-character structure while staying a plain character bijection.
    """
    rng = np.random.default_rng(seed)
    n_r = len(SHARED_RADICALS)
    chars = [chr(0x4E00 + i) for i in range(n_r * n_r)]
    perm = rng.permutation(n_r)

    lines = ["# synthetic shared-radical table"]
    for i, ch in enumerate(chars):
        a, b = divmod(i, n_r)
        strokes = " ".join(
            [
                STROKE_POOL[a % 6],
                STROKE_POOL[(a // 6) % 6],
                STROKE_POOL[b % 6],
                STROKE_POOL[(b // 6) % 6],
            ]
        )
        lines.append(f"{ch}\t{SHARED_RADICALS[a]} {SHARED_RADICALS[b]}\t{strokes}")
    (root / "table.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    def translate_char(ch):
        a, b = divmod(ord(ch) - 0x4E00, n_r)
        return chr(0x4E00 + perm[a] * n_r + perm[b])

    # skewed frequencies so the character tail is sparse while every
    # radical stays densely observed
    probs = 1.0 / (np.arange(len(chars)) + 5)
    probs /= probs.sum()
    order = rng.permutation(len(chars))

    src_lines, tgt_lines = [], []
    for _ in range(n_pairs):
        picks = rng.choice(len(chars), size=int(rng.integers(4, 8)), p=probs)
        src = [chars[order[k]] for k in picks]
        src_lines.append(" ".join(src))
        tgt_lines.append(" ".join(translate_char(c) for c in src))
    (root / "syn.src").write_text("\n".join(src_lines) + "\n", encoding="utf-8")
    (root / "syn.tgt").write_text("\n".join(tgt_lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------- criteria


def test_round_trip_bijectivity_at_scale(sample_table, capsys):
    sentences = random_mixed_sentences(sample_table, 10_000, seed=0)
    started = time.perf_counter()
    failures = 0
    for level in ("ideograph", "stroke"):
        for s in sentences:
            if decode_text(sample_table, encode_text(sample_table, s, level), level) != s:
                failures += 1
    elapsed = time.perf_counter() - started
    ok = failures == 0 and elapsed < 10.0
    _verdict(
        capsys,
        1,
        "round-trip bijectivity",
        ok,
        f"{failures}/10000 failures at ideograph and stroke levels, "
        f"{elapsed:.2f}s (tolerance: 0 failures, < 10 s)",
    )
    assert failures == 0
    assert elapsed < 10.0


def test_shipped_decompositions_match_reference_pairs(sample_table, capsys):
    expected = {
        "驰": ("马", "也"),
        "池": ("水", "也"),
        "施": ("方", "也"),
        "弛": ("弓", "也"),
        "地": ("土", "也"),
        "驱": ("马", "区"),
    }
    mismatches = {
        ch: sample_table.entries[ch].sequence("ideograph")
        for ch, pair in expected.items()
        if sample_table.entries[ch].sequence("ideograph") != pair
    }
    stream = encode_text(sample_table, ["森林"], "ideograph")
    wood_units = [s for s in stream.symbols() if s == "木"]
    ok = not mismatches and len(wood_units) == 5
    _verdict(
        capsys,
        2,
        "reference decomposition pairs",
        ok,
        f"6/6 semantic+phonetic pairs exact, 森林 -> {len(wood_units)} x 木 "
        "(tolerance: exact match)",
    )
    assert mismatches == {}
    assert len(wood_units) == 5


def test_sample_corpus_vocabulary_compression(sample_table, capsys):
    src, tgt = sample_corpus_paths()
    lines = [l.split() for l in src.read_text(encoding="utf-8").splitlines()]
    lines += [l.split() for l in tgt.read_text(encoding="utf-8").splitlines()]
    stats = coverage_stats(sample_table, lines)
    n_chars = stats.distinct_characters
    n_ideo = stats.distinct_units["ideograph"]
    n_stroke = stats.distinct_units["stroke"]
    # frozen counts for the shipped corpus; recount if the data changes
    ok = (
        (n_chars, n_ideo, n_stroke) == (449, 157, 22)
        and n_ideo <= 600
        and n_stroke <= 40
        and n_chars > n_ideo > n_stroke
    )
    _verdict(
        capsys,
        3,
        "vocabulary compression",
        ok,
        f"characters {n_chars} > ideograph units {n_ideo} > stroke units "
        f"{n_stroke} (tolerance: exact 449/157/22, bounds 600 and 40)",
    )
    assert (n_chars, n_ideo, n_stroke) == (449, 157, 22)
    assert n_ideo <= 600 and n_stroke <= 40
    assert n_chars > n_ideo and n_chars > n_stroke


def test_bpe_trainer_matches_recount_oracle(capsys):
    started = time.perf_counter()
    agreements = 0
    for seed in range(24):
        streams, words, target_vocab = random_letter_corpus(seed)
        model = bpe_train(streams, target_vocab)
        got = [(r.left, r.right) for r in model.rules]
        expected = oracle_bpe_rules(words, target_vocab)
        assert got == expected, f"rule sequences diverge on corpus seed {seed}"
        agreements += 1
    elapsed = time.perf_counter() - started
    ok = agreements == 24 and elapsed < 30.0
    _verdict(
        capsys,
        4,
        "segmentation trainer vs recount oracle",
        ok,
        f"{agreements}/24 randomized corpora agree on the full rule sequence, "
        f"{elapsed:.2f}s (tolerance: 100% agreement on >= 20 corpora, < 30 s)",
    )
    assert agreements == 24
    assert elapsed < 30.0


def test_bpe_segmentation_round_trip(capsys):
    rng = np.random.default_rng(1)
    symbols = [chr(ord("a") + i) for i in range(10)] + ["木", "水", "</c0>", "</c1>"]
    failures = 0
    checked = 0
    for block in range(10):
        streams = []
        for _ in range(100):
            words = []
            for _ in range(int(rng.integers(1, 6))):
                length = int(rng.integers(1, 7))
                words.append(
                    tuple(symbols[k] for k in rng.integers(0, len(symbols), size=length))
                )
            streams.append(UnitStream(words=words))
        # model trained on a slice, applied to the whole block so unseen
        # symbol mixes go through the same path
        model = bpe_train(streams[:20], len(symbols) + 15)
        for s in streams:
            checked += 1
            if desegment(bpe_apply(model, s), model) != s:
                failures += 1
    ok = failures == 0 and checked == 1000
    _verdict(
        capsys,
        5,
        "segment/desegment round trip",
        ok,
        f"{failures}/{checked} failures over random streams "
        "(tolerance: 0 failures of 1000)",
    )
    assert checked == 1000
    assert failures == 0


def test_gradients_match_finite_differences(capsys):
    started = time.perf_counter()
    errors = {
        "1-layer d=4": grad_check(
            dims=Dims(4, 4, 1), src_len=3, tgt_len=3, normalized_attention=False, seed=1
        ),
        "2-layer d=6": grad_check(
            dims=Dims(6, 6, 2), normalized_attention=False, seed=2
        ),
        "normalized attention": grad_check(
            dims=Dims(4, 4, 1), normalized_attention=True, seed=3
        ),
    }
    elapsed = time.perf_counter() - started
    worst = max(errors.values())
    ok = worst < 1e-4 and elapsed < 60.0
    shown = ", ".join(f"{k} {v:.2e}" for k, v in errors.items())
    _verdict(
        capsys,
        6,
        "analytic gradients vs central differences",
        ok,
        f"{shown}; {elapsed:.1f}s (tolerance: max relative error < 1e-4, < 60 s)",
    )
    assert worst < 1e-4, errors
    assert elapsed < 60.0


def test_attention_rows_are_normalized(capsys):
    rng = np.random.default_rng(0)
    shapes = [(3, 5, 1, True), (4, 6, 2, True), (5, 4, 1, False), (6, 8, 2, False)]
    worst = 0.0
    passes = 0
    model = None
    for i in range(1000):
        if i % 50 == 0:
            d_emb, d_hidden, layers, normalized = shapes[(i // 50) % len(shapes)]
            model = init_model(
                Dims(d_emb, d_hidden, layers),
                11,
                9,
                normalized_attention=normalized,
                seed=i,
            )
        batch = int(rng.integers(1, 4))
        src_len = int(rng.integers(2, 7))
        tgt_len = int(rng.integers(1, 6))
        src = rng.integers(3, 11, size=(batch, src_len))
        src[:, -1] = np.where(rng.random(batch) < 0.4, 0, src[:, -1])
        tgt_in = rng.integers(3, 9, size=(batch, tgt_len))
        tgt_in[:, 0] = 1
        tgt_out = rng.integers(3, 9, size=(batch, tgt_len))
        _, att, _ = forward(model, src, tgt_in, tgt_out)
        worst = max(worst, float(np.abs(att.sum(axis=2) - 1.0).max()))
        passes += 1
    ok = passes == 1000 and worst <= 1e-6
    _verdict(
        capsys,
        7,
        "attention row normalization",
        ok,
        f"max |row sum - 1| = {worst:.2e} over {passes} forward passes "
        "(tolerance: <= 1e-6 across 1000 passes)",
    )
    assert passes == 1000
    assert worst <= 1e-6


def test_untrained_loss_near_uniform_entropy(capsys):
    vocab_size = 53
    target = float(np.log(vocab_size))
    worst_rel = 0.0
    for seed in range(10):
        model = init_model(Dims(8, 12, 1), 31, vocab_size, seed=seed)
        rng = np.random.default_rng(seed + 100)
        src = rng.integers(4, 31, size=(4, 6))
        tgt_in = rng.integers(4, vocab_size, size=(4, 7))
        tgt_in[:, 0] = 1
        tgt_out = rng.integers(4, vocab_size, size=(4, 7))
        loss, _, _ = forward(model, src, tgt_in, tgt_out)
        worst_rel = max(worst_rel, abs(loss - target) / target)
    ok = worst_rel <= 0.10
    _verdict(
        capsys,
        8,
        "untrained cross-entropy near ln|vocab|",
        ok,
        f"max deviation {worst_rel:.1%} from ln({vocab_size}) = {target:.3f} "
        "over 10 seeds (tolerance: within 10%)",
    )
    assert worst_rel <= 0.10


def test_pipeline_overfits_toy_corpus(tmp_path, capsys):
    words = ["森林", "马路", "大门", "白天", "出口", "点心", "地图", "水田"]
    rng = np.random.default_rng(7)
    src_lines, tgt_lines = [], []
    for _ in range(50):
        picks = [words[k] for k in rng.integers(0, len(words), size=int(rng.integers(4, 7)))]
        src_lines.append(" ".join(picks))
        tgt_lines.append(" ".join(reversed(picks)))
    (tmp_path / "toy.src").write_text("\n".join(src_lines) + "\n", encoding="utf-8")
    (tmp_path / "toy.tgt").write_text("\n".join(tgt_lines) + "\n", encoding="utf-8")
    config_lines = [
        f"src = {tmp_path / 'toy.src'}",
        f"tgt = {tmp_path / 'toy.tgt'}",
        "src_level = ideograph_bpe",
        "tgt_level = ideograph_bpe",
        "bpe_vocab = 250",
        "dev_n = 0",
        "test_n = 0",
        "d_emb = 32",
        "d_hidden = 64",
        "n_layers = 1",
        "steps = 3000",
        "batch_size = 8",
        "learning_rate = 0.5",
        "eval_train = true",
        f"out_dir = {tmp_path / 'run'}",
        "seed = 0",
    ]
    (tmp_path / "toy.cfg").write_text("\n".join(config_lines) + "\n", encoding="utf-8")

    started = time.perf_counter()
    code = cli_main(["run", "--config", str(tmp_path / "toy.cfg")])
    elapsed = time.perf_counter() - started
    manifest = json.loads((tmp_path / "run" / "manifest.json").read_text(encoding="utf-8"))
    accuracy = manifest["results"]["token_accuracy_train"]
    train_bleu = manifest["results"]["bleu_train"]
    ok = code == 0 and accuracy >= 0.99 and train_bleu > 90 and elapsed < 600
    _verdict(
        capsys,
        9,
        "full-pipeline overfit on 50 pairs",
        ok,
        f"token accuracy {accuracy:.4f}, training-set BLEU {train_bleu:.2f}, "
        f"{elapsed:.0f}s within a 3000-step budget "
        "(tolerance: accuracy >= 0.99, BLEU > 90, < 600 s)",
    )
    assert code == 0
    assert accuracy >= 0.99
    assert train_bleu > 90
    assert elapsed < 600


def test_subcharacter_bpe_at_least_matches_char_level(tmp_path, capsys):
    build_shared_radical_assets(tmp_path, n_pairs=2000, seed=0)
    shared = dict(
        src=str(tmp_path / "syn.src"),
        tgt=str(tmp_path / "syn.tgt"),
        table=str(tmp_path / "table.tsv"),
        bpe_vocab=120,
        dev_n=200,
        test_n=200,
        d_emb=32,
        d_hidden=64,
        n_layers=1,
        steps=3000,
        batch_size=16,
        learning_rate=2.0,
        seed=0,
    )
    scores = {}
    for level in ("char", "ideograph_bpe"):
        config = ExperimentConfig(
            src_level=level,
            tgt_level=level,
            out_dir=str(tmp_path / level),
            **shared,
        )
        scores[level] = run_experiment(config)["results"]["bleu_test"]
    ok = scores["ideograph_bpe"] >= scores["char"]
    _verdict(
        capsys,
        10,
        "granularity ordering on a shared-radical corpus",
        ok,
        f"test BLEU ideograph+BPE {scores['ideograph_bpe']:.2f} vs char "
        f"{scores['char']:.2f} under identical budgets "
        "(tolerance: directional, sub-character >= char)",
    )
    assert scores["ideograph_bpe"] >= scores["char"]


def test_bleu_reference_cases(capsys):
    refs = [[f"tok{i}", f"tok{i+1}", f"tok{i+2}", f"tok{i+3}", "end"] for i in range(25)]
    identity = bleu(refs, refs).score

    clip = bleu([["the", "the", "the"]], [["the", "cat"]])
    p1 = clip.precisions[0]

    perm = np.random.default_rng(3).permutation(len(refs))
    hyps = [r[:-1] + ["x"] if i % 4 == 0 else list(r) for i, r in enumerate(refs)]
    direct = bleu(hyps, refs).score
    shuffled = bleu([hyps[i] for i in perm], [refs[i] for i in perm]).score

    ok = identity == 100.0 and p1 == 1 / 3 and clip.score == 0.0 and direct == shuffled
    _verdict(
        capsys,
        11,
        "corpus BLEU reference cases",
        ok,
        f"identity {identity}, clipped p1 {p1:.4f} with score {clip.score}, "
        f"permuted {shuffled:.4f} == direct {direct:.4f} "
        "(tolerance: 100.0 exact, p1 = 1/3 with score 0, exact invariance)",
    )
    assert identity == 100.0
    assert p1 == 1 / 3
    assert clip.score == 0.0
    assert direct == shuffled


def test_bootstrap_significance_calibration(capsys):
    refs = [[f"w{i}", f"w{i+1}", f"w{i+2}", f"w{i+3}", f"w{i+4}"] for i in range(30)]
    noisy = [r[:-1] + ["x"] if i % 3 == 0 else list(r) for i, r in enumerate(refs)]

    false_alarms = 0
    for seed in range(20):
        result = bootstrap_significance(
            noisy, noisy, refs, samples=1000, alpha=0.0001, seed=seed
        )
        false_alarms += int(result.significant)

    garbage = [list(reversed(r)) for r in refs]
    separation = bootstrap_significance(
        refs, garbage, refs, samples=1000, alpha=0.001, seed=0
    )
    ok = false_alarms == 0 and separation.significant
    _verdict(
        capsys,
        12,
        "paired bootstrap calibration",
        ok,
        f"identical systems flagged {false_alarms}/20 runs at alpha=0.0001; "
        f"constructed separation p = {separation.p_value:.6f} flagged at "
        "alpha=0.001 (tolerance: 0 false alarms, separation significant)",
    )
    assert false_alarms == 0
    assert separation.significant
