"""Command line surface, driven in process through main()."""

import pytest

from logomt.cli import main


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


@pytest.fixture()
def toy_tsv(tmp_path):
    lines = [
        "森林 地图\t地图 森林",
        "马路 大门\t大门 马路",
        "白天 出口\t出口 白天",
        "点心 森林\t森林 点心",
        "地图 马路\t马路 地图",
        "大门 白天\t白天 大门",
    ]
    return write(tmp_path / "toy.tsv", "\n".join(lines) + "\n")


class TestIngestSplitFilter:
    def test_ingest_two_files(self, tmp_path, capsys):
        src = write(tmp_path / "a.src", "x y\nz\n")
        tgt = write(tmp_path / "a.tgt", "X\nZ Z\n")
        out = tmp_path / "a.tsv"
        assert main(["ingest", "--src", src, "--tgt", tgt, "--out", str(out)]) == 0
        assert "2 pairs written" in capsys.readouterr().out
        assert out.read_text(encoding="utf-8") == "x y\tX\nz\tZ Z\n"

    def test_ingest_mismatch_fails(self, tmp_path, capsys):
        src = write(tmp_path / "a.src", "x\ny\n")
        tgt = write(tmp_path / "a.tgt", "X\n")
        code = main(
            ["ingest", "--src", src, "--tgt", tgt, "--out", str(tmp_path / "o")]
        )
        assert code == 1
        assert capsys.readouterr().err.startswith("error:")

    def test_split(self, toy_tsv, tmp_path, capsys):
        out_dir = tmp_path / "parts"
        code = main(
            [
                "split",
                "--corpus",
                toy_tsv,
                "--dev-n",
                "1",
                "--test-n",
                "1",
                "--out-dir",
                str(out_dir),
            ]
        )
        assert code == 0
        assert "train: 4 pairs" in capsys.readouterr().out
        for name in ("train", "dev", "test"):
            assert (out_dir / f"{name}.tsv").exists()

    def test_filter(self, tmp_path, capsys):
        rows = "\n".join(
            " ".join(["w"] * i) + "\t" + " ".join(["v"] * i) for i in range(1, 11)
        )
        corpus = write(tmp_path / "c.tsv", rows + "\n")
        out = tmp_path / "kept.tsv"
        code = main(
            ["filter", "--corpus", corpus, "--coverage", "0.9", "--out", str(out)]
        )
        assert code == 0
        assert "max_len 9" in capsys.readouterr().out
        assert len(out.read_text(encoding="utf-8").splitlines()) == 9


class TestTransformRoundTrip:
    def test_transform_bpe_decode_restores_text(self, tmp_path, capsys):
        text = write(tmp_path / "in.txt", "森林 马路\n大门 白天 森林\n")
        units = tmp_path / "units.txt"
        assert (
            main(
                [
                    "transform",
                    "--input",
                    text,
                    "--level",
                    "ideograph_bpe",
                    "--out",
                    str(units),
                ]
            )
            == 0
        )
        model = tmp_path / "m.bpe"
        assert (
            main(
                [
                    "bpe-train",
                    "--input",
                    str(units),
                    "--vocab-size",
                    "40",
                    "--out",
                    str(model),
                ]
            )
            == 0
        )
        assert "merges learned" in capsys.readouterr().out
        seg = tmp_path / "seg.txt"
        assert (
            main(
                [
                    "bpe-apply",
                    "--model",
                    str(model),
                    "--input",
                    str(units),
                    "--out",
                    str(seg),
                ]
            )
            == 0
        )
        back = tmp_path / "back.txt"
        assert (
            main(
                [
                    "decode",
                    "--input",
                    str(seg),
                    "--level",
                    "ideograph_bpe",
                    "--bpe-model",
                    str(model),
                    "--out",
                    str(back),
                ]
            )
            == 0
        )
        assert back.read_text(encoding="utf-8") == "森林 马路\n大门 白天 森林\n"

    def test_decode_strict_failure_and_lenient_rescue(self, tmp_path, capsys):
        # a bare marker with no units in front of it cannot be inverted
        broken = write(tmp_path / "broken.txt", "</c0>\n")
        args = [
            "decode",
            "--input",
            str(broken),
            "--level",
            "ideograph_bpe",
            "--out",
            str(tmp_path / "out.txt"),
        ]
        assert main(args) == 1
        assert "error:" in capsys.readouterr().err
        assert main(args + ["--lenient"]) == 0
        out = (tmp_path / "out.txt").read_text(encoding="utf-8")
        assert "\N{REPLACEMENT CHARACTER}" in out

    def test_shared_bpe_model(self, tmp_path):
        a = write(tmp_path / "a.txt", "森林 马路\n")
        b = write(tmp_path / "b.txt", "大门 白天\n")
        ua, ub = tmp_path / "ua.txt", tmp_path / "ub.txt"
        for src, dst in ((a, ua), (b, ub)):
            main(["transform", "--input", src, "--level", "char", "--out", str(dst)])
        model = tmp_path / "shared.bpe"
        code = main(
            [
                "bpe-train",
                "--input",
                str(ua),
                "--shared-with",
                str(ub),
                "--vocab-size",
                "12",
                "--out",
                str(model),
            ]
        )
        assert code == 0
        assert model.exists()


class TestTrainTranslateScore:
    def test_full_loop(self, tmp_path, capsys):
        # every line needs at least 4 tokens or the 4-gram totals are empty
        lines = ["a b c d", "b a d c", "a a b b c", "b b a a d", "c d a b", "d c b a"]
        src = write(tmp_path / "s.txt", "\n".join(lines) + "\n")
        tgt = write(tmp_path / "t.txt", "\n".join(lines).upper() + "\n")
        ck = tmp_path / "model.npz"
        code = main(
            [
                "train",
                "--src",
                src,
                "--tgt",
                tgt,
                "--d-emb",
                "8",
                "--d-hidden",
                "24",
                "--steps",
                "1200",
                "--batch-size",
                "6",
                "--learning-rate",
                "1.0",
                "--out",
                str(ck),
            ]
        )
        assert code == 0
        assert "1200 steps done" in capsys.readouterr().out
        assert ck.exists() and ck.with_suffix(".src.vocab").exists()

        hyp = tmp_path / "hyp.txt"
        code = main(
            ["translate", "--checkpoint", str(ck), "--input", src, "--out", str(hyp)]
        )
        assert code == 0
        assert hyp.read_text(encoding="utf-8") == "\n".join(lines).upper() + "\n"

        csv = tmp_path / "m.csv"
        code = main(["bleu", "--hyp", str(hyp), "--ref", tgt, "--csv", str(csv)])
        assert code == 0
        assert "BLEU = 100.00" in capsys.readouterr().out
        assert csv.read_text(encoding="utf-8").splitlines()[1] == "bleu,100.0000"

    def test_signif_identical_systems(self, tmp_path, capsys):
        lines = "\n".join(f"tok{i} tok{i + 1} tok{i + 2} tok{i + 3}" for i in range(12))
        hyp = write(tmp_path / "h.txt", lines + "\n")
        ref = write(tmp_path / "r.txt", lines + "\n")
        code = main(
            [
                "signif",
                "--hyp-a",
                hyp,
                "--hyp-b",
                hyp,
                "--ref",
                ref,
                "--samples",
                "50",
                "--alpha",
                "0.0001",
            ]
        )
        assert code == 0
        assert "not significant" in capsys.readouterr().out


class TestStatsAndRun:
    def test_stats(self, tmp_path, capsys):
        text = write(tmp_path / "in.txt", "森林 马路\n大门 白天\n")
        csv = tmp_path / "stats.csv"
        assert main(["stats", "--input", text, "--csv", str(csv)]) == 0
        out = capsys.readouterr().out
        assert "ideograph" in out and "stroke" in out
        assert csv.read_text(encoding="utf-8").startswith("level,vocab")

    def test_run_from_config(self, toy_tsv, tmp_path, capsys):
        out_dir = tmp_path / "exp"
        cfg = write(
            tmp_path / "exp.cfg",
            "\n".join(
                [
                    f"tsv = {toy_tsv}",
                    "src_level = char",
                    "tgt_level = char",
                    "dev_n = 1",
                    "test_n = 1",
                    "d_emb = 8",
                    "d_hidden = 12",
                    "n_layers = 1",
                    "steps = 10",
                    "batch_size = 4",
                    f"out_dir = {out_dir}",
                ]
            )
            + "\n",
        )
        assert main(["run", "--config", cfg]) == 0
        out = capsys.readouterr().out
        assert "manifest written to" in out
        assert "bleu_test" in out
        assert (out_dir / "manifest.json").exists()

    def test_run_bad_config_fails_cleanly(self, tmp_path, capsys):
        cfg = write(tmp_path / "bad.cfg", "src = only_one_side.txt\n")
        assert main(["run", "--config", cfg]) == 1
        assert "error:" in capsys.readouterr().err

    def test_unknown_subcommand_exits_two(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2
