import csv
import json

import numpy as np
import pytest

from cohtm.cli import main
from cohtm.corpus import load_npmi, load_vocabulary

CORPUS = """\
apple banana apple cherry
banana cherry banana apple
durian elder durian fig
fig elder durian elder
apple cherry banana banana
durian fig elder fig
"""


@pytest.fixture
def corpus_path(tmp_path):
    path = tmp_path / "corpus.txt"
    path.write_text(CORPUS, encoding="utf-8")
    return str(path)


@pytest.fixture
def npmi_path(tmp_path, corpus_path):
    out = str(tmp_path / "cache.npmi")
    rc = main(["build-cooc", "--corpus", corpus_path, "--out", out])
    assert rc == 0
    return out


def _train(tmp_path, corpus_path, npmi_path, name, *extra):
    out = str(tmp_path / name)
    rc = main(["train", "--corpus", corpus_path, "--vocab", npmi_path + ".vocab",
               "--k", "2", "--epochs", "3", "--batch-size", "3", "--hidden", "8",
               "--out", out, *extra])
    assert rc == 0
    return out


def test_build_cooc_outputs(tmp_path, corpus_path, capsys):
    out = str(tmp_path / "cache.npmi")
    rc = main(["build-cooc", "--corpus", corpus_path, "--out", out])
    assert rc == 0
    stdout = capsys.readouterr().out
    assert "V=6" in stdout and "windows=6" in stdout
    matrix = load_npmi(out)
    assert matrix.vocab_size == 6
    vocab = load_vocabulary(out + ".vocab")
    assert len(vocab) == 6


def test_build_cooc_with_existing_vocab(tmp_path, corpus_path):
    vocab_file = tmp_path / "vocab.txt"
    vocab_file.write_text("apple\nbanana\ncherry\n", encoding="utf-8")
    out = str(tmp_path / "cache.npmi")
    rc = main(["build-cooc", "--corpus", corpus_path, "--vocab", str(vocab_file),
               "--out", out])
    assert rc == 0
    assert load_npmi(out).vocab_size == 3


def test_train_baseline_and_trace(tmp_path, corpus_path, npmi_path):
    out = _train(tmp_path, corpus_path, npmi_path, "base.ckpt")
    with open(out + ".trace.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["epoch", "elbo", "aux", "lambda_a"]
    assert len(rows) == 4
    assert [r[0] for r in rows[1:]] == ["0", "1", "2"]
    assert all(float(r[3]) == 0.0 for r in rows[1:])


def test_train_aux_trace_lambda_monotone(tmp_path, corpus_path, npmi_path):
    out = _train(tmp_path, corpus_path, npmi_path, "aux.ckpt",
                 "--aux", "wd", "--npmi", npmi_path, "--n-top", "3",
                 "--warmup", "2", "--lambda-a", "10")
    with open(out + ".trace.csv", newline="") as fh:
        rows = list(csv.reader(fh))[1:]
    lams = [float(r[3]) for r in rows]
    assert lams == [0.0, 5.0, 10.0]
    assert all(b >= a for a, b in zip(lams, lams[1:]))


def test_train_is_byte_reproducible(tmp_path, corpus_path, npmi_path):
    a = _train(tmp_path, corpus_path, npmi_path, "a.ckpt", "--seed", "7")
    b = _train(tmp_path, corpus_path, npmi_path, "b.ckpt", "--seed", "7")
    assert open(a, "rb").read() == open(b, "rb").read()


def test_train_seed_sweep(tmp_path, corpus_path, npmi_path):
    out = str(tmp_path / "sweep.ckpt")
    rc = main(["train", "--corpus", corpus_path, "--vocab", npmi_path + ".vocab",
               "--k", "2", "--epochs", "2", "--batch-size", "3", "--hidden", "8",
               "--seeds", "1,2", "--out", out])
    assert rc == 0
    assert (tmp_path / "sweep.ckpt.seed1").exists()
    assert (tmp_path / "sweep.ckpt.seed2").exists()


def test_config_file_and_flag_precedence(tmp_path, corpus_path, npmi_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "corpus = %s\nvocab = %s\nk = 2\nepochs = 5  # overridden below\n"
        "batch-size = 3\nhidden = 8\n" % (corpus_path, npmi_path + ".vocab"),
        encoding="utf-8")
    out = str(tmp_path / "cfg.ckpt")
    rc = main(["train", "--config", str(cfg), "--epochs", "2", "--out", out])
    assert rc == 0
    with open(out + ".trace.csv", newline="") as fh:
        assert len(list(csv.reader(fh))) == 3  # header + 2 epochs, flag wins


def test_config_file_rejects_unknown_key(tmp_path, corpus_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("k = 2\nbogus = 1\n", encoding="utf-8")
    rc = main(["train", "--config", str(cfg), "--corpus", corpus_path,
               "--out", str(tmp_path / "x.ckpt")])
    assert rc == 1


def test_topics_output_stable_and_normalized(tmp_path, corpus_path, npmi_path, capsys):
    ckpt = _train(tmp_path, corpus_path, npmi_path, "t.ckpt")
    capsys.readouterr()
    rc = main(["topics", "--ckpt", ckpt, "--top", "3"])
    assert rc == 0
    first = capsys.readouterr().out
    assert first.startswith("topic 0:")
    rc = main(["topics", "--ckpt", ckpt, "--top", "3",
               "--out", str(tmp_path / "topics.txt")])
    assert rc == 0
    second = capsys.readouterr().out
    assert first == second
    assert (tmp_path / "topics.txt").read_text() == second.rstrip("\n") + "\n"

    # full rows are probability distributions
    rc = main(["topics", "--ckpt", ckpt, "--top", "6"])
    assert rc == 0
    for line in capsys.readouterr().out.strip().splitlines():
        probs = [float(cell.split("(")[1].rstrip(")"))
                 for cell in line.split(": ", 1)[1].split(", ")]
        assert abs(sum(probs) - 1.0) < 1e-3  # printed at 4 decimals


def test_eval_single_report(tmp_path, corpus_path, npmi_path, capsys):
    ckpt = _train(tmp_path, corpus_path, npmi_path, "e.ckpt")
    capsys.readouterr()
    out = str(tmp_path / "report.json")
    rc = main(["eval", "--ckpt", ckpt, "--cooc", npmi_path, "--top-words", "3",
               "--out", out])
    assert rc == 0
    report = json.loads(open(out).read())
    assert report["we"] is None
    assert report["we_note"]
    assert -1.0 <= report["npmi"] <= 1.0
    assert 0.0 < report["tu"] <= 1.0
    assert 0.0 <= report["irbo"] <= 1.0
    assert report["config"] == {"k": 2, "top_words": 3, "rbo_p": 0.9}


def test_eval_with_word_vectors_and_sweep(tmp_path, corpus_path, npmi_path, capsys):
    a = _train(tmp_path, corpus_path, npmi_path, "s1.ckpt", "--seed", "1")
    b = _train(tmp_path, corpus_path, npmi_path, "s2.ckpt", "--seed", "2")
    vec = tmp_path / "vectors.txt"
    rng = np.random.default_rng(0)
    words = ["apple", "banana", "cherry", "durian", "elder", "fig"]
    vec.write_text("".join("%s %s\n" % (w, " ".join("%.4f" % x for x in rng.random(4)))
                           for w in words), encoding="utf-8")
    capsys.readouterr()
    rc = main(["eval", "--ckpt", a, "--ckpt", b, "--cooc", npmi_path,
               "--top-words", "3", "--word-vectors", str(vec)])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert len(payload["runs"]) == 2
    assert set(payload["mean"]) == {"npmi", "we", "tu", "irbo"}
    assert payload["mean"]["we"] is not None


def test_exit_codes(tmp_path, corpus_path, npmi_path, capsys):
    assert main(["train", "--corpus", corpus_path,
                 "--out", str(tmp_path / "x.ckpt")]) == 1  # missing --k
    assert main(["train", "--corpus", corpus_path, "--k", "2",
                 "--aux", "wd", "--out", str(tmp_path / "x.ckpt")]) == 1  # no --npmi
    assert main(["topics", "--ckpt", str(tmp_path / "missing.ckpt")]) == 1
    assert main(["eval", "--ckpt", str(tmp_path / "missing.ckpt"),
                 "--cooc", npmi_path]) == 1
    ckpt = _train(tmp_path, corpus_path, npmi_path, "rb.ckpt")
    capsys.readouterr()
    assert main(["eval", "--ckpt", ckpt, "--cooc", npmi_path, "--rbo-p", "1.5"]) == 1
    assert main([]) == 1  # no subcommand


def test_usage_error_on_unknown_flag(corpus_path):
    assert main(["build-cooc", "--corpus", corpus_path, "--out", "x",
                 "--bogus"]) == 1
