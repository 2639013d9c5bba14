import sys
from pathlib import Path

import pytest

from nbrescore.cli import main
from nbrescore.nbest import parse_corpus_file
from nbrescore.embeddings import load_embeddings_file

STUB = str(Path(__file__).parent / "stub_scorer.py")

GEN_ARGS = [
    "gen", "--seed", "9", "--n-utts", "12", "--n-topics", "3", "--words-per-topic", "10",
    "--sentence-len", "6", "--n-best", "6", "--error-rate", "0.25", "--offtopic-rate", "0.5",
    "--score-noise-sigma", "2.0", "--dim", "8",
]


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    corpus = d / "corpus.txt"
    emb = d / "emb.txt"
    assert main(GEN_ARGS + ["--out-corpus", str(corpus), "--out-embeddings", str(emb)]) == 0
    model = d / "model.txt"
    assert main([
        "train", "--corpus", str(corpus), "--embeddings", str(emb),
        "--config", "1", "--epochs", "15", "--out", str(model),
    ]) == 0
    return d


def test_gen_deterministic_bytes(tmp_path, workdir):
    c2, e2 = tmp_path / "c.txt", tmp_path / "e.txt"
    assert main(GEN_ARGS + ["--out-corpus", str(c2), "--out-embeddings", str(e2)]) == 0
    assert c2.read_bytes() == (workdir / "corpus.txt").read_bytes()
    assert e2.read_bytes() == (workdir / "emb.txt").read_bytes()


def test_gen_outputs_load_cleanly(workdir):
    corpus = parse_corpus_file(workdir / "corpus.txt")
    table = load_embeddings_file(workdir / "emb.txt")
    assert len(corpus) == 12
    assert table.dim == 8


def test_gen_config_file(tmp_path):
    cfgfile = tmp_path / "gen.cfg"
    cfgfile.write_text(
        "n_utts=3\nn_topics=2\nwords_per_topic=5\nsentence_len=4\nn_best=3\n"
        "error_rate=0.1\nofftopic_rate=0.5\nscore_noise_sigma=0.5\nembedding_dim=6\nseed=1\n"
    )
    out_c, out_e = tmp_path / "c.txt", tmp_path / "e.txt"
    assert main(["gen", "--config-file", str(cfgfile),
                 "--out-corpus", str(out_c), "--out-embeddings", str(out_e)]) == 0
    assert len(parse_corpus_file(out_c)) == 3


def test_missing_required_flag_is_usage_error():
    assert main(["gen", "--out-corpus", "/tmp/x"]) == 1


def test_unknown_subcommand_is_usage_error():
    assert main(["frobnicate"]) == 1


def test_data_error_exit_code(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("u\t1\tNaN\t0.0\ta\n")
    assert main(["train", "--corpus", str(bad), "--embeddings", str(bad),
                 "--out", str(tmp_path / "m.txt")]) == 2


def test_train_deterministic(workdir, tmp_path):
    m2 = tmp_path / "m2.txt"
    assert main([
        "train", "--corpus", str(workdir / "corpus.txt"), "--embeddings", str(workdir / "emb.txt"),
        "--config", "1", "--epochs", "15", "--out", str(m2),
    ]) == 0
    assert m2.read_bytes() == (workdir / "model.txt").read_bytes()


def test_rescore_native_and_deterministic(workdir, tmp_path):
    out1, out2 = tmp_path / "s1.txt", tmp_path / "s2.txt"
    base = ["rescore", "--corpus", str(workdir / "corpus.txt"),
            "--embeddings", str(workdir / "emb.txt"), "--model", str(workdir / "model.txt")]
    assert main(base + ["--out", str(out1)]) == 0
    assert main(base + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert len(out1.read_text().splitlines()) == 12


def test_rescore_lambda_zero_equals_baseline(workdir, tmp_path):
    combined = tmp_path / "comb.txt"
    baseline = tmp_path / "base.txt"
    common = ["--corpus", str(workdir / "corpus.txt"), "--embeddings", str(workdir / "emb.txt")]
    assert main(["rescore", *common, "--model", str(workdir / "model.txt"),
                 "--lam", "0", "--alpha", "1", "--beta", "1", "--out", str(combined)]) == 0
    assert main(["rescore", *common, "--baseline", "--alpha", "1", "--beta", "1",
                 "--out", str(baseline)]) == 0
    assert combined.read_bytes() == baseline.read_bytes()


def test_rescore_constant_external_stub_ties_to_rank_one(workdir, tmp_path):
    out = tmp_path / "s.txt"
    assert main([
        "rescore", "--corpus", str(workdir / "corpus.txt"),
        "--embeddings", str(workdir / "emb.txt"),
        "--external-cmd", f"{sys.executable} {STUB} constant 0.5",
        "--out", str(out),
    ]) == 0
    corpus = parse_corpus_file(workdir / "corpus.txt")
    rank1 = {l.utt_id: l.hypotheses[0].tokens for l in corpus}
    for line in out.read_text().splitlines():
        utt_id, _, text = line.partition("\t")
        assert tuple(text.split()) == rank1[utt_id]


def test_external_scorer_failure_exit_code(workdir, tmp_path):
    assert main([
        "rescore", "--corpus", str(workdir / "corpus.txt"),
        "--embeddings", str(workdir / "emb.txt"),
        "--external-cmd", f"{sys.executable} {STUB} exit",
        "--out", str(tmp_path / "s.txt"),
    ]) == 3


def test_evaluate_reference_selections_scores_zero(workdir, tmp_path, capsys):
    corpus = parse_corpus_file(workdir / "corpus.txt")
    sel = tmp_path / "ref_sel.txt"
    sel.write_text("".join(f"{l.utt_id}\t{' '.join(l.reference)}\n" for l in corpus))
    sidecar = tmp_path / "side.txt"
    assert main([
        "evaluate", "--dev-corpus", str(workdir / "corpus.txt"),
        "--dev-sel", f"word2vec={sel}", "--sidecar", str(sidecar),
    ]) == 0
    table = capsys.readouterr().out
    row = next(l for l in table.splitlines() if l.startswith("word2vec"))
    assert "0.0" in row
    side = sidecar.read_text()
    assert "method=word2vec_rescoring split=dev errors=0" in side


def test_evaluate_oracle_dominates(workdir, tmp_path, capsys):
    corpus = parse_corpus_file(workdir / "corpus.txt")
    sel = tmp_path / "r1.txt"
    sel.write_text("".join(f"{l.utt_id}\t{' '.join(l.hypotheses[0].tokens)}\n" for l in corpus))
    sidecar = tmp_path / "side.txt"
    assert main([
        "evaluate", "--dev-corpus", str(workdir / "corpus.txt"),
        "--dev-sel", f"word2vec={sel}", "--sidecar", str(sidecar),
    ]) == 0
    wers = {}
    for line in sidecar.read_text().splitlines():
        kv = dict(item.split("=") for item in line.split())
        wers[kv["method"]] = int(kv["errors"]) / int(kv["ref_words"])
    assert all(wers["Oracle"] <= w for w in wers.values())


def test_evaluate_missing_utt_id(workdir, tmp_path):
    sel = tmp_path / "partial.txt"
    corpus = parse_corpus_file(workdir / "corpus.txt")
    sel.write_text(f"{corpus.lists[0].utt_id}\ta b\n")
    assert main(["evaluate", "--dev-corpus", str(workdir / "corpus.txt"),
                 "--dev-sel", f"word2vec={sel}"]) == 2


def test_evaluate_table_matches_recomputed_wer(workdir, tmp_path, capsys):
    from nbrescore.wer import corpus_wer

    corpus = parse_corpus_file(workdir / "corpus.txt")
    sel = tmp_path / "r1.txt"
    sel.write_text("".join(f"{l.utt_id}\t{' '.join(l.hypotheses[0].tokens)}\n" for l in corpus))
    assert main(["evaluate", "--dev-corpus", str(workdir / "corpus.txt"),
                 "--dev-sel", f"word2vec={sel}"]) == 0
    table = capsys.readouterr().out
    row = next(l for l in table.splitlines() if l.startswith("word2vec"))
    shown = float(row.split()[-2])  # dev column; test column shows "-"
    expected = corpus_wer((l.reference, l.hypotheses[0].tokens) for l in corpus).wer
    assert shown == pytest.approx(100 * expected, abs=0.05)


def test_grid_search_cli(workdir, capsys):
    assert main([
        "grid-search", "--corpus", str(workdir / "corpus.txt"),
        "--embeddings", str(workdir / "emb.txt"), "--model", str(workdir / "model.txt"),
        "--lam-grid", "0,1", "--alpha-grid", "0,1", "--beta-grid", "0,1",
    ]) == 0
    out = capsys.readouterr().out
    assert "lam=" in out and "dev_wer=" in out


def test_significance_cli(tmp_path, capsys):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    a.write_text("".join(f"u{i}\t{e}\n" for i, e in enumerate([3, 1, 4, 1, 5])))
    b.write_text("".join(f"u{i}\t{e}\n" for i, e in enumerate([2, 1, 3, 1, 5])))
    assert main(["significance", str(a), str(b)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("z=") and " p=" in out and " n=5" in out


def test_significance_identical_files(tmp_path, capsys):
    a = tmp_path / "a.txt"
    a.write_text("u0\t2\nu1\t3\n")
    assert main(["significance", str(a), str(a)]) == 0
    out = capsys.readouterr().out
    assert "z=0.000000" in out and "p=1" in out


def test_model_fingerprint_mismatch(workdir, tmp_path):
    assert main([
        "rescore", "--corpus", str(workdir / "corpus.txt"),
        "--embeddings", str(workdir / "emb.txt"), "--model", str(workdir / "model.txt"),
        "--config", "2", "--out", str(tmp_path / "s.txt"),
    ]) == 2
