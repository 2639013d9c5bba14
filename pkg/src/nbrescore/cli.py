"""Command-line front end: gen / train / export-pairs / rescore / evaluate /
grid-search / significance.

Exit codes: 0 success, 1 usage error, 2 data or format error, 3 external
scorer failure.
"""

from __future__ import annotations

import argparse
import shlex
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import features, mlp, scorers, synth, tournament
from .embeddings import EmbeddingFormatError, load_embeddings_file, write_embeddings_text
from .features import FeatureConfig, Variant
from .nbest import CorpusFormatError, parse_corpus_file, tokenize, write_corpus_file
from .wer import corpus_wer, matched_pairs_test, oracle_select

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_SCORER = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _feature_config(variant: int, dim: int) -> FeatureConfig:
    return FeatureConfig(variant=Variant(variant), embedding_dim=dim)


def _fingerprint(config: FeatureConfig) -> str:
    return f"config{config.variant.value} dim{config.embedding_dim}"


def _load_scorer(args, table):
    if getattr(args, "model", None):
        with open(args.model, encoding="utf-8") as fh:
            params, fingerprint = mlp.load_model(fh.read())
        config = _parse_fingerprint(fingerprint)
        if getattr(args, "config", None) and config.variant.value != args.config:
            raise ValueError(
                f"model was trained with {fingerprint}, but --config {args.config} requested"
            )
        if config.variant is not Variant.CONFIG1 and table.dim != config.embedding_dim:
            raise ValueError(
                f"model fingerprint {fingerprint} does not match embedding dim {table.dim}"
            )
        return scorers.NativeScorer(params, config)
    if getattr(args, "external_cmd", None):
        return scorers.ExternalScorer(shlex.split(args.external_cmd), timeout=args.timeout)
    raise UsageError("need --model or --external-cmd")


def _parse_fingerprint(fingerprint: str) -> FeatureConfig:
    try:
        cfg_part, dim_part = fingerprint.split()
        return _feature_config(int(cfg_part.removeprefix("config")), int(dim_part.removeprefix("dim")))
    except ValueError:
        raise mlp.ModelFormatError(f"bad config fingerprint {fingerprint!r}") from None


def _write_selections(path, selections):
    with open(path, "w", encoding="utf-8") as fh:
        for utt_id, tokens in selections:
            fh.write(f"{utt_id}\t{' '.join(tokens)}\n")


def _read_selections(path) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            utt_id, _, text = line.rstrip("\n").partition("\t")
            out[utt_id] = tokenize(text)
    return out


# ---------------------------------------------------------------- subcommands


def cmd_gen(args):
    kwargs = {}
    if args.config_file:
        with open(args.config_file, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                key, _, value = line.partition("=")
                kwargs[key.strip()] = value.strip()
    flag_map = {
        "n_utts": args.n_utts, "n_topics": args.n_topics,
        "words_per_topic": args.words_per_topic, "sentence_len": args.sentence_len,
        "n_best": args.n_best, "error_rate": args.error_rate,
        "offtopic_rate": args.offtopic_rate, "score_noise_sigma": args.score_noise_sigma,
        "embedding_dim": args.dim, "seed": args.seed,
    }
    for key, value in flag_map.items():
        if value is not None:
            kwargs[key] = value
    fields = synth.SynthConfig.__dataclass_fields__
    for key in kwargs:
        if key not in fields:
            raise UsageError(f"unknown config key {key!r}")
    # values from a config file arrive as strings
    floats = ("error_rate", "offtopic_rate", "score_noise_sigma")
    typed = {
        k: (float(v) if k in floats else int(v)) if isinstance(v, str) else v
        for k, v in kwargs.items()
    }
    cfg = synth.SynthConfig(**typed)
    corpus, table = synth.generate(cfg)
    write_corpus_file(corpus, args.out_corpus)
    with open(args.out_embeddings, "w", encoding="utf-8") as fh:
        fh.write(write_embeddings_text(table))
    print(f"wrote {len(corpus)} utterances to {args.out_corpus}, "
          f"{table.vocab_size} embeddings to {args.out_embeddings}")
    return EXIT_OK


def cmd_train(args):
    corpus = parse_corpus_file(args.corpus)
    table = load_embeddings_file(args.embeddings)
    config = _feature_config(args.config, table.dim)

    total_pairs = sum(len(l) * (len(l) - 1) for l in corpus)
    samples = list(features.generate_pairs(corpus, config, table, mode="train"))
    if not samples:
        raise ValueError("no usable training pairs (all lists single-hypothesis or equal-WER)")
    excluded = total_pairs - len(samples)

    spec = mlp.MlpSpec(input_dim=config.length, hidden_dims=tuple(args.hidden))
    train_cfg = mlp.TrainConfig(
        learning_rate=args.lr, batch_size=args.batch_size, epochs=args.epochs, seed=args.seed
    )
    params, curve = mlp.train(samples, spec, train_cfg)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(mlp.save_model(params, _fingerprint(config)))
    print(f"pairs total={total_pairs} used={len(samples)} excluded_equal={excluded}")
    print(f"final train loss {curve[-1]:.6f} (initial {curve[0]:.6f})")
    return EXIT_OK


def cmd_export_pairs(args):
    corpus = parse_corpus_file(args.corpus)
    with open(args.out, "w", encoding="utf-8") as fh:
        count = features.write_text_pairs(corpus, fh, include_equal=args.include_equal)
    print(f"wrote {count} labeled pairs to {args.out}")
    return EXIT_OK


def cmd_rescore(args):
    corpus = parse_corpus_file(args.corpus)
    table = load_embeddings_file(args.embeddings)
    selections = []
    dump_lines = []

    if args.baseline:
        weights = tournament.SelectionWeights(alpha=args.alpha, beta=args.beta, lam=0.0)
        for nbest in corpus:
            k = tournament.baseline_select(nbest, weights)
            selections.append((nbest.utt_id, nbest.hypotheses[k].tokens))
    else:
        scorer = _load_scorer(args, table)
        weights = tournament.SelectionWeights(alpha=args.alpha, beta=args.beta, lam=args.lam)

        def run(nbest):
            result = tournament.tournament_scores(nbest, scorer, table)
            if weights.alpha == 0 and weights.beta == 0:
                k = tournament.select_tournament(result, nbest)
            else:
                k = tournament.combine_scores(result, nbest, weights)
            return nbest.utt_id, nbest.hypotheses[k].tokens, result

        serial = args.jobs <= 1 or isinstance(scorer, scorers.ExternalScorer)
        if serial:
            outputs = [run(nbest) for nbest in corpus]
        else:
            with ThreadPoolExecutor(max_workers=args.jobs) as pool:
                outputs = list(pool.map(run, corpus))
        for utt_id, tokens, result in outputs:
            selections.append((utt_id, tokens))
            if args.dump_scores:
                dump_lines.append(
                    utt_id + "\t" + " ".join(f"{s:.6f}" for s in result.scores)
                )
        if isinstance(scorer, scorers.ExternalScorer):
            scorer.close()

    _write_selections(args.out, selections)
    if args.dump_scores:
        with open(args.dump_scores, "w", encoding="utf-8") as fh:
            fh.write("\n".join(dump_lines) + ("\n" if dump_lines else ""))
    print(f"wrote {len(selections)} selections to {args.out}")
    return EXIT_OK


ROW_ORDER = ["Random", "Baseline", "word2vec rescoring", "external rescoring",
             "combined rescoring", "Oracle"]
SEL_ROW = {"word2vec": "word2vec rescoring", "external": "external rescoring",
           "combined": "combined rescoring"}


def _split_wers(corpus_path, sel_specs, args):
    """One column of the report: method name -> WerSummary."""
    corpus = parse_corpus_file(corpus_path)
    for nbest in corpus:
        if nbest.reference is None:
            raise ValueError(f"{nbest.utt_id}: reference required for evaluation")
    out = {}
    out["Random"] = corpus_wer(
        (l.reference, l.hypotheses[tournament.random_select(l, args.seed)].tokens) for l in corpus
    )
    weights = tournament.SelectionWeights(alpha=args.alpha, beta=args.beta)
    out["Baseline"] = corpus_wer(
        (l.reference, l.hypotheses[tournament.baseline_select(l, weights)].tokens) for l in corpus
    )
    for name, path in sel_specs:
        if name not in SEL_ROW:
            raise UsageError(f"selection name must be one of {sorted(SEL_ROW)}, got {name!r}")
        sels = _read_selections(path)
        missing = [l.utt_id for l in corpus if l.utt_id not in sels]
        if missing:
            raise ValueError(f"{path}: missing utt_id {missing[0]!r} (and {len(missing)-1} more)")
        out[SEL_ROW[name]] = corpus_wer((l.reference, sels[l.utt_id]) for l in corpus)
    out["Oracle"] = corpus_wer(
        (l.reference, l.hypotheses[oracle_select(l)].tokens) for l in corpus
    )
    return out


def cmd_evaluate(args):
    if not args.dev_corpus and not args.test_corpus:
        raise UsageError("need --dev-corpus and/or --test-corpus")
    dev = _split_wers(args.dev_corpus, args.dev_sel, args) if args.dev_corpus else {}
    test = _split_wers(args.test_corpus, args.test_sel, args) if args.test_corpus else {}

    lines = [f"{'Method':<22}{'Dev':>8}{'Test':>8}"]
    sidecar = []
    for row in ROW_ORDER:
        if row not in dev and row not in test:
            continue
        cells = []
        for split, col in (("dev", dev), ("test", test)):
            if row in col:
                cells.append(f"{100.0 * col[row].wer:8.1f}")
                sidecar.append(
                    f"method={row.replace(' ', '_')} split={split} "
                    f"errors={col[row].errors} ref_words={col[row].ref_words}"
                )
            else:
                cells.append(f"{'-':>8}")
        lines.append(f"{row:<22}{cells[0]}{cells[1]}")
    report = "\n".join(lines) + "\n"
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(report)
    else:
        sys.stdout.write(report)
    if args.sidecar:
        with open(args.sidecar, "w", encoding="utf-8") as fh:
            fh.write("\n".join(sidecar) + "\n")
    return EXIT_OK


def cmd_grid_search(args):
    corpus = parse_corpus_file(args.corpus)
    table = load_embeddings_file(args.embeddings)
    scorer = _load_scorer(args, table)
    grids = [tuple(float(x) for x in g.split(",")) for g in (args.lam_grid, args.alpha_grid, args.beta_grid)]
    weights, summary = tournament.grid_search_weights(corpus, scorer, table, *grids)
    if isinstance(scorer, scorers.ExternalScorer):
        scorer.close()
    print(f"lam={weights.lam} alpha={weights.alpha} beta={weights.beta} "
          f"dev_wer={100.0 * summary.wer:.1f} errors={summary.errors} ref_words={summary.ref_words}")
    return EXIT_OK


def _read_error_counts(path) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                utt_id, count = line.split("\t")
                out[utt_id] = float(count)
            except ValueError:
                raise CorpusFormatError(f"bad error-count line {line!r}", line_no) from None
    return out


def cmd_significance(args):
    a = _read_error_counts(args.errors_a)
    b = _read_error_counts(args.errors_b)
    if set(a) != set(b):
        raise ValueError("error-count files cover different utt_id sets")
    ids = sorted(a)
    result = matched_pairs_test([a[u] for u in ids], [b[u] for u in ids])
    flag = " (degenerate variance)" if result.degenerate_variance else ""
    print(f"z={result.z_statistic:.6f} p={result.p_value:.6g} n={result.n_segments}{flag}")
    return EXIT_OK


# -------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nbrescore", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic benchmark corpus")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--n-utts", type=int, default=None)
    p.add_argument("--n-topics", type=int, default=None)
    p.add_argument("--words-per-topic", type=int, default=None)
    p.add_argument("--sentence-len", type=int, default=None)
    p.add_argument("--n-best", type=int, default=None)
    p.add_argument("--error-rate", type=float, default=None)
    p.add_argument("--offtopic-rate", type=float, default=None)
    p.add_argument("--score-noise-sigma", type=float, default=None)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--config-file", help="key=value lines; flags override")
    p.add_argument("--out-corpus", required=True)
    p.add_argument("--out-embeddings", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("train", help="train the native pairwise comparator")
    p.add_argument("--corpus", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--config", type=int, choices=(1, 2, 3), default=1)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--hidden", type=lambda s: [int(x) for x in s.split(",")], default=[32, 16])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("export-pairs",
                       help="write token-level labeled pairs for external fine-tuning")
    p.add_argument("--corpus", required=True)
    p.add_argument("--include-equal", action="store_true",
                   help="keep equal-error pairs (written with label EQ)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_pairs)

    p = sub.add_parser("rescore", help="tournament-rescore a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--model")
    p.add_argument("--external-cmd", help="external scorer command line")
    p.add_argument("--config", type=int, choices=(1, 2, 3), default=None)
    p.add_argument("--baseline", action="store_true", help="decoder-score selection only")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--timeout", type=float, default=30.0)
    p.add_argument("--jobs", type=int, default=1,
                   help="per-utterance parallelism; >1 forfeits bit-determinism")
    p.add_argument("--dump-scores", help="optional per-utterance score dump file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rescore)

    p = sub.add_parser("evaluate", help="emit the method/WER report table")
    p.add_argument("--dev-corpus")
    p.add_argument("--test-corpus")
    p.add_argument("--dev-sel", action="append", default=[],
                   type=lambda s: tuple(s.split("=", 1)), metavar="NAME=PATH")
    p.add_argument("--test-sel", action="append", default=[],
                   type=lambda s: tuple(s.split("=", 1)), metavar="NAME=PATH")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0, help="seed for the Random row")
    p.add_argument("--report", help="write the table here instead of stdout")
    p.add_argument("--sidecar", help="machine-readable key=value output")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("grid-search", help="grid-search combination weights on a dev set")
    p.add_argument("--corpus", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--model")
    p.add_argument("--external-cmd")
    p.add_argument("--config", type=int, choices=(1, 2, 3), default=None)
    p.add_argument("--timeout", type=float, default=30.0)
    p.add_argument("--lam-grid", default="0,0.25,0.5,1,2,4")
    p.add_argument("--alpha-grid", default="0,0.25,0.5,1,2,4")
    p.add_argument("--beta-grid", default="0,0.25,0.5,1,2,4")
    p.set_defaults(func=cmd_grid_search)

    p = sub.add_parser("significance", help="matched-pairs test on two error-count files")
    p.add_argument("errors_a")
    p.add_argument("errors_b")
    p.set_defaults(func=cmd_significance)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except scorers.ScorerError as exc:
        print(f"external scorer error: {exc}", file=sys.stderr)
        return EXIT_SCORER
    except (CorpusFormatError, EmbeddingFormatError, mlp.ModelFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
