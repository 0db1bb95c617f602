"""Command-line pipeline: co-occurrence building, training, topic export, evaluation.

Exit codes: 0 success, 1 usage/validation error, 2 runtime or numeric failure.
"""

import argparse
import csv
import json
import sys

import numpy as np

from cohtm import auxloss, evaluation
from cohtm.corpus import (
    count_cooccurrences,
    load_corpus,
    load_corpus_with_vocab,
    load_doc_embeddings,
    load_npmi,
    load_vocabulary,
    load_word_vectors,
    npmi_matrix,
    save_npmi,
    save_vocabulary,
)
from cohtm.ntm import (
    ModelConfig,
    TrainingError,
    extract_topics,
    fit,
    load_checkpoint,
    save_checkpoint,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


TRAIN_DEFAULTS = {
    "aux": "none",
    "lambda_d": 0.7,
    "lambda_a": 100.0,
    "n_top": 20,
    "warmup": 50,
    "epochs": 100,
    "batch_size": 100,
    "lr": 0.002,
    "hidden": 100,
    "dropout": 0.2,
    "input_mode": "bow",
    "seed": 0,
}


def _build_parser():
    parser = _Parser(prog="cohtm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-cooc", help="count window co-occurrences and cache the NPMI matrix")
    p.add_argument("--corpus", required=True)
    p.add_argument("--vocab", help="existing vocabulary file; built from the corpus if omitted")
    p.add_argument("--window", type=int, default=10)
    p.add_argument("--min-df", type=int, default=1)
    p.add_argument("--max-vocab", type=int, default=2000)
    p.add_argument("--out", required=True, help="NPMI cache output path")
    p.add_argument("--vocab-out", help="where to write a newly built vocabulary "
                                       "(default: OUT + '.vocab')")

    p = sub.add_parser("train", help="train a topic model")
    p.add_argument("--config", help="key=value config file; explicit flags take precedence")
    p.add_argument("--corpus")
    p.add_argument("--vocab")
    p.add_argument("--npmi", help="NPMI cache (required when --aux is not 'none')")
    p.add_argument("--embeddings", help="document embedding file for embedding/concat modes")
    p.add_argument("--aux", choices=["none", "wc", "wd"], default=None)
    p.add_argument("--lambda-d", type=float, default=None)
    p.add_argument("--lambda-a", type=float, default=None)
    p.add_argument("--n-top", type=int, default=None, help="top-word count for the penalty masks")
    p.add_argument("--warmup", type=int, default=None, help="warm-up epochs for the aux scale")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--hidden", type=int, default=None)
    p.add_argument("--dropout", type=float, default=None)
    p.add_argument("--input-mode", choices=["bow", "embedding", "concat"], default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--seeds", help="comma-separated seed list; trains one model per seed")
    p.add_argument("--out", help="checkpoint output path (suffixed per seed with --seeds)")
    p.add_argument("--trace", help="loss trace CSV path (default: OUT + '.trace.csv')")

    p = sub.add_parser("topics", help="print the top words of each topic")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--out", help="also write the table to this file")

    p = sub.add_parser("eval", help="evaluate a checkpoint (repeat --ckpt for a seed sweep)")
    p.add_argument("--ckpt", action="append", required=True)
    p.add_argument("--cooc", required=True, help="NPMI cache from build-cooc")
    p.add_argument("--word-vectors")
    p.add_argument("--rbo-p", type=float, default=0.9)
    p.add_argument("--top-words", type=int, default=10)
    p.add_argument("--out", help="report JSON output path")

    return parser


def _read_config_file(path):
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError("config line %d: expected key=value" % lineno)
            key, val = (part.strip() for part in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in TRAIN_DEFAULTS and key not in (
                    "corpus", "vocab", "npmi", "embeddings", "k", "out", "trace", "seeds"):
                raise UsageError("config line %d: unknown key %r" % (lineno, key))
            values[key] = val
    return values


def _resolve(args, file_cfg, key, cast=None):
    cli_val = getattr(args, key, None)
    if cli_val is not None:
        return cli_val
    if key in file_cfg:
        val = file_cfg[key]
        return cast(val) if cast else val
    return TRAIN_DEFAULTS.get(key)


def cmd_build_cooc(args):
    if args.vocab:
        vocab = load_vocabulary(args.vocab)
        bow = load_corpus_with_vocab(args.corpus, vocab)
        built = False
    else:
        vocab, bow = load_corpus(args.corpus, min_df=args.min_df, max_vocab=args.max_vocab)
        built = True
    counts = count_cooccurrences(bow, window=args.window)
    matrix = npmi_matrix(counts)
    save_npmi(args.out, matrix)
    if built:
        save_vocabulary(args.vocab_out or args.out + ".vocab", vocab)
    if bow.dropped_lines:
        print("dropped %d empty documents (lines: %s)"
              % (len(bow.dropped_lines),
                 ", ".join(str(n) for n in bow.dropped_lines[:20])
                 + ("..." if len(bow.dropped_lines) > 20 else "")))
    print("V=%d |W|=%d windows=%d" % (len(vocab), bow.total_tokens, counts.window_count))
    return 0


def _train_one(args, file_cfg, seed, out_path):
    aux = _resolve(args, file_cfg, "aux")
    if args.k is None and "k" not in file_cfg:
        raise UsageError("--k is required")
    corpus_path = args.corpus or file_cfg.get("corpus")
    if corpus_path is None:
        raise UsageError("--corpus is required")
    vocab_path = args.vocab or file_cfg.get("vocab")
    npmi_path = args.npmi or file_cfg.get("npmi")
    emb_path = args.embeddings or file_cfg.get("embeddings")
    if aux != "none" and npmi_path is None:
        raise UsageError("--npmi is required when --aux is not 'none'")

    if vocab_path:
        vocab = load_vocabulary(vocab_path)
        bow = load_corpus_with_vocab(corpus_path, vocab)
    else:
        vocab, bow = load_corpus(corpus_path)

    config = ModelConfig(
        k=int(_resolve(args, file_cfg, "k", int)),
        vocab_size=len(vocab),
        hidden=_resolve(args, file_cfg, "hidden", int),
        input_mode=_resolve(args, file_cfg, "input_mode"),
        embed_dim=0,
        dropout_p=_resolve(args, file_cfg, "dropout", float),
        epochs=_resolve(args, file_cfg, "epochs", int),
        batch_size=_resolve(args, file_cfg, "batch_size", int),
        lr=_resolve(args, file_cfg, "lr", float),
        seed=seed,
    )
    embeddings = None
    if config.input_mode != "bow":
        if emb_path is None:
            raise UsageError("--embeddings is required for input mode %r" % config.input_mode)
        embeddings = load_doc_embeddings(emb_path, expected_docs=bow.num_docs)
        config.embed_dim = embeddings.dim

    aux_config = None
    npmi = None
    if aux != "none":
        aux_config = auxloss.AuxConfig(
            n=_resolve(args, file_cfg, "n_top", int),
            lambda_d=(0.5 if aux == "wc" else _resolve(args, file_cfg, "lambda_d", float)),
            lambda_a_max=_resolve(args, file_cfg, "lambda_a", float),
            warmup_epochs=_resolve(args, file_cfg, "warmup", int),
            mode=aux,
        )
        npmi = load_npmi(npmi_path, expected_vocab_size=len(vocab))

    ckpt = fit(bow, config, aux_config=aux_config, npmi=npmi,
               doc_embeddings=embeddings, vocab_words=vocab.words,
               log_fn=lambda rec: print(
                   "epoch %3d  elbo %.4f  aux %.4f  lambda_a %.2f"
                   % (rec["epoch"], rec["elbo"], rec["aux"], rec["lambda_a"])))
    save_checkpoint(out_path, ckpt)
    trace_path = args.trace or out_path + ".trace.csv"
    with open(trace_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "elbo", "aux", "lambda_a"])
        for rec in ckpt.trace:
            writer.writerow([rec["epoch"], repr(rec["elbo"]), repr(rec["aux"]),
                             repr(rec["lambda_a"])])
    print("saved checkpoint: %s" % out_path)
    return 0


def cmd_train(args):
    file_cfg = _read_config_file(args.config) if args.config else {}
    if args.out is None and "out" not in file_cfg:
        raise UsageError("--out is required")
    out = args.out or file_cfg.get("out")
    seeds_spec = args.seeds or file_cfg.get("seeds")
    if seeds_spec:
        seeds = [int(s) for s in str(seeds_spec).split(",") if s.strip()]
        for seed in seeds:
            _train_one(args, file_cfg, seed, "%s.seed%d" % (out, seed))
        return 0
    seed = _resolve(args, file_cfg, "seed", int)
    return _train_one(args, file_cfg, int(seed), out)


def cmd_topics(args):
    ckpt = load_checkpoint(args.ckpt)
    if ckpt.vocab_words is None:
        raise UsageError("checkpoint has no vocabulary; cannot print words")
    from cohtm.corpus.vocab import Vocabulary

    vocab = Vocabulary(ckpt.vocab_words)
    topics = extract_topics(ckpt.params, args.top, vocab=vocab)
    lines = []
    for t in range(topics.k):
        cells = ["%s (%.4f)" % (w, p) for w, p in zip(topics.words[t], topics.probs[t])]
        lines.append("topic %d: %s" % (t, ", ".join(cells)))
    text = "\n".join(lines)
    print(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return 0


def cmd_eval(args):
    if not 0.0 < args.rbo_p < 1.0:
        raise UsageError("--rbo-p must be in (0, 1)")
    vectors = load_word_vectors(args.word_vectors) if args.word_vectors else None
    reports = []
    for path in args.ckpt:
        ckpt = load_checkpoint(path)
        if ckpt.vocab_words is None:
            raise UsageError("checkpoint %s has no vocabulary" % path)
        from cohtm.corpus.vocab import Vocabulary

        vocab = Vocabulary(ckpt.vocab_words)
        matrix = load_npmi(args.cooc, expected_vocab_size=len(vocab))
        topics = extract_topics(ckpt.params, args.top_words, vocab=vocab)
        reports.append(evaluation.evaluate_all(topics, matrix, vectors=vectors,
                                               rbo_p=args.rbo_p))
    if len(reports) == 1:
        payload = reports[0].to_dict()
    else:
        def mean_of(key):
            vals = [r.to_dict()[key] for r in reports]
            return None if any(v is None for v in vals) else round(float(np.mean(vals)), 4)

        payload = {
            "runs": [r.to_dict() for r in reports],
            "mean": {key: mean_of(key) for key in ("npmi", "we", "tu", "irbo")},
        }
    text = json.dumps(payload, indent=2)
    print(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return 0


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print("usage error: %s" % exc, file=sys.stderr)
        return 1
    handlers = {
        "build-cooc": cmd_build_cooc,
        "train": cmd_train,
        "topics": cmd_topics,
        "eval": cmd_eval,
    }
    try:
        return handlers[args.command](args)
    except UsageError as exc:
        print("usage error: %s" % exc, file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except (TrainingError, FloatingPointError) as exc:
        print("runtime error: %s" % exc, file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
