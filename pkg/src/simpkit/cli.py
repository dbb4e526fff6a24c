"""Command-line front end.

Every subcommand is a thin wrapper over the library: parse arguments,
load inputs, call one function, write one artifact. Exit codes are
stable so shell scripts can branch on failure class:

* 0 -- success
* 2 -- configuration problem (bad flag, bad config key, bad value)
* 3 -- data problem (missing or malformed input file)
* 4 -- numerical failure (non-finite loss, singular system)
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .candidates import (
    Candidate,
    ClusterConfig,
    normalize_and_rerank,
    score_candidates,
    select_representatives,
    write_scored_jsonl,
)
from .complexity import (
    CNNConfig,
    LinearModel,
    extract_word_features,
    fit_ridge_regression,
    fit_sentence_cnn,
)
from .config import ConfigError, VARIANTS, load_config, parse_weights
from .corpus import (
    count_by_level,
    export_lexicon,
    label_word_complexity,
    read_aligned_pairs,
    read_leveled_corpus,
)
from .decoder import (
    DecodeParams,
    diverse_beam_search,
    greedy_decode,
    read_candidates_jsonl,
    write_candidates_jsonl,
)
from .deskdata import write_desk_data
from .embeddings import embed_sentence, load_embedding_table
from .metrics import corpus_sari, corpus_stats
from .ngram_lm import KNModel, train_kn_model
from .pipeline import StageError, build_complexity_table, run_pipeline
from .toy_scorer import ToyScorer, ToyScorerConfig, build_vocabulary, train_toy_scorer, uniform_weights
from .weighted_loss import vocab_weights


def _read_sentences(path) -> list[list[str]]:
    """One whitespace-tokenized sentence per line."""
    sentences = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            toks = line.split()
            if toks:
                sentences.append(toks)
    if not sentences:
        raise ValueError(f"{path}: no sentences found")
    return sentences


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_desk_data(args) -> int:
    paths = write_desk_data(args.out, seed=args.seed, n_pairs=args.pairs)
    print(json.dumps(paths, indent=2, sort_keys=True))
    return 0


def _cmd_label_lexicon(args) -> int:
    corpus = read_leveled_corpus(args.corpus)
    counts = count_by_level(corpus)
    labels = {
        w: label_word_complexity(counts, w, stop_on_failure=not args.no_stop)
        for w in counts.vocabulary()
    }
    export_lexicon(args.out, labels)
    print(f"labeled {len(labels)} words -> {args.out}")
    return 0


def _read_lexicon(path) -> dict[str, float]:
    labels = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'word<TAB>label'")
            labels[parts[0]] = float(parts[1])
    if not labels:
        raise ValueError(f"{path}: empty lexicon")
    return labels


def _cmd_train_word(args) -> int:
    corpus = read_leveled_corpus(args.corpus)
    counts = count_by_level(corpus)
    embeddings = load_embedding_table(args.embeddings)
    labels = _read_lexicon(args.lexicon)
    words = sorted(labels)
    X = np.array([extract_word_features(w, counts, embeddings).to_vector() for w in words])
    y = np.array([labels[w] for w in words])
    model = fit_ridge_regression(X, y, ridge_lambda=args.ridge_lambda)
    model.save(args.out)
    print(f"word model on {len(words)} words -> {args.out}")
    return 0


def _cmd_train_sentence(args) -> int:
    corpus = read_leveled_corpus(args.corpus)
    embeddings = load_embedding_table(args.embeddings)
    pairs = [(sent, doc.level) for doc in corpus.documents for sent in doc.sentences]
    model = fit_sentence_cnn(pairs, embeddings, CNNConfig(epochs=args.epochs, seed=args.seed))
    model.save(args.out)
    print(f"sentence model on {len(pairs)} sentences (loss {model.final_loss:.4f}) -> {args.out}")
    return 0


def _cmd_train_lm(args) -> int:
    if (args.pairs is None) == (args.text is None):
        raise ConfigError("train-lm needs exactly one of --pairs or --text")
    if args.pairs is not None:
        sentences = [list(p.simple_tokens) for p in read_aligned_pairs(args.pairs)]
    else:
        sentences = _read_sentences(args.text)
    model = train_kn_model(sentences, order=args.order)
    model.save(args.out)
    print(f"order-{args.order} LM on {len(sentences)} sentences -> {args.out}")
    return 0


def _cmd_train_scorer(args) -> int:
    pairs = read_aligned_pairs(args.pairs)
    vocab = build_vocabulary(pairs)
    if args.loss == "weighted":
        missing = [
            flag
            for flag, val in (
                ("--word-model", args.word_model),
                ("--corpus", args.corpus),
                ("--embeddings", args.embeddings),
            )
            if val is None
        ]
        if missing:
            raise ConfigError(f"--loss weighted requires {', '.join(missing)}")
        counts = count_by_level(read_leveled_corpus(args.corpus))
        embeddings = load_embedding_table(args.embeddings)
        word_model = LinearModel.load(args.word_model)
        table = build_complexity_table(vocab, word_model, counts, embeddings)
        weights = vocab_weights(vocab, table, args.alpha)
    else:
        weights = uniform_weights(vocab)
    scorer = train_toy_scorer(
        pairs, loss_mode=args.loss, weights=weights,
        config=ToyScorerConfig(epochs=args.epochs, seed=args.seed),
    )
    scorer.save(args.out)
    print(f"{args.loss}-loss scorer on {len(pairs)} pairs (loss {scorer.final_loss:.4f}) -> {args.out}")
    return 0


def _cmd_decode(args) -> int:
    scorer = ToyScorer.load(args.scorer)
    sources = [list(p.complex_tokens) for p in read_aligned_pairs(args.pairs)]
    params = DecodeParams(
        beam_width=args.beam, delta=args.delta, max_len=args.max_len, seed=args.seed
    )
    records = []
    for src in sources:
        if args.greedy:
            hyps = [greedy_decode(scorer, src, args.max_len)]
        else:
            hyps = diverse_beam_search(scorer, src, params)
        records.append((src, hyps))
    write_candidates_jsonl(args.out, records)
    n_cands = sum(len(h) for _, h in records)
    print(f"{n_cands} candidates for {len(records)} sentences -> {args.out}")
    return 0


def _cmd_rerank(args) -> int:
    weights = parse_weights(args.weights)
    lm = KNModel.load(args.lm)
    embeddings = load_embedding_table(args.embeddings)
    from .complexity import SentenceCNN

    sent_model = SentenceCNN.load(args.sentence_model, embeddings)
    embed_fn = lambda toks: embed_sentence(embeddings, toks)
    records = []
    for src, cands in read_candidates_jsonl(args.candidates):
        pool = [
            Candidate(tokens=tuple(c["tokens"]), raw_logprob=c["logprob"], vector=embed_fn(c["tokens"]))
            for c in cands
            if c["tokens"]
        ]
        if not pool:
            raise ValueError(f"no usable candidates for source: {' '.join(src)}")
        if args.clusters:
            pool = select_representatives(pool, ClusterConfig(k=args.clusters, seed=args.seed))
        scored = score_candidates(pool, src, lm, embed_fn, sent_model)
        ranked = normalize_and_rerank(scored, weights)
        records.append((src, ranked, 0))
    write_scored_jsonl(args.out, records)
    print(f"reranked {len(records)} sentences -> {args.out}")
    return 0


def _cmd_evaluate(args) -> int:
    pairs = read_aligned_pairs(args.pairs)
    outputs = _read_sentences(args.hyp)
    if len(outputs) != len(pairs):
        raise ValueError(
            f"{args.hyp} has {len(outputs)} sentences but {args.pairs} has {len(pairs)} pairs"
        )
    sources = [list(p.complex_tokens) for p in pairs]
    references = [[list(p.simple_tokens)] for p in pairs]
    stats = corpus_stats(outputs, sources)
    metrics = {
        "sari": corpus_sari(sources, outputs, references),
        "mean_output_length": stats.avg_length,
        "fkgl": stats.fkgl,
        "ter_to_source": stats.avg_ter_vs_input,
        "insertions": stats.avg_insertions,
        "n_sentences": len(outputs),
    }
    text = json.dumps(metrics, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    print(text)
    return 0


def _cmd_pipeline(args) -> int:
    overrides = {
        "seed": args.seed,
        "decode.beam": args.beam,
        "decode.delta": args.delta,
        "cluster.k": args.clusters,
        "rerank.weights": args.weights,
        "loss.alpha": args.alpha,
        "paths.out": args.out,
        "variant": args.variant,
    }
    if args.config:
        cfg = load_config(args.config, overrides)
    else:
        raise ConfigError("pipeline requires --config")
    manifest = run_pipeline(cfg)
    print(f"pipeline {cfg.variant} finished; artifacts in {cfg.output_dir}")
    print(json.dumps(manifest.stage_seconds, indent=2))
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simpkit", description="Sentence simplification toolkit."
    )
    parser.add_argument("--version", action="version", version=f"simpkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("desk-data", help="generate the synthetic desk corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pairs", type=int, default=500)
    p.set_defaults(func=_cmd_desk_data)

    p = sub.add_parser("label-lexicon", help="label word complexity from a leveled corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--no-stop", action="store_true",
                   help="keep descending past a failed level check")
    p.set_defaults(func=_cmd_label_lexicon)

    p = sub.add_parser("train-word", help="fit the word complexity regressor")
    p.add_argument("--corpus", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--ridge-lambda", type=float, default=1.0)
    p.set_defaults(func=_cmd_train_word)

    p = sub.add_parser("train-sentence", help="fit the sentence complexity model")
    p.add_argument("--corpus", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_train_sentence)

    p = sub.add_parser("train-lm", help="train the fluency language model")
    p.add_argument("--pairs")
    p.add_argument("--text", help="plain file, one tokenized sentence per line")
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train_lm)

    p = sub.add_parser("train-scorer", help="train the sequence scorer")
    p.add_argument("--pairs", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--loss", choices=("standard", "weighted"), default="standard")
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--word-model")
    p.add_argument("--corpus")
    p.add_argument("--embeddings")
    p.add_argument("--epochs", type=int, default=60)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_train_scorer)

    p = sub.add_parser("decode", help="decode candidates for the complex side of a pair file")
    p.add_argument("--pairs", required=True)
    p.add_argument("--scorer", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--beam", type=int, default=100)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--max-len", type=int, default=24)
    p.add_argument("--greedy", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("rerank", help="cluster, score, and rerank decoded candidates")
    p.add_argument("--candidates", required=True)
    p.add_argument("--lm", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--sentence-model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--weights", default="fas")
    p.add_argument("--clusters", type=int, default=0,
                   help="representatives to keep; 0 skips clustering")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_rerank)

    p = sub.add_parser("evaluate", help="score hypotheses against a pair file")
    p.add_argument("--pairs", required=True)
    p.add_argument("--hyp", required=True, help="one tokenized sentence per line")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("pipeline", help="run the full train/decode/rerank/evaluate pipeline")
    p.add_argument("--config", required=True)
    p.add_argument("--variant", choices=sorted(VARIANTS))
    p.add_argument("--seed", type=int)
    p.add_argument("--beam", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--clusters", type=int, dest="clusters")
    p.add_argument("--weights")
    p.add_argument("--alpha", type=float)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_pipeline)

    return parser


def _exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, ConfigError):
        return 2
    if isinstance(exc, np.linalg.LinAlgError):
        return 4
    if isinstance(exc, ValueError) and "singular" in str(exc):
        return 4
    if isinstance(exc, (OSError, ValueError, KeyError)):
        return 3
    if isinstance(exc, (RuntimeError, ArithmeticError)):
        return 4
    return 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code_for(exc.original)
    except Exception as exc:  # noqa: BLE001 - single funnel to exit codes
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
