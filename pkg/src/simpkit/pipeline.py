"""End-to-end simplification runs: train, decode, rerank, evaluate.

A run consumes aligned pairs, a leveled corpus, and an embedding table,
then walks a fixed stage list. Every stage appends its wall-clock time
and every emitted file its content digest to a manifest, so two runs of
the same config can be compared artifact by artifact. The manifest
itself carries timings and is therefore the one file that is *not*
expected to be byte-identical across repeated runs.
"""

from __future__ import annotations

import hashlib
import json
import platform
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .candidates import (
    Candidate,
    ClusterConfig,
    ScoredCandidate,
    avg_pairwise_edit_distance,
    candidates_from_hypotheses,
    match_length_select,
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
    predict_word_complexity,
)
from .config import PipelineConfig
from .corpus import (
    count_by_level,
    export_lexicon,
    is_content_word,
    label_word_complexity,
    read_aligned_pairs,
    read_leveled_corpus,
    split_corpus,
)
from .decoder import DecodeParams, diverse_beam_search, greedy_decode, write_candidates_jsonl
from .embeddings import embed_sentence, load_embedding_table
from .metrics import corpus_stats, format_stats_table, sari
from .ngram_lm import train_kn_model
from .toy_scorer import ToyScorerConfig, build_vocabulary, train_toy_scorer, uniform_weights
from .weighted_loss import ComplexityTable, vocab_weights


class StageError(RuntimeError):
    """A pipeline stage failed; ``stage`` names it."""

    def __init__(self, stage: str, original: BaseException):
        super().__init__(f"stage {stage!r} failed: {original}")
        self.stage = stage
        self.original = original


@dataclass
class RunManifest:
    config: dict
    versions: dict
    seeds: dict
    stage_seconds: dict = field(default_factory=dict)
    digests: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "versions": self.versions,
            "seeds": self.seeds,
            "stage_seconds": self.stage_seconds,
            "digests": self.digests,
        }

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


@contextmanager
def _stage(name: str, manifest: RunManifest):
    start = time.perf_counter()
    try:
        yield
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc
    manifest.stage_seconds[name] = time.perf_counter() - start


def _register(manifest: RunManifest, path: Path) -> None:
    manifest.digests[path.name] = file_digest(path)


def build_complexity_table(
    vocab, model: LinearModel, counts, embeddings
) -> ComplexityTable:
    """Predicted 0..4 score for every vocabulary entry.

    Only genuine content words are flagged for loss shaping; markers,
    placeholders, and function words keep weight one downstream.
    """
    scores = {}
    content = set()
    for tok in vocab:
        feats = extract_word_features(tok, counts, embeddings)
        scores[tok] = predict_word_complexity(model, feats)
        if is_content_word(tok):
            content.add(tok)
    return ComplexityTable(scores=scores, content_words=frozenset(content))


def run_pipeline(cfg: PipelineConfig) -> RunManifest:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(
        config=cfg.snapshot(),
        versions={
            "python": platform.python_version(),
            "numpy": np.__version__,
            "simpkit": __version__,
        },
        seeds={"global": cfg.seed},
    )

    with _stage("load-data", manifest):
        pairs = read_aligned_pairs(cfg.pairs_path)
        corpus = read_leveled_corpus(cfg.corpus_path)
        embeddings = load_embedding_table(cfg.embeddings_path)
        split = split_corpus(pairs, cfg.split_ratios, seed=cfg.seed)

    with _stage("label-lexicon", manifest):
        counts = count_by_level(corpus)
        labels = {w: label_word_complexity(counts, w) for w in counts.vocabulary()}
        lex_path = out / "lexicon.tsv"
        export_lexicon(lex_path, labels)
        _register(manifest, lex_path)

    with _stage("train-word-model", manifest):
        words = sorted(labels)
        X = np.array(
            [extract_word_features(w, counts, embeddings).to_vector() for w in words]
        )
        y = np.array([float(labels[w]) for w in words])
        word_model = fit_ridge_regression(X, y, ridge_lambda=1.0)
        wm_path = out / "word_model.json"
        word_model.save(wm_path)
        _register(manifest, wm_path)

    with _stage("train-sentence-model", manifest):
        sent_pairs = [
            (sent, doc.level) for doc in corpus.documents for sent in doc.sentences
        ]
        cnn = fit_sentence_cnn(
            sent_pairs, embeddings, CNNConfig(epochs=cfg.sentence_epochs, seed=cfg.seed)
        )
        cnn_path = out / "sentence_model.npz"
        cnn.save(cnn_path)
        _register(manifest, cnn_path)

    with _stage("train-lm", manifest):
        lm = train_kn_model([p.simple_tokens for p in split.train], order=cfg.lm_order)
        lm_path = out / "lm.txt"
        lm.save(lm_path)
        _register(manifest, lm_path)

    with _stage("train-scorer", manifest):
        vocab = build_vocabulary(list(split.train))
        if cfg.loss_mode == "weighted":
            table = build_complexity_table(vocab, word_model, counts, embeddings)
            weights = vocab_weights(vocab, table, cfg.alpha)
        else:
            weights = uniform_weights(vocab)
        scorer = train_toy_scorer(
            list(split.train),
            loss_mode=cfg.loss_mode,
            weights=weights,
            config=ToyScorerConfig(epochs=cfg.scorer_epochs, seed=cfg.seed),
        )
        scorer_path = out / "scorer.npz"
        scorer.save(scorer_path)
        weights_path = out / "vocab_weights.tsv"
        weights.export_tsv(weights_path)
        _register(manifest, scorer_path)
        _register(manifest, weights_path)

    with _stage("decode", manifest):
        params = DecodeParams(
            beam_width=cfg.beam_width,
            delta=cfg.effective_delta,
            max_len=cfg.max_len,
            seed=cfg.seed,
        )
        decoded = []
        for pair in split.test:
            src = list(pair.complex_tokens)
            if cfg.decode_mode == "greedy":
                hyps = [greedy_decode(scorer, src, cfg.max_len)]
            else:
                hyps = diverse_beam_search(scorer, src, params)
            decoded.append((src, hyps))
        cand_path = out / "candidates.jsonl"
        write_candidates_jsonl(cand_path, decoded)
        _register(manifest, cand_path)

    with _stage("rerank-select", manifest):
        embed_fn = lambda toks: embed_sentence(embeddings, toks)
        rw = cfg.rerank_weights
        outputs: list[list[str]] = []
        sel_saris: list[float] = []
        oracle_saris: list[float] = []
        diversities: list[float] = []
        scored_records = []
        for (src, hyps), pair in zip(decoded, split.test):
            reference = list(pair.simple_tokens)
            cands = candidates_from_hypotheses(hyps, embed_fn)
            if not cands:
                # decoder produced only an end marker; fall back to copying
                outputs.append(list(src))
                sel_saris.append(sari(src, src, [reference]).overall)
                oracle_saris.append(sel_saris[-1])
                diversities.append(0.0)
                continue
            diversities.append(
                avg_pairwise_edit_distance(cands) if len(cands) > 1 else 0.0
            )
            if cfg.clustering_enabled:
                cands = select_representatives(
                    cands, ClusterConfig(k=cfg.cluster_k, seed=cfg.seed)
                )
            if rw is None:
                ranked_cands = sorted(cands, key=lambda c: (-c.raw_logprob, c.tokens))
                selected_cand = ranked_cands[0]
                pool = ranked_cands
            else:
                scored = score_candidates(cands, src, lm, embed_fn, cnn)
                ranked = normalize_and_rerank(scored, rw)
                if cfg.select_mode == "match-length":
                    chosen = match_length_select(
                        ranked, len(reference), offset=cfg.select_offset
                    )
                else:
                    chosen = ranked[0]
                scored_records.append((src, ranked, ranked.index(chosen)))
                selected_cand = chosen.candidate
                pool = [sc.candidate for sc in ranked]
            cand_saris = [sari(src, list(c.tokens), [reference]).overall for c in pool]
            sel_saris.append(
                cand_saris[[c.tokens for c in pool].index(selected_cand.tokens)]
            )
            oracle_saris.append(max(cand_saris))
            outputs.append(list(selected_cand.tokens))
        if scored_records:
            scored_path = out / "scored.jsonl"
            write_scored_jsonl(scored_path, scored_records)
            _register(manifest, scored_path)

    with _stage("evaluate", manifest):
        sources = [list(p.complex_tokens) for p in split.test]
        references = [list(p.simple_tokens) for p in split.test]
        out_stats = corpus_stats(outputs, sources)
        ref_stats = corpus_stats(references, sources)
        edit_div = float(np.mean(diversities)) if diversities else 0.0
        strict = sum(1 for o, s in zip(oracle_saris, sel_saris) if o > s)
        metrics = {
            "variant": cfg.variant,
            "n_sentences": len(outputs),
            "sari": float(np.mean(sel_saris)),
            "oracle_sari": float(np.mean(oracle_saris)),
            "strict_oracle_fraction": strict / len(outputs),
            "mean_output_length": out_stats.avg_length,
            "fkgl": out_stats.fkgl,
            "ter_to_source": out_stats.avg_ter_vs_input,
            "insertions": out_stats.avg_insertions,
            "edit_diversity": edit_div,
        }
        metrics_path = out / "metrics.json"
        with open(metrics_path, "w", encoding="utf-8") as fh:
            json.dump(metrics, fh, indent=2, sort_keys=True)
            fh.write("\n")
        _register(manifest, metrics_path)

        sel_path = out / "selections.tsv"
        with open(sel_path, "w", encoding="utf-8") as fh:
            for src, hyp, ref in zip(sources, outputs, references):
                fh.write(f"{' '.join(src)}\t{' '.join(hyp)}\t{' '.join(ref)}\n")
        _register(manifest, sel_path)

        rows = {
            cfg.variant: {
                "Len": out_stats.avg_length,
                "FKGL": out_stats.fkgl,
                "TER": out_stats.avg_ter_vs_input,
                "Ins": out_stats.avg_insertions,
                "Edit": edit_div,
            },
            "Reference": {
                "Len": ref_stats.avg_length,
                "FKGL": ref_stats.fkgl,
                "TER": ref_stats.avg_ter_vs_input,
                "Ins": ref_stats.avg_insertions,
            },
        }
        report_path = out / "report.txt"
        with open(report_path, "w", encoding="utf-8") as fh:
            fh.write(format_stats_table(rows))
            fh.write(
                f"\nSARI {metrics['sari']:.2f}  oracle {metrics['oracle_sari']:.2f}"
                f"  ({metrics['n_sentences']} sentences)\n"
            )
        _register(manifest, report_path)

    manifest.save(out / "run_manifest.json")
    return manifest
