"""Deterministic synthetic data for desk-scale runs and tests.

Real leveled corpora are licensed, so the shipped experiments run on
generated stand-ins with the statistical structure the components care
about:

* a labeled lexicon whose complexity level is driven by syllable count
  (with length a noisier correlate and corpus frequency independent);
* a five-level document corpus whose word pools shift with level, so
  level-4 vocabulary genuinely differs from level-0;
* aligned complex/simple sentence pairs built from synonym concepts,
  where the simple side picks the easy or the hard synonym of each
  concept with equal probability -- giving a loss function that prefers
  easy words something real to bite on;
* an embedding table whose vectors cluster by the home level of each
  word, plus noise.

Everything is a pure function of the seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import (
    AlignedPair,
    LeveledCorpus,
    LeveledDocument,
    WordLevelCounts,
    is_content_word,
    write_aligned_pairs,
    write_leveled_corpus,
)
from .embeddings import EmbeddingTable

_CONSONANTS = list("bdfgklmnprstvz")
_VOWELS = list("aeiou")

EMBEDDING_DIM = 16


def _syllable(rng: np.random.Generator) -> str:
    return _CONSONANTS[rng.integers(len(_CONSONANTS))] + _VOWELS[rng.integers(len(_VOWELS))]


def _make_word(rng: np.random.Generator, n_syllables: int, taken: set) -> str:
    # reject collisions with stopwords ("so", "on", ...): every generated
    # word must count as a content word or complexity weighting skips it
    for _ in range(1000):
        word = "".join(_syllable(rng) for _ in range(n_syllables))
        if rng.random() < 0.4:
            word += _CONSONANTS[rng.integers(len(_CONSONANTS))]
        if word not in taken and is_content_word(word):
            taken.add(word)
            return word
    raise RuntimeError("could not generate a fresh word; vocabulary exhausted")


# ---------------------------------------------------------------------------
# Labeled lexicon
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LexiconData:
    words: list[str]
    labels: np.ndarray
    counts: WordLevelCounts
    embeddings: EmbeddingTable


def generate_labeled_lexicon(n_words: int = 2400, seed: int = 7) -> LexiconData:
    """Words labeled 0..4 where syllables carry the signal.

    Length correlates through syllables but with extra padding noise;
    total corpus frequency is drawn independently of the label, and the
    embedding carries a weak level signal on its first dimensions.
    """
    rng = np.random.default_rng(seed)
    taken: set = set()
    words: list[str] = []
    labels = np.empty(n_words, dtype=float)
    count_rows: dict[str, tuple[int, ...]] = {}
    vectors: dict[str, np.ndarray] = {}
    centers = rng.normal(0.0, 1.0, size=(5, EMBEDDING_DIM))
    for i in range(n_words):
        level = int(rng.integers(0, 5))
        n_syll = 1 + level // 2 + int(rng.random() < 0.35)
        word = _make_word(rng, n_syll, taken)
        words.append(word)
        labels[i] = level
        total = int(np.exp(rng.normal(3.0, 1.0))) + 1
        row = rng.multinomial(total, [0.2] * 5)
        count_rows[word] = tuple(int(c) for c in row)
        vectors[word] = 0.5 * centers[level] + rng.normal(0.0, 1.0, EMBEDDING_DIM)
    return LexiconData(
        words=words,
        labels=labels,
        counts=WordLevelCounts(counts=count_rows),
        embeddings=EmbeddingTable(vectors, EMBEDDING_DIM),
    )


# ---------------------------------------------------------------------------
# Leveled corpus and synonym pairs
# ---------------------------------------------------------------------------

_FUNCTION_WORDS = ["the", "a", "and", "of", "in", "to", "was", "is", "on", "with"]


@dataclass(frozen=True)
class DeskWorld:
    """Shared vocabulary universe behind the corpus and the pairs."""

    pools: list[list[str]]  # level -> dedicated content words
    shared: list[str]  # content words common to all levels
    concepts: list[tuple[str, str]]  # (simple synonym, complex synonym)
    embeddings: EmbeddingTable
    levels: dict[str, int]  # ground-truth complexity level per word


def build_desk_world(seed: int = 11, pool_size: int = 30, n_concepts: int = 24) -> DeskWorld:
    rng = np.random.default_rng(seed)
    taken: set = set(_FUNCTION_WORDS)
    pools = []
    for level in range(5):
        n_syll = 1 + (level + 1) // 2
        pools.append([_make_word(rng, n_syll, taken) for _ in range(pool_size)])
    shared = [_make_word(rng, 1, taken) for _ in range(40)]
    concepts = [
        (_make_word(rng, 1, taken), _make_word(rng, 3, taken)) for _ in range(n_concepts)
    ]
    vocab: dict[str, int] = {}
    for level, pool in enumerate(pools):
        vocab.update({w: level for w in pool})
    vocab.update({w: 2 for w in shared})
    for simple, complex_ in concepts:
        vocab[simple] = 0
        vocab[complex_] = 4
    vocab.update({w: 2 for w in _FUNCTION_WORDS})
    centers = rng.normal(0.0, 1.2, size=(5, EMBEDDING_DIM))
    vectors = {
        w: 0.8 * centers[lvl] + rng.normal(0.0, 0.6, EMBEDDING_DIM)
        for w, lvl in vocab.items()
    }
    return DeskWorld(
        pools=pools, shared=shared, concepts=concepts,
        embeddings=EmbeddingTable(vectors, EMBEDDING_DIM),
        levels=vocab,
    )


def generate_leveled_corpus(
    world: DeskWorld, n_docs: int = 24, sentences_per_doc: int = 8, seed: int = 13
) -> LeveledCorpus:
    """Documents at all five levels; word pools shift with level.

    Words from a level's dedicated pool keep appearing at that level
    and below-by-one, so the frequency-retention labeling rule sees
    realistic decay patterns.
    """
    rng = np.random.default_rng(seed)
    docs = []
    for d in range(n_docs):
        for level in range(5):
            sentences = []
            for _ in range(sentences_per_doc):
                length = 4 + level + int(rng.integers(0, 3))
                toks = []
                for _ in range(length):
                    u = rng.random()
                    if u < 0.25:
                        toks.append(_FUNCTION_WORDS[rng.integers(len(_FUNCTION_WORDS))])
                    elif u < 0.55:
                        toks.append(world.shared[rng.integers(len(world.shared))])
                    else:
                        # mostly this level's pool, sometimes one level up
                        src = world.pools[min(level + 1, 4)] if rng.random() < 0.2 else world.pools[level]
                        toks.append(src[rng.integers(len(src))])
                sentences.append(tuple(toks))
            docs.append(
                LeveledDocument(doc_id=f"doc{d:03d}", level=level, sentences=tuple(sentences))
            )
    return LeveledCorpus(documents=tuple(docs))


def generate_aligned_pairs(world: DeskWorld, n_pairs: int = 500, seed: int = 17) -> list[AlignedPair]:
    """Complex/simple pairs over shared synonym concepts.

    The complex side spells every concept with its hard synonym and
    pads with level-3/4 vocabulary. The simple side keeps the concepts
    (choosing easy or hard synonym 50/50) and drops the padding.
    """
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(n_pairs):
        n_concepts = int(rng.integers(2, 5))
        idx = rng.choice(len(world.concepts), size=n_concepts, replace=False)
        complex_toks = [_FUNCTION_WORDS[rng.integers(len(_FUNCTION_WORDS))]]
        simple_toks = [_FUNCTION_WORDS[rng.integers(len(_FUNCTION_WORDS))]]
        for ci in idx:
            simple_w, complex_w = world.concepts[ci]
            complex_toks.append(complex_w)
            complex_toks.append(world.pools[3 + int(rng.random() < 0.5)][rng.integers(30)])
            simple_toks.append(simple_w if rng.random() < 0.5 else complex_w)
        complex_toks.append(world.shared[rng.integers(len(world.shared))])
        if rng.random() < 0.5:
            simple_toks.append(world.shared[rng.integers(len(world.shared))])
        pairs.append(
            AlignedPair(
                complex_tokens=tuple(complex_toks),
                simple_tokens=tuple(simple_toks),
                complex_level=4,
                simple_level=int(rng.integers(0, 2)),
            )
        )
    return pairs


def generate_synonym_pairs(world: DeskWorld, n_pairs: int = 240, seed: int = 19) -> list[AlignedPair]:
    """Pairs built to probe loss-driven word choice.

    Each base sentence pairs a two-concept complex side with four
    copies of the simple side enumerating every synonym pattern for
    the two slots (simple/simple, simple/complex, complex/simple,
    complex/complex). Duplication is the point: a model can memorize
    every context it has seen and still face an exactly 50/50
    conditional at both slots. That irreducible uncertainty is where a
    complexity-shaped output distribution and a plain one part ways;
    everything else about the sentences is learnable structure.
    """
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(max(1, n_pairs // 4)):
        idx = rng.choice(len(world.concepts), size=2, replace=False)
        func = _FUNCTION_WORDS[rng.integers(len(_FUNCTION_WORDS))]
        complex_toks = [func]
        for ci in idx:
            complex_toks.append(world.concepts[ci][1])
            complex_toks.append(world.pools[3 + int(rng.random() < 0.5)][rng.integers(30)])
        complex_toks.append(world.shared[rng.integers(len(world.shared))])
        for pattern in range(4):
            simple_toks = [func]
            for slot, ci in enumerate(idx):
                simple_toks.append(world.concepts[ci][(pattern >> slot) & 1])
            pairs.append(
                AlignedPair(
                    complex_tokens=tuple(complex_toks),
                    simple_tokens=tuple(simple_toks),
                    complex_level=4,
                    simple_level=int(rng.integers(0, 2)),
                )
            )
    return pairs


# ---------------------------------------------------------------------------
# On-disk bundle
# ---------------------------------------------------------------------------


def write_desk_data(out_dir, seed: int = 0, n_pairs: int = 500) -> dict[str, str]:
    """Write pairs.tsv, corpus.tsv, and embeddings.txt for the pipeline."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    world = build_desk_world(seed=seed + 11)
    corpus = generate_leveled_corpus(world, seed=seed + 13)
    pairs = generate_aligned_pairs(world, n_pairs=n_pairs, seed=seed + 17)

    corpus_path = out / "corpus.tsv"
    rows = [
        (doc.level, doc.doc_id, " ".join(sent))
        for doc in corpus.documents
        for sent in doc.sentences
    ]
    write_leveled_corpus(corpus_path, rows)

    pairs_path = out / "pairs.tsv"
    write_aligned_pairs(
        pairs_path,
        [
            (p.complex_level, p.simple_level, " ".join(p.complex_tokens), " ".join(p.simple_tokens))
            for p in pairs
        ],
    )

    emb_path = out / "embeddings.txt"
    world.embeddings.save(emb_path)
    return {
        "corpus": str(corpus_path),
        "pairs": str(pairs_path),
        "embeddings": str(emb_path),
    }
