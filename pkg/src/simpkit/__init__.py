"""Sentence simplification toolkit.

Desk-scale components for building and evaluating a simplification
pipeline: leveled-corpus ingestion and word complexity labeling,
word- and sentence-level complexity predictors, a complexity-weighted
cross-entropy loss, rank-penalized diverse beam search over a generic
sequence-scorer interface, candidate clustering and
fluency/adequacy/simplicity reranking, and the usual automatic metrics
(SARI, FKGL, TER).
"""

__version__ = "0.1.0"

from .candidates import (  # noqa: E402
    FA_WEIGHTS,
    FAS_WEIGHTS,
    Candidate,
    ClusterConfig,
    RerankWeights,
    ScoredCandidate,
    kmeans_cluster,
    normalize_and_rerank,
    score_candidates,
    select_representatives,
)
from .complexity import (  # noqa: E402
    CNNConfig,
    LinearModel,
    SentenceCNN,
    count_syllables,
    evaluate_predictor,
    extract_word_features,
    fit_ridge_regression,
    fit_sentence_cnn,
    pearson_r,
    predict_word_complexity,
)
from .config import ConfigError, PipelineConfig, load_config  # noqa: E402
from .corpus import (  # noqa: E402
    AlignedPair,
    LeveledCorpus,
    LeveledDocument,
    WordLevelCounts,
    count_by_level,
    label_word_complexity,
    preprocess_sentence,
    split_corpus,
    tokenize,
)
from .decoder import (  # noqa: E402
    DecodeParams,
    Hypothesis,
    RandomTableScorer,
    SequenceScorer,
    TableScorer,
    diverse_beam_search,
    exhaustive_decode,
    greedy_decode,
)
from .embeddings import EmbeddingTable, cosine_similarity, embed_sentence, load_embedding_table  # noqa: E402
from .metrics import corpus_sari, corpus_stats, fkgl, sari, ter  # noqa: E402
from .ngram_lm import KNModel, sentence_perplexity, train_kn_model  # noqa: E402
from .pipeline import RunManifest, run_pipeline  # noqa: E402
from .toy_scorer import ToyScorer, ToyScorerConfig, build_vocabulary, train_toy_scorer  # noqa: E402
from .weighted_loss import (  # noqa: E402
    ComplexityTable,
    VocabWeights,
    reweight_distribution,
    vocab_weights,
    weighted_cross_entropy,
)

__all__ = [
    "__version__",
    "AlignedPair",
    "Candidate",
    "ClusterConfig",
    "CNNConfig",
    "ComplexityTable",
    "ConfigError",
    "DecodeParams",
    "EmbeddingTable",
    "FA_WEIGHTS",
    "FAS_WEIGHTS",
    "Hypothesis",
    "KNModel",
    "LeveledCorpus",
    "LeveledDocument",
    "LinearModel",
    "PipelineConfig",
    "RandomTableScorer",
    "RerankWeights",
    "RunManifest",
    "ScoredCandidate",
    "SentenceCNN",
    "SequenceScorer",
    "TableScorer",
    "ToyScorer",
    "ToyScorerConfig",
    "VocabWeights",
    "WordLevelCounts",
    "build_vocabulary",
    "corpus_sari",
    "corpus_stats",
    "cosine_similarity",
    "count_by_level",
    "count_syllables",
    "diverse_beam_search",
    "embed_sentence",
    "evaluate_predictor",
    "exhaustive_decode",
    "extract_word_features",
    "fit_ridge_regression",
    "fit_sentence_cnn",
    "fkgl",
    "greedy_decode",
    "kmeans_cluster",
    "label_word_complexity",
    "load_config",
    "load_embedding_table",
    "normalize_and_rerank",
    "pearson_r",
    "predict_word_complexity",
    "preprocess_sentence",
    "reweight_distribution",
    "run_pipeline",
    "sari",
    "score_candidates",
    "select_representatives",
    "sentence_perplexity",
    "split_corpus",
    "ter",
    "tokenize",
    "train_kn_model",
    "train_toy_scorer",
    "vocab_weights",
    "weighted_cross_entropy",
]
