"""Trainable desk-scale scorer: contracts, loss modes, persistence."""

import numpy as np
import pytest

from simpkit.corpus import AlignedPair, BOS, EOS
from simpkit.decoder import checked_logprobs, greedy_decode
from simpkit.toy_scorer import (
    ToyScorer,
    ToyScorerConfig,
    build_vocabulary,
    train_toy_scorer,
    uniform_weights,
)
from simpkit.weighted_loss import ComplexityTable, reweight_distribution, softmax, vocab_weights

PAIRS = [
    AlignedPair(("the", "feline", "sat"), ("the", "cat", "sat"), 4, 0),
    AlignedPair(("a", "canine", "ran"), ("a", "dog", "ran"), 4, 0),
    AlignedPair(("the", "canine", "sat"), ("the", "dog", "sat"), 4, 0),
]

CFG = ToyScorerConfig(embedding_dim=6, hidden_dim=8, epochs=3, seed=0)


class TestVocabulary:
    def test_sorted_types_plus_end_marker(self):
        vocab = build_vocabulary(PAIRS)
        assert vocab[-1] == EOS
        assert list(vocab[:-1]) == sorted(vocab[:-1])
        assert set(vocab[:-1]) == {
            "the", "feline", "sat", "cat", "a", "canine", "ran", "dog",
        }

    def test_markers_never_duplicated(self):
        pairs = [AlignedPair((EOS, "x"), ("y",), 4, 0)]
        vocab = build_vocabulary(pairs)
        assert vocab.count(EOS) == 1

    def test_begin_marker_rejected_in_vocab(self):
        with pytest.raises(ValueError, match="begin marker"):
            ToyScorer((BOS, EOS))


class TestScorerContract:
    def test_logprobs_are_normalized_for_any_prefix(self):
        scorer = train_toy_scorer(PAIRS, config=CFG)
        for prefix in ((), ("the",), ("the", "cat"), ("unseen-token",)):
            checked_logprobs(scorer, ("the", "feline", "sat"), prefix)

    def test_deterministic_given_seed(self):
        a = train_toy_scorer(PAIRS, config=CFG)
        b = train_toy_scorer(PAIRS, config=CFG)
        src = ("the", "feline", "sat")
        np.testing.assert_array_equal(a.logprobs(src, ()), b.logprobs(src, ()))

    def test_training_moves_parameters(self):
        fresh = ToyScorer(build_vocabulary(PAIRS), CFG)
        trained = train_toy_scorer(PAIRS, config=CFG)
        assert not np.array_equal(fresh.W1, trained.W1)
        assert trained.final_loss is not None


class TestLossModes:
    def test_weighted_alpha_zero_is_bitwise_standard(self):
        # the standard path literally is the weighted path with an
        # identity transform, so parameter trajectories coincide exactly
        vocab = build_vocabulary(PAIRS)
        table = ComplexityTable(
            scores={t: 2.0 for t in vocab},
            content_words=frozenset(t for t in vocab if t != EOS),
        )
        std = train_toy_scorer(PAIRS, "standard", config=CFG)
        wtd = train_toy_scorer(
            PAIRS, "weighted", vocab_weights(vocab, table, alpha=0.0), config=CFG
        )
        np.testing.assert_array_equal(std.W1, wtd.W1)
        np.testing.assert_array_equal(std.emb, wtd.emb)
        src = ("the", "canine", "sat")
        np.testing.assert_array_equal(std.logprobs(src, ()), wtd.logprobs(src, ()))

    def test_shaping_is_part_of_the_probability_head(self):
        # decode-time logprobs must be the reweighted softmax, not the
        # raw one
        vocab = build_vocabulary(PAIRS)
        table = ComplexityTable(
            scores={t: 0.0 for t in vocab},
            content_words=frozenset(t for t in vocab if t != EOS),
        )
        w = vocab_weights(vocab, table, alpha=2.0)
        scorer = train_toy_scorer(PAIRS, "weighted", w, config=CFG)
        src = ("the", "feline", "sat")
        logits, _, _, _ = scorer._logits(scorer._bos_id, scorer._source_vector(scorer._source_ids(src)))
        expected = np.log(reweight_distribution(softmax(logits), w))
        np.testing.assert_allclose(scorer.logprobs(src, ()), expected, atol=1e-12)

    def test_weighted_mode_requires_weights(self):
        with pytest.raises(ValueError, match="requires"):
            train_toy_scorer(PAIRS, "weighted", None, CFG)

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError, match="loss mode"):
            train_toy_scorer(PAIRS, "fancy", None, CFG)

    def test_mismatched_weight_vocab_rejected(self):
        scorer = ToyScorer(build_vocabulary(PAIRS), CFG)
        wrong = uniform_weights(("x", EOS))
        with pytest.raises(ValueError, match="vocabulary"):
            scorer.fit(PAIRS, wrong)

    def test_target_token_must_be_known(self):
        scorer = ToyScorer(("a", EOS), CFG)
        bad = [AlignedPair(("a",), ("mystery",), 4, 0)]
        with pytest.raises(ValueError, match="missing from vocabulary"):
            scorer.fit(bad, uniform_weights(("a", EOS)))

    def test_empty_training_set_rejected(self):
        scorer = ToyScorer(("a", EOS), CFG)
        with pytest.raises(ValueError, match="no training pairs"):
            scorer.fit([], uniform_weights(("a", EOS)))


class TestLearning:
    def test_memorizes_a_tiny_mapping(self):
        # sixty epochs on three pairs is plenty to reproduce the targets
        cfg = ToyScorerConfig(embedding_dim=12, hidden_dim=16, epochs=60, seed=0)
        scorer = train_toy_scorer(PAIRS, config=cfg)
        for pair in PAIRS:
            hyp = greedy_decode(scorer, pair.complex_tokens, max_len=8)
            assert hyp.tokens[:-1] == pair.simple_tokens


class TestPersistence:
    def test_save_load_reproduces_logprobs(self, tmp_path):
        vocab = build_vocabulary(PAIRS)
        table = ComplexityTable(
            scores={t: 1.0 for t in vocab},
            content_words=frozenset(t for t in vocab if t != EOS),
        )
        scorer = train_toy_scorer(PAIRS, "weighted", vocab_weights(vocab, table, 2.0), CFG)
        path = tmp_path / "scorer.npz"
        scorer.save(path)
        loaded = ToyScorer.load(path)
        assert loaded.vocab == scorer.vocab
        assert loaded.weights.alpha == scorer.weights.alpha
        src = ("the", "feline", "sat")
        for prefix in ((), ("the",), ("the", "cat")):
            np.testing.assert_array_equal(
                loaded.logprobs(src, prefix), scorer.logprobs(src, prefix)
            )
