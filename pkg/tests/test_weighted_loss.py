"""Complexity-derived vocabulary weights and the reweighted loss."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from simpkit.weighted_loss import (
    ComplexityTable,
    VocabWeights,
    reweight_distribution,
    reweight_logits,
    softmax,
    vocab_weights,
    weighted_cross_entropy,
)


def _table(scores, content):
    return ComplexityTable(scores=scores, content_words=frozenset(content))


class TestComplexityTable:
    def test_score_range_enforced(self):
        with pytest.raises(ValueError, match="outside"):
            _table({"w": 4.5}, [])

    def test_content_words_need_scores(self):
        with pytest.raises(ValueError, match="without scores"):
            _table({"a": 1.0}, ["a", "b"])

    def test_lookup(self):
        t = _table({"a": 1.5, "the": 0.0}, ["a"])
        assert t.score("a") == 1.5
        assert t.is_content("a") and not t.is_content("the")


class TestVocabWeights:
    def test_raw_formula(self):
        # content word of complexity s weighs (4 - s) + 1; everything
        # else weighs exactly 1 regardless of its score
        t = _table({"cat": 0.0, "perplexing": 4.0, "the": 2.0}, ["cat", "perplexing"])
        w = vocab_weights(("</s>", "cat", "perplexing", "the"), t, alpha=1.0)
        np.testing.assert_array_equal(w.raw, [1.0, 5.0, 1.0, 1.0])
        np.testing.assert_allclose(w.normalized_pow, np.array([1, 5, 1, 1]) / 8.0)

    def test_alpha_sharpened(self):
        t = _table({"cat": 0.0}, ["cat"])
        w = vocab_weights(("</s>", "cat"), t, alpha=2.0)
        np.testing.assert_allclose(w.normalized_pow, [(1 / 6) ** 2, (5 / 6) ** 2])

    def test_alpha_zero_is_uniform(self):
        t = _table({"cat": 0.0}, ["cat"])
        w = vocab_weights(("</s>", "cat"), t, alpha=0.0)
        assert w.is_uniform
        np.testing.assert_array_equal(w.normalized_pow, [1.0, 1.0])

    def test_missing_score_raises(self):
        # a score table that claims content status without a score is
        # normally impossible to build; a duck-typed stand-in exercises
        # the defensive check anyway
        class Gappy:
            scores = {"cat": 0.0}

            def is_content(self, tok):
                return True

            def score(self, tok):
                return self.scores[tok]

        with pytest.raises(KeyError, match="dog"):
            vocab_weights(("cat", "dog"), Gappy(), alpha=1.0)

    def test_negative_alpha_rejected(self):
        t = _table({"cat": 0.0}, ["cat"])
        with pytest.raises(ValueError):
            vocab_weights(("cat",), t, alpha=-0.5)


def _weights(raws, alpha=1.0):
    raw = np.asarray(raws, dtype=float)
    return VocabWeights(
        vocab=tuple(f"t{i}" for i in range(len(raw))),
        raw=raw,
        normalized_pow=(raw / raw.sum()) ** alpha,
        alpha=alpha,
    )


class TestReweighting:
    def test_uniform_weights_are_identity(self):
        w = _weights([3.0, 3.0, 3.0], alpha=0.0)
        p = np.array([0.2, 0.5, 0.3])
        np.testing.assert_array_equal(reweight_distribution(p, w), p)

    def test_hand_case(self):
        # p=[.5,.5] times w=[.25,.75] renormalizes to [.25,.75]
        w = _weights([1.0, 3.0])
        q = reweight_distribution(np.array([0.5, 0.5]), w)
        np.testing.assert_allclose(q, [0.25, 0.75])
        np.testing.assert_allclose(reweight_logits(np.array([0.5, 0.5]), w), np.log([0.25, 0.75]))

    @given(
        st.lists(st.integers(1, 100), min_size=2, max_size=12),
        st.integers(0, 1000),
    )
    def test_output_is_a_simplex(self, raws, seed):
        w = _weights(raws)
        rng = np.random.default_rng(seed)
        p = rng.dirichlet(np.ones(len(raws)))
        q = reweight_distribution(p, w)
        assert q.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(q >= 0)

    def test_shape_and_simplex_validation(self):
        w = _weights([1.0, 1.0, 2.0])
        with pytest.raises(ValueError, match="shape"):
            reweight_distribution(np.array([0.5, 0.5]), w)
        with pytest.raises(ValueError, match="simplex"):
            reweight_distribution(np.array([0.5, 0.4, 0.2]), w)


class TestWeightedCrossEntropy:
    def test_hand_case(self):
        # equal logits, weights 1:3 -> q = [0.25, 0.75]
        w = _weights([1.0, 3.0])
        result = weighted_cross_entropy(np.zeros(2), target=0, weights=w)
        assert result.loss == pytest.approx(-np.log(0.25))
        np.testing.assert_allclose(result.gradient_wrt_logits, [-0.75, 0.75])

    def test_alpha_zero_equals_standard_bitwise(self):
        rng = np.random.default_rng(0)
        logits = rng.normal(size=10)
        uniform = _weights([2.0] * 10, alpha=0.0)
        result = weighted_cross_entropy(logits, target=3, weights=uniform)
        p = softmax(logits)
        assert result.loss == -float(np.log(p[3]))
        expected = p.copy()
        expected[3] -= 1.0
        np.testing.assert_array_equal(result.gradient_wrt_logits, expected)

    def test_unrenormalized_variant(self):
        # without renormalization the weight factor is constant in the
        # logits, so the gradient is the plain softmax one
        w = _weights([1.0, 3.0])
        result = weighted_cross_entropy(np.zeros(2), 0, w, renormalize=False)
        assert result.loss == pytest.approx(-np.log(0.5 * 0.25))
        np.testing.assert_allclose(result.gradient_wrt_logits, [-0.5, 0.5])

    @given(st.integers(0, 500))
    def test_gradient_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        dim = int(rng.integers(2, 10))
        logits = rng.normal(scale=2.0, size=dim)
        raw = rng.integers(1, 6, size=dim).astype(float)
        w = _weights(raw, alpha=float(rng.uniform(0.0, 3.0)))
        target = int(rng.integers(dim))
        analytic = weighted_cross_entropy(logits, target, w).gradient_wrt_logits
        h = 1e-6
        for i in range(dim):
            up = logits.copy()
            up[i] += h
            down = logits.copy()
            down[i] -= h
            numeric = (
                weighted_cross_entropy(up, target, w).loss
                - weighted_cross_entropy(down, target, w).loss
            ) / (2 * h)
            assert analytic[i] == pytest.approx(numeric, abs=1e-6)

    def test_validation(self):
        w = _weights([1.0, 1.0])
        with pytest.raises(IndexError):
            weighted_cross_entropy(np.zeros(2), 2, w)
        with pytest.raises(ValueError):
            weighted_cross_entropy(np.array([np.inf, 0.0]), 0, w)


class TestExport:
    def test_tsv_roundtrips_by_repr(self, tmp_path):
        w = _weights([1.0, 3.0], alpha=2.0)
        path = tmp_path / "weights.tsv"
        w.export_tsv(path)
        rows = [line.split("\t") for line in path.read_text().splitlines()]
        assert [r[0] for r in rows] == ["t0", "t1"]
        assert [float(r[1]) for r in rows] == [1.0, 3.0]
        assert float(rows[1][2]) == w.normalized_pow[1]
