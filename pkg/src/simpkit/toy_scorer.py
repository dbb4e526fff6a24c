"""A minimal trainable conditional scorer for desk-scale experiments.

The model is deliberately tiny: the source sentence is the mean of its
token embeddings, the decoder input is that vector concatenated with
the previous target token's embedding, and a single tanh layer feeds
a projection whose dot products against the (tied) token embeddings
are the output logits. It exists so the complexity-weighted loss can
be exercised end to end -- train, decode, compare -- in seconds, not to
be a competitive simplification model.

Training uses teacher forcing and minibatch gradient descent. Both loss
modes run through the same weighted-cross-entropy code path (standard
mode uses an all-ones weight vector), so a weighted run with alpha = 0
follows the standard run's parameter trajectory bit for bit under the
same seed.

The complexity reweighting is part of the model's probability head,
not just the training objective: the shaped (renormalized) distribution
the loss is computed over is also what ``logprobs`` exposes at decode
time. Under the identity transform the head reduces to a plain softmax.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .corpus import AlignedPair, BOS, EOS
from .decoder import SequenceScorer
from .weighted_loss import VocabWeights, reweight_distribution, softmax, weighted_cross_entropy


@dataclass(frozen=True)
class ToyScorerConfig:
    embedding_dim: int = 16
    hidden_dim: int = 32
    learning_rate: float = 0.15
    epochs: int = 60
    batch_size: int = 8
    seed: int = 0


def uniform_weights(vocab) -> VocabWeights:
    """All-ones weight vector: the identity reweighting transform."""
    ones = np.ones(len(vocab))
    return VocabWeights(vocab=tuple(vocab), raw=ones, normalized_pow=ones.copy(), alpha=0.0)


class ToyScorer(SequenceScorer):
    """mean(source embeddings) ++ prev-token embedding -> tanh -> logits.

    The output projection is tied to the token embeddings (logits are
    dot products against the same vectors used to encode the source),
    with no per-word bias -- the usual weight-tying setup.
    """

    def __init__(self, vocab, config: ToyScorerConfig | None = None):
        self.vocab = tuple(vocab)
        if EOS not in self.vocab:
            raise ValueError("vocabulary must include the end marker")
        if BOS in self.vocab:
            raise ValueError("begin marker is internal and cannot be an output token")
        self.config = config or ToyScorerConfig()
        self._id = {t: i for i, t in enumerate(self.vocab)}
        self._bos_id = len(self.vocab)
        d = self.config.embedding_dim
        h = self.config.hidden_dim
        rng = np.random.default_rng(self.config.seed)
        # last embedding row is the internal begin marker
        self.emb = rng.normal(0.0, 0.5, size=(len(self.vocab) + 1, d))
        self.W1 = rng.normal(0.0, 1.0 / math.sqrt(2 * d), size=(h, 2 * d))
        self.b1 = np.zeros(h)
        self.W2 = rng.normal(0.0, 1.0 / math.sqrt(h), size=(d, h))
        self.weights = uniform_weights(self.vocab)
        self.final_loss: float | None = None

    # -- forward -------------------------------------------------------------

    def _source_ids(self, source) -> list[int]:
        return [self._id[t] for t in source if t in self._id]

    def _source_vector(self, src_ids: list[int]) -> np.ndarray:
        if not src_ids:
            return np.zeros(self.config.embedding_dim)
        return self.emb[src_ids].mean(axis=0)

    def _logits(self, prev_id: int, src_vec: np.ndarray):
        x = np.concatenate([self.emb[prev_id], src_vec])
        hidden = np.tanh(self.W1 @ x + self.b1)
        proj = self.W2 @ hidden
        return self.emb[:-1] @ proj, x, hidden, proj

    def logprobs(self, source, prefix) -> np.ndarray:
        prev = self._id.get(prefix[-1], self._bos_id) if prefix else self._bos_id
        logits, _, _, _ = self._logits(prev, self._source_vector(self._source_ids(source)))
        return np.log(reweight_distribution(softmax(logits), self.weights))

    # -- training ------------------------------------------------------------

    def fit(self, pairs: list[AlignedPair], weights: VocabWeights) -> "ToyScorer":
        if not pairs:
            raise ValueError("no training pairs")
        if tuple(weights.vocab) != self.vocab:
            raise ValueError("loss weights must cover the scorer vocabulary in order")
        self.weights = weights
        examples = []  # (pair_index, prev_id, target_id)
        src_ids_per_pair = []
        for pi, pair in enumerate(pairs):
            src_ids = self._source_ids(pair.complex_tokens)
            src_ids_per_pair.append(src_ids)
            prev = self._bos_id
            for tok in tuple(pair.simple_tokens) + (EOS,):
                if tok not in self._id:
                    raise ValueError(f"target token {tok!r} missing from vocabulary")
                examples.append((pi, prev, self._id[tok]))
                prev = self._id[tok]

        cfg = self.config
        d = cfg.embedding_dim
        rng = np.random.default_rng(cfg.seed + 1)
        order = np.arange(len(examples))
        epoch_loss = math.nan
        for epoch in range(cfg.epochs):
            rng.shuffle(order)
            epoch_loss = 0.0
            for start in range(0, len(order), cfg.batch_size):
                batch = order[start : start + cfg.batch_size]
                gW1 = np.zeros_like(self.W1)
                gb1 = np.zeros_like(self.b1)
                gW2 = np.zeros_like(self.W2)
                gemb = np.zeros_like(self.emb)
                scale = 1.0 / len(batch)
                for ei in batch:
                    pi, prev, target = examples[ei]
                    src_ids = src_ids_per_pair[pi]
                    logits, x, hidden, proj = self._logits(prev, self._source_vector(src_ids))
                    result = weighted_cross_entropy(logits, target, weights)
                    epoch_loss += result.loss
                    dlogits = scale * result.gradient_wrt_logits
                    gemb[:-1] += np.outer(dlogits, proj)
                    dproj = self.emb[:-1].T @ dlogits
                    gW2 += np.outer(dproj, hidden)
                    dpre = (self.W2.T @ dproj) * (1.0 - hidden * hidden)
                    gW1 += np.outer(dpre, x)
                    gb1 += dpre
                    dx = self.W1.T @ dpre
                    gemb[prev] += dx[:d]
                    if src_ids:
                        share = dx[d:] / len(src_ids)
                        for sid in src_ids:
                            gemb[sid] += share
                if not math.isfinite(epoch_loss):
                    raise RuntimeError(
                        f"non-finite training loss in epoch {epoch}; lower the learning rate"
                    )
                self.W1 -= cfg.learning_rate * gW1
                self.b1 -= cfg.learning_rate * gb1
                self.W2 -= cfg.learning_rate * gW2
                self.emb -= cfg.learning_rate * gemb
        self.final_loss = epoch_loss / len(examples)
        return self

    # -- persistence ----------------------------------------------------------

    def save(self, path) -> None:
        np.savez(
            path,
            vocab=np.array(self.vocab, dtype=object),
            emb=self.emb,
            W1=self.W1,
            b1=self.b1,
            W2=self.W2,
            w_raw=self.weights.raw,
            w_alpha=np.array([self.weights.alpha]),
            meta=np.array(
                [
                    self.config.embedding_dim,
                    self.config.hidden_dim,
                    self.config.seed,
                ],
                dtype=np.int64,
            ),
        )

    @classmethod
    def load(cls, path) -> "ToyScorer":
        data = np.load(path, allow_pickle=True)
        d, h, seed = (int(x) for x in data["meta"])
        scorer = cls(
            tuple(str(t) for t in data["vocab"]),
            ToyScorerConfig(embedding_dim=d, hidden_dim=h, seed=seed),
        )
        scorer.emb = data["emb"]
        scorer.W1 = data["W1"]
        scorer.b1 = data["b1"]
        scorer.W2 = data["W2"]
        raw = data["w_raw"]
        alpha = float(data["w_alpha"][0])
        scorer.weights = VocabWeights(
            vocab=scorer.vocab,
            raw=raw,
            normalized_pow=(raw / raw.sum()) ** alpha,
            alpha=alpha,
        )
        return scorer


def build_vocabulary(pairs: list[AlignedPair]) -> tuple[str, ...]:
    """All source and target types, sorted, plus the end marker."""
    types = set()
    for pair in pairs:
        types.update(pair.complex_tokens)
        types.update(pair.simple_tokens)
    types.discard(EOS)
    types.discard(BOS)
    return tuple(sorted(types)) + (EOS,)


def train_toy_scorer(
    pairs: list[AlignedPair],
    loss_mode: str = "standard",
    weights: VocabWeights | None = None,
    config: ToyScorerConfig | None = None,
) -> ToyScorer:
    """Train the toy scorer with plain or complexity-weighted loss."""
    if loss_mode not in ("standard", "weighted"):
        raise ValueError(f"unknown loss mode {loss_mode!r}")
    vocab = build_vocabulary(pairs)
    if loss_mode == "weighted":
        if weights is None:
            raise ValueError("weighted mode requires a VocabWeights instance")
    else:
        weights = uniform_weights(vocab)
    scorer = ToyScorer(vocab, config)
    return scorer.fit(pairs, weights)
