"""Complexity-weighted cross entropy for simplification training.

Each vocabulary token gets a weight from its predicted complexity
s_v in [0,4]: content words weigh (4 - s_v) + 1 (simple words heavy,
complex words light), everything else weighs exactly 1. The weight
vector is normalized to a distribution, raised to the sharpening power
alpha, and multiplied into the model's softmax; the product is
renormalized and the loss is the negative log of the target's
reweighted probability. At alpha = 0 the transform is the identity and
the loss reduces to standard cross entropy bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ComplexityTable:
    """Token -> complexity score in [0,4], plus the content-word mask.

    Non-content tokens may carry any score; their loss weight is
    always 1.
    """

    scores: dict[str, float]
    content_words: frozenset[str]

    def __post_init__(self):
        for tok, s in self.scores.items():
            if not 0.0 <= s <= 4.0:
                raise ValueError(f"complexity score for {tok!r} outside [0,4]: {s}")
        missing = self.content_words - self.scores.keys()
        if missing:
            raise ValueError(f"content words without scores: {sorted(missing)[:5]}")

    def score(self, token: str) -> float:
        return self.scores[token]

    def is_content(self, token: str) -> bool:
        return token in self.content_words


@dataclass(frozen=True)
class VocabWeights:
    """Per-token loss weights, raw and normalized-then-sharpened."""

    vocab: tuple[str, ...]
    raw: np.ndarray
    normalized_pow: np.ndarray
    alpha: float

    @property
    def is_uniform(self) -> bool:
        """True when every final weight is exactly 1 (alpha = 0), making
        the reweighting transform the identity."""
        return bool(np.all(self.normalized_pow == 1.0))

    def export_tsv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for i, tok in enumerate(self.vocab):
                fh.write(f"{tok}\t{float(self.raw[i])!r}\t{float(self.normalized_pow[i])!r}\n")


def vocab_weights(vocab, table: ComplexityTable, alpha: float) -> VocabWeights:
    """Build the weight vector: raw = (4 - s_v) + 1 for content words,
    1 otherwise; final = (raw / sum(raw)) ** alpha."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    raw = np.empty(len(vocab))
    for i, tok in enumerate(vocab):
        if table.is_content(tok):
            if tok not in table.scores:
                raise KeyError(f"no complexity score for vocabulary token {tok!r}")
            raw[i] = (4.0 - table.score(tok)) + 1.0
        else:
            raw[i] = 1.0
    normalized_pow = (raw / raw.sum()) ** alpha
    return VocabWeights(
        vocab=tuple(vocab), raw=raw, normalized_pow=normalized_pow, alpha=float(alpha)
    )


def reweight_distribution(probs: np.ndarray, weights: VocabWeights) -> np.ndarray:
    """Multiply a probability vector by the weights and renormalize.

    Uniform weights (alpha = 0) return the input unchanged, so the
    transform is exactly the identity there.
    """
    probs = np.asarray(probs, dtype=float)
    if probs.shape != (len(weights.vocab),):
        raise ValueError(f"probs shape {probs.shape} does not match vocab size {len(weights.vocab)}")
    if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-6:
        raise ValueError("probs must be a (near-)simplex vector")
    if weights.is_uniform:
        return probs.copy()
    product = probs * weights.normalized_pow
    total = product.sum()
    if total <= 0.0:
        raise ValueError("reweighted mass is zero; cannot renormalize")
    return product / total


def reweight_logits(probs: np.ndarray, weights: VocabWeights) -> np.ndarray:
    """Log of the reweighted distribution (the 'converted back' logits)."""
    return np.log(reweight_distribution(probs, weights))


@dataclass(frozen=True)
class LossResult:
    loss: float
    gradient_wrt_logits: np.ndarray


def softmax(logits: np.ndarray) -> np.ndarray:
    z = np.asarray(logits, dtype=float)
    z = z - z.max()
    e = np.exp(z)
    return e / e.sum()


def weighted_cross_entropy(
    logits: np.ndarray,
    target: int,
    weights: VocabWeights,
    renormalize: bool = True,
) -> LossResult:
    """Loss = -log SCE[target] with SCE the reweighted softmax.

    The gradient is analytic: with q the renormalized SCE vector it is
    q - onehot(target); with ``renormalize=False`` the weight factor is
    a constant offset and the gradient is softmax(logits) - onehot.
    """
    logits = np.asarray(logits, dtype=float)
    if not np.all(np.isfinite(logits)):
        raise ValueError("logits must be finite")
    if not 0 <= target < logits.shape[0]:
        raise IndexError(f"target index {target} outside vocabulary of {logits.shape[0]}")
    p = softmax(logits)
    grad = p.copy()
    if weights.is_uniform:
        loss = -float(np.log(p[target]))
    elif renormalize:
        q = reweight_distribution(p, weights)
        loss = -float(np.log(q[target]))
        grad = q.copy()
    else:
        loss = -float(np.log(p[target] * weights.normalized_pow[target]))
    grad[target] -= 1.0
    return LossResult(loss=loss, gradient_wrt_logits=grad)
