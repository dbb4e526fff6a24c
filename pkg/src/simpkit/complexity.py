"""Word- and sentence-level complexity predictors.

Word level: hand features (length, syllables, log frequency) plus word
embeddings, fed to a closed-form ridge regression against 0..4 labels.
Min-max length/frequency baselines provide the comparison floor.

Sentence level: a small 1D convolutional regressor over fixed word
embeddings -- filter widths 3/4/5, tanh, max-over-time pooling, linear
head -- trained with minibatch gradient descent on squared error.
All predictions are clamped to the 0..4 complexity scale.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass

import numpy as np

from .corpus import PAD as PAD_TOKEN
from .corpus import WordLevelCounts
from .embeddings import EmbeddingTable

_ALPHA_RE = re.compile(r"[^\W\d_]", re.UNICODE)

CNN_WIDTHS = (3, 4, 5)


def count_syllables(word: str) -> int:
    """Count syllables as maximal vowel groups (a,e,i,o,u,y).

    A trailing silent 'e' is dropped unless that would leave zero
    syllables. Words without alphabetic characters count as 1.
    """
    low = word.lower()
    if not _ALPHA_RE.search(low):
        return 1
    groups = len(re.findall(r"[aeiouy]+", low))
    if low.endswith("e") and groups > 1:
        groups -= 1
    return max(groups, 1)


@dataclass(frozen=True)
class WordFeatures:
    """Features for one word. Vector layout: [length, syllables,
    log_frequency, embedding...]."""

    length: int
    syllables: int
    log_frequency: float
    embedding: np.ndarray

    def to_vector(self) -> np.ndarray:
        return np.concatenate(
            [[float(self.length), float(self.syllables), self.log_frequency], self.embedding]
        )


def extract_word_features(
    word: str, counts: WordLevelCounts, embeddings: EmbeddingTable
) -> WordFeatures:
    """Deterministic feature extraction; OOV embeddings are zero vectors."""
    total = counts.total(word)
    return WordFeatures(
        length=len(word),
        syllables=count_syllables(word),
        log_frequency=math.log(total + 1),
        embedding=embeddings.get(word),
    )


# ---------------------------------------------------------------------------
# Ridge regression (closed form)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearModel:
    """Ridge regression fit on standardized features.

    ``weights`` live in standardized feature space; prediction is
    ``weights . (x - feature_means) / feature_scales + bias``.
    """

    weights: np.ndarray
    bias: float
    feature_means: np.ndarray
    feature_scales: np.ndarray
    ridge_lambda: float

    def predict(self, x: np.ndarray) -> float:
        z = (np.asarray(x, dtype=float) - self.feature_means) / self.feature_scales
        return float(self.weights @ z + self.bias)

    @property
    def original_coefficients(self) -> np.ndarray:
        """Weights expressed against the raw (unstandardized) features."""
        return self.weights / self.feature_scales

    @property
    def original_intercept(self) -> float:
        return self.bias - float(self.weights @ (self.feature_means / self.feature_scales))

    def save(self, path) -> None:
        payload = {
            "kind": "linear_model",
            "version": 1,
            "weights": [repr(float(w)) for w in self.weights],
            "bias": repr(self.bias),
            "feature_means": [repr(float(m)) for m in self.feature_means],
            "feature_scales": [repr(float(s)) for s in self.feature_scales],
            "ridge_lambda": repr(self.ridge_lambda),
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "LinearModel":
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        if payload.get("kind") != "linear_model":
            raise ValueError(f"{path}: not a linear-model checkpoint")
        return cls(
            weights=np.array([float(w) for w in payload["weights"]]),
            bias=float(payload["bias"]),
            feature_means=np.array([float(m) for m in payload["feature_means"]]),
            feature_scales=np.array([float(s) for s in payload["feature_scales"]]),
            ridge_lambda=float(payload["ridge_lambda"]),
        )


def fit_ridge_regression(X: np.ndarray, y: np.ndarray, ridge_lambda: float = 1.0) -> LinearModel:
    """Solve (XsᵀXs + λI)w = Xsᵀ(y − ȳ) exactly on standardized features.

    The bias is the label mean and is never penalized. Constant feature
    columns get scale 1 (their standardized values are all zero).
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("need a 2-D feature matrix with at least 2 rows")
    if X.shape[0] != y.shape[0]:
        raise ValueError(f"row mismatch: {X.shape[0]} features vs {y.shape[0]} labels")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("features and labels must be finite")
    if ridge_lambda < 0:
        raise ValueError("ridge_lambda must be >= 0")

    means = X.mean(axis=0)
    scales = X.std(axis=0)
    scales = np.where(scales == 0.0, 1.0, scales)
    Xs = (X - means) / scales
    y_mean = float(y.mean())

    gram = Xs.T @ Xs + ridge_lambda * np.eye(X.shape[1])
    rhs = Xs.T @ (y - y_mean)
    if ridge_lambda == 0.0 and np.linalg.matrix_rank(gram) < X.shape[1]:
        raise ValueError("singular normal equations at lambda=0; set ridge_lambda > 0")
    weights = np.linalg.solve(gram, rhs)
    return LinearModel(
        weights=weights,
        bias=y_mean,
        feature_means=means,
        feature_scales=scales,
        ridge_lambda=float(ridge_lambda),
    )


def predict_word_complexity(model: LinearModel, features: WordFeatures) -> float:
    """Linear prediction clamped to the 0..4 scale."""
    return float(np.clip(model.predict(features.to_vector()), 0.0, 4.0))


# ---------------------------------------------------------------------------
# Min-max baselines
# ---------------------------------------------------------------------------

BASELINE_KINDS = ("length", "frequency")


@dataclass(frozen=True)
class BaselineStats:
    """Training-set feature range for a min-max baseline."""

    kind: str
    minimum: float
    maximum: float


def _baseline_feature(kind: str, word: str, counts: WordLevelCounts | None) -> float:
    if kind == "length":
        return float(len(word))
    if kind == "frequency":
        if counts is None:
            raise ValueError("frequency baseline needs word-level counts")
        return math.log(counts.total(word) + 1)
    raise ValueError(f"unknown baseline kind {kind!r}")


def fit_baseline(kind: str, words: list[str], counts: WordLevelCounts | None = None) -> BaselineStats:
    if not words:
        raise ValueError("no training words for baseline")
    values = [_baseline_feature(kind, w, counts) for w in words]
    return BaselineStats(kind=kind, minimum=min(values), maximum=max(values))


def baseline_predict(stats: BaselineStats, word: str, counts: WordLevelCounts | None = None) -> float:
    """Min-max normalize the feature into [0,4]; degenerate range -> 2.0."""
    if stats.maximum == stats.minimum:
        return 2.0
    x = _baseline_feature(stats.kind, word, counts)
    scaled = 4.0 * (x - stats.minimum) / (stats.maximum - stats.minimum)
    return float(np.clip(scaled, 0.0, 4.0))


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegressionReport:
    pearson: float
    mse: float


def pearson_r(a: np.ndarray, b: np.ndarray) -> float:
    """Pearson correlation; 0.0 by convention when ``a`` is constant."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    da = a - a.mean()
    db = b - b.mean()
    denom = math.sqrt(float(da @ da) * float(db @ db))
    if denom == 0.0:
        return 0.0
    return float(np.clip(float(da @ db) / denom, -1.0, 1.0))


def evaluate_predictor(predictions, gold) -> RegressionReport:
    """Pearson correlation and mean squared error against gold scores."""
    p = np.asarray(predictions, dtype=float)
    g = np.asarray(gold, dtype=float)
    if p.shape != g.shape or p.ndim != 1 or p.size < 2:
        raise ValueError("predictions and gold must be equal-length 1-D, length >= 2")
    if np.all(g == g[0]):
        raise ValueError("gold labels have zero variance; correlation undefined")
    mse = float(np.mean((p - g) ** 2))
    return RegressionReport(pearson=pearson_r(p, g), mse=mse)


# ---------------------------------------------------------------------------
# Sentence-level CNN regressor
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CNNConfig:
    n_filters: int = 32
    learning_rate: float = 0.02
    epochs: int = 30
    batch_size: int = 16
    max_grad_norm: float = 5.0
    seed: int = 0


class SentenceCNN:
    """Continuous sentence-complexity regressor.

    Convolutions of widths 3/4/5 (``n_filters`` each) run over fixed
    word embeddings, pass through tanh, max-pool over time, and feed a
    linear head. Trailing pad tokens are stripped before the forward
    pass, so padding a sentence never changes its score; sentences
    shorter than the widest filter are zero-padded up to width 5.
    """

    def __init__(self, embeddings: EmbeddingTable, config: CNNConfig | None = None):
        self.config = config or CNNConfig()
        self.embeddings = embeddings
        d = embeddings.dimension
        nf = self.config.n_filters
        rng = np.random.default_rng(self.config.seed)
        self.filters = {
            k: rng.normal(0.0, 1.0 / math.sqrt(k * d), size=(nf, k * d)) for k in CNN_WIDTHS
        }
        self.filter_bias = {k: np.zeros(nf) for k in CNN_WIDTHS}
        self.head_weights = rng.normal(0.0, 1.0 / math.sqrt(3 * nf), size=3 * nf)
        self.head_bias = 0.0
        self.final_loss: float | None = None

    # -- forward / backward -------------------------------------------------

    def _sentence_matrix(self, tokens) -> np.ndarray:
        toks = list(tokens)
        while toks and toks[-1] == PAD_TOKEN:
            toks.pop()
        if not toks:
            raise ValueError("cannot score an empty sentence")
        mat = np.stack([self.embeddings.get(t) for t in toks])
        width = max(CNN_WIDTHS)
        if mat.shape[0] < width:
            mat = np.vstack([mat, np.zeros((width - mat.shape[0], mat.shape[1]))])
        return mat

    def _windows(self, mat: np.ndarray, k: int) -> np.ndarray:
        n = mat.shape[0] - k + 1
        return np.stack([mat[i : i + k].ravel() for i in range(n)])

    def _forward(self, tokens):
        mat = self._sentence_matrix(tokens)
        cache = {}
        pooled = []
        for k in CNN_WIDTHS:
            win = self._windows(mat, k)
            act = np.tanh(win @ self.filters[k].T + self.filter_bias[k])
            best = act.argmax(axis=0)
            cache[k] = (win, act, best)
            pooled.append(act[best, np.arange(act.shape[1])])
        h = np.concatenate(pooled)
        y = float(self.head_weights @ h + self.head_bias)
        cache["h"] = h
        return y, cache

    def _backward(self, cache, dy: float, grads) -> None:
        h = cache["h"]
        grads["head_w"] += dy * h
        grads["head_b"] += dy
        dh = dy * self.head_weights
        nf = self.config.n_filters
        for idx, k in enumerate(CNN_WIDTHS):
            win, act, best = cache[k]
            dh_k = dh[idx * nf : (idx + 1) * nf]
            a = act[best, np.arange(nf)]
            dpre = dh_k * (1.0 - a * a)
            grads["W"][k] += dpre[:, None] * win[best]
            grads["b"][k] += dpre

    def _zero_grads(self):
        nf = self.config.n_filters
        d = self.embeddings.dimension
        return {
            "W": {k: np.zeros((nf, k * d)) for k in CNN_WIDTHS},
            "b": {k: np.zeros(nf) for k in CNN_WIDTHS},
            "head_w": np.zeros(3 * nf),
            "head_b": 0.0,
        }

    # -- public API ----------------------------------------------------------

    def raw_score(self, tokens) -> float:
        y, _ = self._forward(tokens)
        return y

    def predict(self, tokens) -> float:
        return float(np.clip(self.raw_score(tokens), 0.0, 4.0))

    def mse(self, sentences, labels) -> float:
        errs = [self.raw_score(s) - t for s, t in zip(sentences, labels)]
        return float(np.mean(np.square(errs)))

    def fit(self, sentences, labels) -> "SentenceCNN":
        if len(sentences) != len(labels):
            raise ValueError("sentence/label count mismatch")
        if len(sentences) < 10:
            raise ValueError(f"need at least 10 labeled sentences, got {len(sentences)}")
        labels = np.asarray(labels, dtype=float)
        cfg = self.config
        rng = np.random.default_rng(cfg.seed + 1)
        order = np.arange(len(sentences))
        for epoch in range(cfg.epochs):
            rng.shuffle(order)
            for start in range(0, len(order), cfg.batch_size):
                batch = order[start : start + cfg.batch_size]
                grads = self._zero_grads()
                batch_loss = 0.0
                for i in batch:
                    y, cache = self._forward(sentences[i])
                    err = y - labels[i]
                    batch_loss += err * err
                    self._backward(cache, 2.0 * err / len(batch), grads)
                if not math.isfinite(batch_loss):
                    raise RuntimeError(
                        f"non-finite training loss at epoch {epoch}: {batch_loss!r}; "
                        "lower the learning rate"
                    )
                sq = grads["head_b"] ** 2 + float(grads["head_w"] @ grads["head_w"])
                for k in CNN_WIDTHS:
                    sq += float((grads["W"][k] ** 2).sum()) + float(grads["b"][k] @ grads["b"][k])
                norm = math.sqrt(sq)
                clip = min(1.0, cfg.max_grad_norm / norm) if norm > 0 else 1.0
                lr = cfg.learning_rate * clip
                for k in CNN_WIDTHS:
                    self.filters[k] -= lr * grads["W"][k]
                    self.filter_bias[k] -= lr * grads["b"][k]
                self.head_weights -= lr * grads["head_w"]
                self.head_bias -= lr * grads["head_b"]
        self.final_loss = self.mse(sentences, labels)
        return self

    # -- persistence ----------------------------------------------------------

    def save(self, path) -> None:
        arrays = {f"W{k}": self.filters[k] for k in CNN_WIDTHS}
        arrays.update({f"b{k}": self.filter_bias[k] for k in CNN_WIDTHS})
        arrays["head_w"] = self.head_weights
        arrays["head_b"] = np.array([self.head_bias])
        arrays["meta"] = np.array(
            [
                self.config.n_filters,
                self.embeddings.dimension,
                self.config.seed,
            ],
            dtype=np.int64,
        )
        np.savez(path, **arrays)

    @classmethod
    def load(cls, path, embeddings: EmbeddingTable) -> "SentenceCNN":
        data = np.load(path)
        n_filters, dim, seed = (int(x) for x in data["meta"])
        if dim != embeddings.dimension:
            raise ValueError(
                f"checkpoint expects {dim}-d embeddings, table has {embeddings.dimension}"
            )
        model = cls(embeddings, CNNConfig(n_filters=n_filters, seed=seed))
        for k in CNN_WIDTHS:
            model.filters[k] = data[f"W{k}"]
            model.filter_bias[k] = data[f"b{k}"]
        model.head_weights = data["head_w"]
        model.head_bias = float(data["head_b"][0])
        return model


def fit_sentence_cnn(
    pairs: list[tuple[tuple[str, ...], int]],
    embeddings: EmbeddingTable,
    config: CNNConfig | None = None,
) -> SentenceCNN:
    """Train the CNN on ``(tokens, level)`` pairs with an MSE objective."""
    sentences = [p[0] for p in pairs]
    labels = [float(p[1]) for p in pairs]
    return SentenceCNN(embeddings, config).fit(sentences, labels)


def predict_sentence_complexity(model: SentenceCNN, tokens) -> float:
    return model.predict(tokens)
