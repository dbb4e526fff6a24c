"""Candidate post-processing: clustering, scoring, reranking, selection.

The decoder hands over up to b candidates per source sentence. They are
clustered in sentence-vector space (k-means++, Lloyd iterations) and
one representative per cluster survives; representatives are then
scored for fluency (n-gram perplexity), adequacy (cosine to the source
vector), and simplicity (predicted sentence complexity), each min-max
normalized within the candidate set -- fluency and simplicity inverted
so higher is always better -- and combined linearly. A length-matched
selector supports picking the best candidate near a target length.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .corpus import EOS
from .embeddings import SentenceVector, cosine_similarity
from .metrics import token_edit_distance
from .ngram_lm import KNModel, sentence_perplexity


@dataclass(frozen=True)
class Candidate:
    tokens: tuple[str, ...]
    raw_logprob: float
    vector: SentenceVector

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("candidate must have at least one token")


@dataclass(frozen=True)
class ScoredCandidate:
    """Candidate with raw and normalized fluency/adequacy/simplicity."""

    candidate: Candidate
    f_raw: float  # perplexity (lower = more fluent)
    a_raw: float  # cosine to source (higher = more adequate)
    s_raw: float  # predicted complexity (lower = simpler)
    f: float = 0.0
    a: float = 0.0
    s: float = 0.0
    final: float = 0.0


@dataclass(frozen=True)
class RerankWeights:
    beta_f: float
    beta_a: float
    beta_s: float

    def __post_init__(self):
        betas = (self.beta_f, self.beta_a, self.beta_s)
        if any(b < 0 for b in betas):
            raise ValueError("reranking weights must be non-negative")
        if abs(sum(betas) - 1.0) > 1e-9:
            raise ValueError(f"reranking weights must sum to 1, got {betas}")


FAS_WEIGHTS = RerankWeights(1 / 3, 1 / 3, 1 / 3)
FA_WEIGHTS = RerankWeights(0.5, 0.5, 0.0)


@dataclass(frozen=True)
class ClusterConfig:
    k: int = 20
    max_iters: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")


# ---------------------------------------------------------------------------
# k-means
# ---------------------------------------------------------------------------


def _plusplus_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centroids = np.empty((k, X.shape[1]))
    centroids[0] = X[rng.integers(n)]
    d2 = ((X - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total == 0.0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centroids[j] = X[idx]
        d2 = np.minimum(d2, ((X - centroids[j]) ** 2).sum(axis=1))
    return centroids


def kmeans_objective(X: np.ndarray, assignments: np.ndarray, centroids: np.ndarray) -> float:
    return float(((X - centroids[assignments]) ** 2).sum())


def kmeans_cluster(
    vectors, config: ClusterConfig, history: list | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """k-means++ then Lloyd iterations to an assignment fixpoint.

    Ties assign to the lowest cluster index. A cluster that loses all
    members is re-seeded at the point currently farthest from its own
    centroid. ``history``, if given, collects the objective after every
    assignment. k is silently reduced to the number of points.
    """
    X = np.stack([np.asarray(v, dtype=float) for v in vectors])
    n = X.shape[0]
    k = min(config.k, n)
    rng = np.random.default_rng(config.seed)
    centroids = _plusplus_init(X, k, rng)
    dist2 = ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    assignments = dist2.argmin(axis=1)
    if history is not None:
        history.append(kmeans_objective(X, assignments, centroids))
    for _ in range(config.max_iters):
        used = set()
        point_err = ((X - centroids[assignments]) ** 2).sum(axis=1)
        for j in range(k):
            members = assignments == j
            if members.any():
                centroids[j] = X[members].mean(axis=0)
            else:
                order = np.argsort(-point_err, kind="stable")
                pick = next(int(i) for i in order if int(i) not in used)
                used.add(pick)
                centroids[j] = X[pick]
        dist2 = ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_assignments = dist2.argmin(axis=1)
        if history is not None:
            history.append(kmeans_objective(X, new_assignments, centroids))
        if np.array_equal(new_assignments, assignments):
            break
        assignments = new_assignments
    return assignments, centroids


def select_representatives(
    candidates: list[Candidate], config: ClusterConfig
) -> list[Candidate]:
    """One candidate per non-empty cluster: the member nearest its
    centroid (ties: higher raw_logprob, then earlier input position).
    Output keeps the input ordering."""
    if not candidates:
        return []
    X = [c.vector.values for c in candidates]
    assignments, centroids = kmeans_cluster(X, config)
    chosen: list[int] = []
    for j in range(centroids.shape[0]):
        members = [i for i, a in enumerate(assignments) if a == j]
        if not members:
            continue
        best = min(
            members,
            key=lambda i: (
                float(((candidates[i].vector.values - centroids[j]) ** 2).sum()),
                -candidates[i].raw_logprob,
                i,
            ),
        )
        chosen.append(best)
    return [candidates[i] for i in sorted(chosen)]


def candidates_from_hypotheses(hypotheses, embed_fn) -> list[Candidate]:
    """Strip end markers and embed each decoded hypothesis.

    Hypotheses that are nothing but an end marker are dropped.
    """
    out = []
    for h in hypotheses:
        tokens = h.tokens[:-1] if h.tokens and h.tokens[-1] == EOS else h.tokens
        if not tokens:
            continue
        out.append(
            Candidate(
                tokens=tuple(tokens),
                raw_logprob=h.raw_logprob,
                vector=embed_fn(list(tokens)),
            )
        )
    return out


# ---------------------------------------------------------------------------
# Scoring and reranking
# ---------------------------------------------------------------------------


def score_candidates(
    candidates: list[Candidate],
    source,
    lm: KNModel,
    embed_fn,
    sent_model,
) -> list[ScoredCandidate]:
    """Attach raw fluency/adequacy/simplicity scores to each candidate."""
    source_vec = embed_fn(list(source))
    scored = []
    for cand in candidates:
        scored.append(
            ScoredCandidate(
                candidate=cand,
                f_raw=sentence_perplexity(lm, cand.tokens),
                a_raw=cosine_similarity(source_vec.values, cand.vector.values),
                s_raw=sent_model.predict(cand.tokens),
            )
        )
    return scored


def _minmax(values: list[float], invert: bool) -> list[float]:
    lo, hi = min(values), max(values)
    if hi == lo:
        return [0.5] * len(values)
    if invert:
        return [(hi - v) / (hi - lo) for v in values]
    return [(v - lo) / (hi - lo) for v in values]


def normalize_and_rerank(
    scored: list[ScoredCandidate], weights: RerankWeights
) -> list[ScoredCandidate]:
    """Min-max normalize within the set and rank by the weighted sum.

    Perplexity and complexity are inverted so 1 is best everywhere; a
    component that is constant across the set contributes 0.5 to every
    candidate. Sort is by final score descending, ties broken by higher
    raw log-probability, then by tokens.
    """
    if not scored:
        raise ValueError("no candidates to rerank")
    fs = _minmax([sc.f_raw for sc in scored], invert=True)
    As = _minmax([sc.a_raw for sc in scored], invert=False)
    ss = _minmax([sc.s_raw for sc in scored], invert=True)
    out = []
    for sc, f, a, s in zip(scored, fs, As, ss):
        final = weights.beta_f * f + weights.beta_a * a + weights.beta_s * s
        out.append(replace(sc, f=f, a=a, s=s, final=final))
    return sorted(
        out, key=lambda sc: (-sc.final, -sc.candidate.raw_logprob, sc.candidate.tokens)
    )


def match_length_select(ranked: list[ScoredCandidate], target_len: int, offset: int = 0) -> ScoredCandidate:
    """Highest-ranked candidate whose length is closest to target+offset."""
    if not ranked:
        raise ValueError("no candidates to select from")
    goal = target_len + offset
    best_gap = min(abs(len(sc.candidate.tokens) - goal) for sc in ranked)
    for sc in ranked:
        if abs(len(sc.candidate.tokens) - goal) == best_gap:
            return sc
    raise AssertionError("unreachable")


def avg_pairwise_edit_distance(candidates) -> float:
    """Mean token-level Levenshtein distance over all unordered pairs."""
    seqs = [tuple(c.tokens) if hasattr(c, "tokens") else tuple(c) for c in candidates]
    if len(seqs) < 2:
        raise ValueError("need at least 2 candidates for pairwise distances")
    dists = [
        token_edit_distance(seqs[i], seqs[j])
        for i in range(len(seqs))
        for j in range(i + 1, len(seqs))
    ]
    return float(np.mean(dists))


# ---------------------------------------------------------------------------
# Scored dumps (JSON lines)
# ---------------------------------------------------------------------------


def write_scored_jsonl(path, records) -> None:
    """records: iterable of (source tokens, ranked ScoredCandidates,
    selected index into that ranking)."""
    with open(path, "w", encoding="utf-8") as fh:
        for source, ranked, selected in records:
            obj = {
                "source": " ".join(source),
                "candidates": [
                    {
                        "tokens": list(sc.candidate.tokens),
                        "logprob": sc.candidate.raw_logprob,
                        "ppl": sc.f_raw,
                        "cos": sc.a_raw,
                        "complexity": sc.s_raw,
                        "final": sc.final,
                    }
                    for sc in ranked
                ],
                "selected": selected,
            }
            fh.write(json.dumps(obj, sort_keys=True) + "\n")


def read_scored_jsonl(path) -> list[dict]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out
