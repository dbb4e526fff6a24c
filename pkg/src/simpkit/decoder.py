"""Beam search with a sibling-rank diversity penalty.

The decoder is generic over a :class:`SequenceScorer`: anything mapping
(source tokens, prefix tokens) to a normalized log-probability vector
over a fixed vocabulary that includes the end marker. At every step each
live hypothesis proposes its top-b continuations ranked 1..b by
log-probability, and a proposal's selection score is

    parent_selection + token_logprob - rank * delta

so lower-ranked siblings pay an increasing penalty and the surviving
beam is pushed toward different parents. Penalties only ever steer the
search: the penalty-free joint log-probability is kept alongside and
decides the final ordering.

``max_len`` bounds the total sequence length including the end marker.
Hypotheses that still lack it when the length budget runs out get the
marker appended (scored with its true log-probability) and are flagged
as forced.
"""

from __future__ import annotations

import json
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from .corpus import EOS


class SequenceScorer(ABC):
    """Conditional next-token distribution over a fixed vocabulary.

    ``vocab`` must contain the end marker; ``logprobs`` must return a
    finite vector of length ``len(vocab)`` whose exponentials sum to 1,
    and must be deterministic for fixed inputs.
    """

    vocab: tuple[str, ...]

    @abstractmethod
    def logprobs(self, source, prefix) -> np.ndarray:
        raise NotImplementedError

    def eos_id(self) -> int:
        return self.vocab.index(EOS)


def checked_logprobs(scorer: SequenceScorer, source, prefix) -> np.ndarray:
    """Fetch scorer output and verify it is a normalized log distribution."""
    lps = np.asarray(scorer.logprobs(source, prefix), dtype=float)
    if lps.shape != (len(scorer.vocab),):
        raise ValueError(
            f"scorer returned shape {lps.shape}, expected ({len(scorer.vocab)},)"
        )
    if not np.all(np.isfinite(lps)):
        raise ValueError("scorer returned non-finite log-probabilities")
    m = lps.max()
    lse = m + np.log(np.exp(lps - m).sum())
    if abs(lse) > 1e-6:
        raise ValueError(f"scorer distribution not normalized (logsumexp={lse:.2e})")
    return lps


@dataclass(frozen=True)
class Hypothesis:
    """One (possibly finished) decoded sequence.

    ``raw_logprob`` is the plain joint log-probability; ``selection_score``
    is what the beam ranked on (raw minus accumulated diversity
    penalties). ``forced_eos`` marks sequences finalized at the length
    limit rather than by the model.
    """

    tokens: tuple[str, ...]
    raw_logprob: float
    penalty_accum: float
    selection_score: float
    parent_index: int
    finished: bool
    forced_eos: bool = False

    def text(self) -> str:
        body = self.tokens[:-1] if self.tokens and self.tokens[-1] == EOS else self.tokens
        return " ".join(body)


@dataclass(frozen=True)
class DecodeParams:
    beam_width: int = 8
    delta: float = 1.0
    max_len: int = 24
    seed: int = 0

    def __post_init__(self):
        if self.beam_width < 1:
            raise ValueError("beam_width must be >= 1")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")
        if self.max_len < 1:
            raise ValueError("max_len must be >= 1")


_ROOT = Hypothesis(
    tokens=(),
    raw_logprob=0.0,
    penalty_accum=0.0,
    selection_score=0.0,
    parent_index=0,
    finished=False,
)


def _final_order(hyps: list[Hypothesis]) -> list[Hypothesis]:
    return sorted(hyps, key=lambda h: (-h.raw_logprob, h.tokens))


def diverse_beam_search(
    scorer: SequenceScorer,
    source,
    params: DecodeParams,
    accumulate_penalties: bool = True,
) -> list[Hypothesis]:
    """Beam search under the sibling-rank penalty; see module docstring.

    Ties in selection score break toward the lower parent index, then
    the lower token id; sibling ranking ties break toward the lower
    token id. With ``accumulate_penalties=False`` each step's selection
    score restarts from the parent's raw log-probability, the
    non-compounding reading of the penalty.
    """
    b = params.beam_width
    eos = scorer.eos_id()
    live = [_ROOT]
    finished: list[Hypothesis] = []
    # Expand up to max_len - 1 tokens; the last slot is reserved for EOS.
    for _ in range(params.max_len - 1):
        if not live or len(finished) >= b:
            break
        # (selection, parent_index, token_id, raw, penalty_accum)
        proposals: list[tuple[float, int, int, float, float]] = []
        for pi, hyp in enumerate(live):
            lps = checked_logprobs(scorer, source, hyp.tokens)
            top = np.argsort(-lps, kind="stable")[:b]
            for rank, tid in enumerate(top, start=1):
                step_penalty = rank * params.delta
                raw = hyp.raw_logprob + lps[tid]
                if accumulate_penalties:
                    sel = hyp.selection_score + lps[tid] - step_penalty
                    pen = hyp.penalty_accum + step_penalty
                else:
                    sel = hyp.raw_logprob + lps[tid] - step_penalty
                    pen = step_penalty
                proposals.append((sel, pi, int(tid), float(raw), pen))
        proposals.sort(key=lambda c: (-c[0], c[1], c[2]))
        next_live: list[Hypothesis] = []
        for sel, pi, tid, raw, pen in proposals[:b]:
            hyp = Hypothesis(
                tokens=live[pi].tokens + (scorer.vocab[tid],),
                raw_logprob=raw,
                penalty_accum=pen,
                selection_score=sel,
                parent_index=pi,
                finished=tid == eos,
            )
            (finished if hyp.finished else next_live).append(hyp)
        live = next_live
    if len(finished) < b:
        for pi, hyp in enumerate(live):
            lps = checked_logprobs(scorer, source, hyp.tokens)
            finished.append(
                Hypothesis(
                    tokens=hyp.tokens + (EOS,),
                    raw_logprob=hyp.raw_logprob + float(lps[eos]),
                    penalty_accum=hyp.penalty_accum,
                    selection_score=hyp.selection_score + float(lps[eos]),
                    parent_index=pi,
                    finished=True,
                    forced_eos=True,
                )
            )
    return _final_order(finished)[:b]


def greedy_decode(scorer: SequenceScorer, source, max_len: int) -> Hypothesis:
    """Always take the argmax token (lowest id on ties) until the end
    marker appears or the length budget forces it."""
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    eos = scorer.eos_id()
    tokens: tuple[str, ...] = ()
    raw = 0.0
    for _ in range(max_len - 1):
        lps = checked_logprobs(scorer, source, tokens)
        tid = int(np.argmax(lps))
        tokens += (scorer.vocab[tid],)
        raw += float(lps[tid])
        if tid == eos:
            return Hypothesis(tokens, raw, 0.0, raw, 0, finished=True)
    lps = checked_logprobs(scorer, source, tokens)
    raw += float(lps[eos])
    return Hypothesis(tokens + (EOS,), raw, 0.0, raw, 0, finished=True, forced_eos=True)


def exhaustive_decode(scorer: SequenceScorer, source, max_len: int) -> list[Hypothesis]:
    """Enumerate every sequence of total length <= max_len that ends in
    the end marker, ranked by joint log-probability. Test oracle."""
    v = len(scorer.vocab)
    if v**max_len > 1_000_000:
        raise ValueError(f"search space {v}^{max_len} exceeds the 1e6 bound")
    eos = scorer.eos_id()
    out: list[Hypothesis] = []

    def expand(prefix: tuple[str, ...], raw: float) -> None:
        lps = checked_logprobs(scorer, source, prefix)
        out.append(
            Hypothesis(
                tokens=prefix + (EOS,),
                raw_logprob=raw + float(lps[eos]),
                penalty_accum=0.0,
                selection_score=raw + float(lps[eos]),
                parent_index=0,
                finished=True,
            )
        )
        if len(prefix) + 1 < max_len:
            for tid, tok in enumerate(scorer.vocab):
                if tid != eos:
                    expand(prefix + (tok,), raw + float(lps[tid]))

    expand((), 0.0)
    return _final_order(out)


# ---------------------------------------------------------------------------
# Deterministic scorers for tests and desk experiments
# ---------------------------------------------------------------------------


def log_softmax(logits: np.ndarray) -> np.ndarray:
    z = np.asarray(logits, dtype=float)
    z = z - z.max()
    return z - np.log(np.exp(z).sum())


class TableScorer(SequenceScorer):
    """Scorer backed by an explicit prefix -> probability-vector table.

    Prefixes absent from the table fall back to the uniform
    distribution. Probabilities are normalized on construction.
    """

    def __init__(self, vocab, table: dict[tuple, list] | None = None):
        self.vocab = tuple(vocab)
        if EOS not in self.vocab:
            raise ValueError("vocabulary must include the end marker")
        self._table: dict[tuple, np.ndarray] = {}
        for prefix, probs in (table or {}).items():
            p = np.asarray(probs, dtype=float)
            if p.shape != (len(self.vocab),) or np.any(p <= 0):
                raise ValueError(f"bad probability row for prefix {prefix!r}")
            self._table[tuple(prefix)] = np.log(p / p.sum())
        self._uniform = np.full(len(self.vocab), -np.log(len(self.vocab)))

    def logprobs(self, source, prefix) -> np.ndarray:
        return self._table.get(tuple(prefix), self._uniform)


class RandomTableScorer(SequenceScorer):
    """Pseudo-random but fully deterministic scorer.

    The distribution for (source, prefix) is seeded from a stable hash
    of the seed and both token sequences, so results are reproducible
    across processes and platforms.
    """

    def __init__(self, vocab, seed: int = 0, concentration: float = 1.0):
        self.vocab = tuple(vocab)
        if EOS not in self.vocab:
            raise ValueError("vocabulary must include the end marker")
        self.seed = seed
        self.concentration = concentration

    def logprobs(self, source, prefix) -> np.ndarray:
        import hashlib

        key = "\x1f".join(
            [str(self.seed), "\x1e".join(source), "\x1e".join(prefix)]
        ).encode("utf-8")
        digest = hashlib.blake2b(key, digest_size=8).digest()
        rng = np.random.default_rng(int.from_bytes(digest, "big"))
        logits = rng.normal(scale=self.concentration, size=len(self.vocab))
        return log_softmax(logits)


# ---------------------------------------------------------------------------
# Candidate dumps (JSON lines)
# ---------------------------------------------------------------------------


def write_candidates_jsonl(path, records: list[tuple[list[str], list[Hypothesis]]]) -> None:
    """One JSON object per source: its text and the decoded candidates.

    Candidate token lists are stored without the end marker; log
    probabilities include it.
    """
    with open(path, "w", encoding="utf-8") as fh:
        for source, hyps in records:
            obj = {
                "source": " ".join(source),
                "candidates": [
                    {
                        "tokens": list(h.tokens[:-1] if h.tokens and h.tokens[-1] == EOS else h.tokens),
                        "logprob": h.raw_logprob,
                    }
                    for h in hyps
                ],
            }
            fh.write(json.dumps(obj, sort_keys=True) + "\n")


def read_candidates_jsonl(path) -> list[tuple[list[str], list[dict]]]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            records.append((obj["source"].split(), obj["candidates"]))
    return records
