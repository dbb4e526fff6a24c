"""Interpolated Kneser-Ney n-gram language model (default order 5).

Counts at the highest order are raw n-gram counts over sentences padded
with order-1 begin markers and one end marker. Every lower order uses
continuation counts (distinct left extensions observed one level up).
One absolute discount per order is estimated as D = n1/(n1+2*n2) from
that order's count-of-counts, falling back to 0.75 when n1 or n2 is
zero. Below the unigram level sits a uniform distribution over the
output vocabulary (training types + end marker + unknown token), which
is where unseen and unknown tokens get their mass.

Probabilities are stored in backoff form: a log-probability per
observed n-gram and a log-backoff weight per observed context, so that

    p(w | h) = p_stored(h·w)                   if h·w observed
             = backoff(h) * p(w | h[1:])       otherwise

with backoff(h) = 1 for unseen contexts. Because every stored count is
at least 1 and the discount is below 1, each context distribution sums
to exactly 1.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .corpus import BOS, EOS, UNK

_FALLBACK_DISCOUNT = 0.75


def _estimate_discount(counts: dict[tuple, int]) -> float:
    n1 = sum(1 for c in counts.values() if c == 1)
    n2 = sum(1 for c in counts.values() if c == 2)
    if n1 == 0 or n2 == 0:
        return _FALLBACK_DISCOUNT
    return n1 / (n1 + 2 * n2)


@dataclass
class KNModel:
    """Trained Kneser-Ney model in backoff-table form."""

    order: int
    logprob: dict[int, dict[tuple, float]]
    logbackoff: dict[int, dict[tuple, float]]
    log_p0: float
    vocabulary: tuple[str, ...]  # predictable tokens: types + EOS + UNK
    discounts: dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        self._known = frozenset(self.vocabulary)

    def normalize_token(self, token: str) -> str:
        return token if token in self._known else UNK

    def gram_logprob(self, gram: tuple[str, ...]) -> float:
        """Backoff-chain log probability of gram[-1] given gram[:-1]."""
        k = len(gram)
        hit = self.logprob.get(k, {}).get(gram)
        if hit is not None:
            return hit
        if k == 1:
            return self.logbackoff[1][()] + self.log_p0
        bw = self.logbackoff.get(k, {}).get(gram[:-1], 0.0)
        return bw + self.gram_logprob(gram[1:])

    # -- persistence --------------------------------------------------------

    def save(self, path) -> None:
        """Sorted text dump, one record per line:
        ``order<TAB>ngram<TAB>logprob<TAB>backoff``.

        The ngram field is space-joined. Lines with order 0 carry model
        metadata (``__order__``, ``__log_p0__``, ``__vocab__``,
        ``__discount_k__``). A field is ``-`` when absent: grams that
        are contexts only have no logprob; grams that never act as a
        context have no backoff. Floats print via repr, so reading the
        file back reproduces every value bit for bit.
        """
        lines = [
            f"0\t__order__\t{self.order}\t-",
            f"0\t__log_p0__\t{self.log_p0!r}\t-",
            f"0\t__vocab__\t{' '.join(self.vocabulary)}\t-",
        ]
        for k in sorted(self.discounts):
            lines.append(f"0\t__discount_{k}__\t{self.discounts[k]!r}\t-")
        for k in range(1, self.order + 1):
            keys = set(self.logprob.get(k, {})) | set(
                h for h in self.logbackoff.get(k + 1, {}) if len(h) == k
            )
            if k == 1 and () in self.logbackoff.get(1, {}):
                lines.append(f"0\t__root_backoff__\t{self.logbackoff[1][()]!r}\t-")
            for gram in sorted(keys):
                lp = self.logprob.get(k, {}).get(gram)
                bw = self.logbackoff.get(k + 1, {}).get(gram)
                lines.append(
                    "\t".join(
                        (
                            str(k),
                            " ".join(gram),
                            "-" if lp is None else repr(lp),
                            "-" if bw is None else repr(bw),
                        )
                    )
                )
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path) -> "KNModel":
        order = None
        log_p0 = None
        vocab: tuple[str, ...] = ()
        discounts: dict[int, float] = {}
        root_backoff = None
        records: list[tuple[int, tuple, float | None, float | None]] = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 4:
                    raise ValueError(f"{path}:{lineno}: expected 4 tab-separated fields")
                k_s, gram_s, lp_s, bw_s = parts
                k = int(k_s)
                if k == 0:
                    if gram_s == "__order__":
                        order = int(lp_s)
                    elif gram_s == "__log_p0__":
                        log_p0 = float(lp_s)
                    elif gram_s == "__vocab__":
                        vocab = tuple(lp_s.split(" "))
                    elif gram_s == "__root_backoff__":
                        root_backoff = float(lp_s)
                    elif gram_s.startswith("__discount_"):
                        discounts[int(gram_s[len("__discount_") : -2])] = float(lp_s)
                    else:
                        raise ValueError(f"{path}:{lineno}: unknown metadata {gram_s!r}")
                    continue
                records.append(
                    (
                        k,
                        tuple(gram_s.split(" ")),
                        None if lp_s == "-" else float(lp_s),
                        None if bw_s == "-" else float(bw_s),
                    )
                )
        if order is None or log_p0 is None or not vocab or root_backoff is None:
            raise ValueError(f"{path}: missing model metadata lines")
        logprob: dict[int, dict[tuple, float]] = {k: {} for k in range(1, order + 1)}
        logbackoff: dict[int, dict[tuple, float]] = {k: {} for k in range(1, order + 1)}
        logbackoff[1][()] = root_backoff
        for k, gram, lp, bw in records:
            if lp is not None:
                logprob[k][gram] = lp
            if bw is not None:
                logbackoff[k + 1][gram] = bw
        return cls(
            order=order,
            logprob=logprob,
            logbackoff=logbackoff,
            log_p0=log_p0,
            vocabulary=vocab,
            discounts=discounts,
        )


def train_kn_model(sentences, order: int = 5) -> KNModel:
    """Estimate an interpolated Kneser-Ney model from token lists."""
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    corpus = [tuple(s) for s in sentences if s]
    if not corpus:
        raise ValueError("need at least one non-empty training sentence")

    # Raw counts at the top; continuation counts below.
    tables: dict[int, dict[tuple, int]] = {}
    top = Counter()
    for sent in corpus:
        padded = (BOS,) * (order - 1) + sent + (EOS,)
        for i in range(len(padded) - order + 1):
            top[padded[i : i + order]] += 1
    tables[order] = dict(top)
    for k in range(order - 1, 0, -1):
        lefts: dict[tuple, set] = defaultdict(set)
        for gram in tables[k + 1]:
            lefts[gram[1:]].add(gram[0])
        tables[k] = {g: len(s) for g, s in lefts.items()}

    discounts = {k: _estimate_discount(tables[k]) for k in range(1, order + 1)}

    vocab = tuple(sorted(w for (w,) in tables[1])) + (UNK,)
    log_p0 = -math.log(len(vocab))
    p0 = 1.0 / len(vocab)

    logprob: dict[int, dict[tuple, float]] = {k: {} for k in range(1, order + 1)}
    logbackoff: dict[int, dict[tuple, float]] = {k: {} for k in range(1, order + 1)}

    # Unigram level interpolates with the uniform floor.
    total = sum(tables[1].values())
    distinct = len(tables[1])
    d1 = discounts[1]
    backoff_mass = d1 * distinct / total
    logbackoff[1][()] = math.log(backoff_mass)
    for gram, c in tables[1].items():
        logprob[1][gram] = math.log((c - d1) / total + backoff_mass * p0)

    for k in range(2, order + 1):
        ctx_total: dict[tuple, int] = defaultdict(int)
        ctx_distinct: dict[tuple, int] = defaultdict(int)
        for gram, c in tables[k].items():
            ctx_total[gram[:-1]] += c
            ctx_distinct[gram[:-1]] += 1
        dk = discounts[k]
        for ctx in ctx_total:
            logbackoff[k][ctx] = math.log(dk * ctx_distinct[ctx] / ctx_total[ctx])
        for gram, c in tables[k].items():
            ctx = gram[:-1]
            bw = dk * ctx_distinct[ctx] / ctx_total[ctx]
            # The suffix of an observed k-gram is always observed at k-1.
            p_lower = math.exp(logprob[k - 1][gram[1:]])
            logprob[k][gram] = math.log((c - dk) / ctx_total[ctx] + bw * p_lower)

    return KNModel(
        order=order,
        logprob=logprob,
        logbackoff=logbackoff,
        log_p0=log_p0,
        vocabulary=vocab,
        discounts=discounts,
    )


def ngram_logprob(model: KNModel, context, token: str) -> float:
    """log p(token | last order-1 context tokens), OOV mapped to <unk>.

    Begin markers in the context pass through untouched; any other
    unseen token (including the markers appearing as the *predicted*
    token) maps to the unknown type.
    """
    ctx = tuple(t if t == BOS else model.normalize_token(t) for t in context)
    if len(ctx) > model.order - 1:
        ctx = ctx[len(ctx) - (model.order - 1) :]
    return model.gram_logprob(ctx + (model.normalize_token(token),))


def sentence_perplexity(model: KNModel, sentence) -> float:
    """exp(-mean log p) over the tokens plus the end marker."""
    tokens = list(sentence)
    if not tokens:
        raise ValueError("cannot compute perplexity of an empty sentence")
    history = [BOS] * (model.order - 1)
    logps = []
    for tok in tokens + [EOS]:
        logps.append(ngram_logprob(model, history, tok))
        if model.order > 1:
            history = (history + [model.normalize_token(tok)])[-(model.order - 1) :]
    n = len(tokens) + 1
    return math.exp(-math.fsum(logps) / n)
