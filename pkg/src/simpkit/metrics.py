"""Simplification metrics: SARI, FKGL, TER with block shifts.

SARI follows the released reference implementation's arithmetic --
n-gram Counters with source/candidate counts replicated by the number
of references, keep scored as F1 with reference-count weighting, add as
set-based F1, delete as precision only -- with two documented
departures that make the metric behave sanely on tiny inputs:

* An operation whose candidate-side and reference-side n-gram sets are
  both empty scores 1 (there was nothing to do and nothing was done)
  instead of 0.
* The good-deletion count for gram g is min(deleted_by_candidate,
  deleted_by_references) instead of a count subtraction, so deleting
  exactly what the references delete is never penalized.

Together these guarantee a candidate identical to the sole reference
scores 100.00 exactly.

TER counts insertions, deletions, substitutions, and block shifts
(cost 1 each) divided by reference length. Shifts are greedy: while
some movable block (one that matches a contiguous reference substring)
strictly reduces the remaining Levenshtein distance, apply the
best-reducing one.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .complexity import count_syllables
from .corpus import is_punctuation

MAX_SARI_N = 4


def _ngrams(tokens, n: int) -> list[tuple]:
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


@dataclass(frozen=True)
class SariResult:
    """Per-n component scores (index 0 -> n=1) in [0,1]; overall in [0,100]."""

    keep: tuple[float, float, float, float]
    delete: tuple[float, float, float, float]
    add: tuple[float, float, float, float]
    overall: float


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def _sari_components(sgrams, cgrams, rgramslist, numref) -> tuple[float, float, float]:
    rcount = Counter()
    for rgrams in rgramslist:
        rcount.update(rgrams)
    scount = Counter({g: c * numref for g, c in Counter(sgrams).items()})
    ccount = Counter({g: c * numref for g, c in Counter(cgrams).items()})

    # keep: n-grams retained from the source
    kept = scount & ccount
    kept_all = scount & rcount
    kept_good = kept & rcount
    if not kept and not kept_all:
        keep = 1.0
    else:
        precision = (
            sum(kept_good[g] / kept[g] for g in kept_good) / len(kept) if kept else 0.0
        )
        recall = (
            sum(kept_good[g] / kept_all[g] for g in kept_good) / len(kept_all)
            if kept_all
            else 0.0
        )
        keep = _f1(precision, recall)

    # delete: n-grams dropped from the source (precision only)
    deleted = scount - ccount
    deleted_all = scount - rcount
    if not deleted and not deleted_all:
        delete = 1.0
    elif not deleted:
        delete = 0.0
    else:
        good = {g: min(c, deleted_all[g]) for g, c in deleted.items() if deleted_all[g] > 0}
        delete = sum(good[g] / deleted[g] for g in good) / len(deleted)

    # add: n-grams introduced by the candidate (set-based)
    added = set(ccount) - set(scount)
    added_all = set(rcount) - set(scount)
    added_good = added & set(rcount)
    if not added and not added_all:
        add = 1.0
    else:
        precision = len(added_good) / len(added) if added else 0.0
        recall = len(added_good) / len(added_all) if added_all else 0.0
        add = _f1(precision, recall)

    return keep, delete, add


def sari(source, candidate, references) -> SariResult:
    """SARI of a candidate against the source and reference token lists."""
    source = list(source)
    candidate = list(candidate)
    references = [list(r) for r in references]
    if not source:
        raise ValueError("source sentence is empty")
    if not candidate:
        raise ValueError("candidate sentence is empty")
    if not references or any(not r for r in references):
        raise ValueError("need at least one non-empty reference")
    keeps, dels, adds = [], [], []
    for n in range(1, MAX_SARI_N + 1):
        k, d, a = _sari_components(
            _ngrams(source, n),
            _ngrams(candidate, n),
            [_ngrams(r, n) for r in references],
            len(references),
        )
        keeps.append(k)
        dels.append(d)
        adds.append(a)
    overall = 100.0 * (sum(keeps) / 4 + sum(dels) / 4 + sum(adds) / 4) / 3
    return SariResult(keep=tuple(keeps), delete=tuple(dels), add=tuple(adds), overall=overall)


def corpus_sari(sources, candidates, references_per_sentence) -> float:
    """Mean sentence-level SARI over a parallel corpus."""
    if not (len(sources) == len(candidates) == len(references_per_sentence)):
        raise ValueError("corpus lists must be parallel")
    scores = [
        sari(s, c, refs).overall
        for s, c, refs in zip(sources, candidates, references_per_sentence)
    ]
    return sum(scores) / len(scores)


# ---------------------------------------------------------------------------
# FKGL
# ---------------------------------------------------------------------------


def fkgl(corpus) -> float:
    """Flesch-Kincaid grade level of tokenized sentences.

    0.39*(words/sentences) + 11.8*(syllables/words) - 15.59, counting
    only non-punctuation tokens as words.
    """
    sentences = [list(s) for s in corpus]
    if not sentences:
        raise ValueError("empty corpus")
    n_words = 0
    n_syllables = 0
    for sent in sentences:
        for tok in sent:
            if is_punctuation(tok):
                continue
            n_words += 1
            n_syllables += count_syllables(tok)
    if n_words == 0:
        raise ValueError("corpus contains no words")
    return 0.39 * (n_words / len(sentences)) + 11.8 * (n_syllables / n_words) - 15.59


# ---------------------------------------------------------------------------
# Levenshtein and TER
# ---------------------------------------------------------------------------


def levenshtein_tokens(a, b) -> int:
    """Unit-cost token edit distance (insert/delete/substitute)."""
    a = tuple(a)
    b = tuple(b)
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ta in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        for j, tb in enumerate(b, start=1):
            cur[j] = min(
                prev[j] + 1,  # delete ta
                cur[j - 1] + 1,  # insert tb
                prev[j - 1] + (ta != tb),  # substitute
            )
        prev = cur
    return prev[-1]


# Alias used by the candidate-diversity statistics.
token_edit_distance = levenshtein_tokens


@dataclass(frozen=True)
class TerResult:
    edits: int
    shifts: int
    ref_length: int
    score: float


def _shift_moves(current: list, ref: tuple) -> list[tuple[int, int, int]]:
    """(i, j, p): move current[i:j] so it starts at p (post-removal index).

    Only blocks that appear as a contiguous reference substring are
    movable; shifting anything else cannot create new matches.
    """
    ref_subs = {tuple(ref[i:j]) for i in range(len(ref)) for j in range(i + 1, len(ref) + 1)}
    moves = []
    n = len(current)
    for i in range(n):
        for j in range(i + 1, n + 1):
            if tuple(current[i:j]) not in ref_subs:
                break  # extending the block keeps it unmatched
            for p in range(n - (j - i) + 1):
                if p != i:
                    moves.append((i, j, p))
    return moves


def apply_shift(current: list, move: tuple[int, int, int]) -> list:
    i, j, p = move
    block = current[i:j]
    rest = current[:i] + current[j:]
    return rest[:p] + block + rest[p:]


def ter(hypothesis, reference) -> TerResult:
    """Translation error rate of hypothesis against one reference."""
    hyp = list(hypothesis)
    ref = tuple(reference)
    if not ref:
        raise ValueError("reference sentence is empty")
    shifts = 0
    lev = levenshtein_tokens(hyp, ref)
    while lev > 0:
        best_lev = lev
        best_after = None
        for move in _shift_moves(hyp, ref):
            after = apply_shift(hyp, move)
            cand = levenshtein_tokens(after, ref)
            if cand < best_lev:
                best_lev = cand
                best_after = after
        if best_after is None:
            break
        hyp = best_after
        lev = best_lev
        shifts += 1
    edits = shifts + lev
    return TerResult(edits=edits, shifts=shifts, ref_length=len(ref), score=edits / len(ref))


# ---------------------------------------------------------------------------
# Corpus statistics (Len / FKGL / TER / Ins table rows)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CorpusStats:
    avg_length: float
    fkgl: float
    avg_ter_vs_input: float
    avg_insertions: float


def corpus_stats(outputs, inputs) -> CorpusStats:
    """Mean length, FKGL, TER vs input, and novel-type insertions."""
    outputs = [list(s) for s in outputs]
    inputs = [list(s) for s in inputs]
    if len(outputs) != len(inputs):
        raise ValueError(f"{len(outputs)} outputs vs {len(inputs)} inputs")
    if not outputs:
        raise ValueError("empty corpus")
    lengths = [len(s) for s in outputs]
    ters = [ter(o, i).score for o, i in zip(outputs, inputs)]
    ins = [len(set(o) - set(i)) for o, i in zip(outputs, inputs)]
    return CorpusStats(
        avg_length=sum(lengths) / len(lengths),
        fkgl=fkgl(outputs),
        avg_ter_vs_input=sum(ters) / len(ters),
        avg_insertions=sum(ins) / len(ins),
    )


_STAT_COLUMNS = ("Len", "FKGL", "TER", "Ins", "Edit")


def format_stats_table(rows: dict[str, dict[str, float]]) -> str:
    """Fixed-width table; rows map system name -> column -> value.

    Missing columns print as '-'. Columns: Len, FKGL, TER, Ins, Edit.
    """
    name_w = max([len(n) for n in rows] + [len("System")])
    header = "System".ljust(name_w) + "".join(c.rjust(9) for c in _STAT_COLUMNS)
    out = [header, "-" * len(header)]
    for name, cols in rows.items():
        cells = "".join(
            (f"{cols[c]:.2f}" if c in cols else "-").rjust(9) for c in _STAT_COLUMNS
        )
        out.append(name.ljust(name_w) + cells)
    return "\n".join(out)


def write_stats_tsv(path, rows: dict[str, dict[str, float]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("system\t" + "\t".join(c.lower() for c in _STAT_COLUMNS) + "\n")
        for name, cols in rows.items():
            cells = "\t".join(
                repr(cols[c]) if c in cols else "-" for c in _STAT_COLUMNS
            )
            fh.write(f"{name}\t{cells}\n")
