"""Leveled-corpus ingestion, tokenization, entity masking, and word labels.

A leveled corpus holds documents rewritten at discrete reading levels 0
(simplest) through 4 (the original complex text). Per-level word counts
drive the labeling rule in :func:`label_word_complexity`, which assigns
each vocabulary word the simplest level at which it is still used
roughly as often as at the levels above it.

Text normalization is deliberately lightweight and rule-based: a regex
tokenizer with clitic splitting, plus capitalization/digit heuristics
standing in for a full named-entity pipeline. Placeholders are
sequential (``ENT@1``, ``NUM@1``, ...) and the mask mapping restores the
original surface tokens exactly.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field

from .stopwords import STOPWORDS

ENT_PREFIX = "ENT@"
NUM_PREFIX = "NUM@"

# Reserved sentinels used by the scorers and the language model.
BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"
PAD = "<pad>"
RESERVED_TOKENS = frozenset({BOS, EOS, UNK, PAD})

_TOKEN_RE = re.compile(
    r"""
    \d+(?:[.,]\d+)*          # numbers, keeping internal separators (300,000 / 3.14)
    | [^\W\d_]+(?:['’-][^\W\d_]+)*   # words, internal apostrophes/hyphens kept
    | \S                     # anything else: one punctuation token per char
    """,
    re.VERBOSE | re.UNICODE,
)

# Clitic suffixes split off as separate tokens, longest first.
_CLITICS = ("n't", "'re", "'ve", "'ll", "'s", "'d", "'m")

_NUMERIC_RE = re.compile(r"^\d+(?:[.,]\d+)*$")
_PLACEHOLDER_RE = re.compile(r"^(?:ENT|NUM)@\d+$")


def tokenize_cased(text: str) -> list[str]:
    """Split text into tokens, preserving case.

    Punctuation becomes separate single-character tokens; digits with
    internal commas/periods stay whole; clitics (``don't`` -> ``do`` +
    ``n't``) are split per a fixed suffix table.
    """
    out: list[str] = []
    for tok in _TOKEN_RE.findall(text):
        low = tok.lower()
        split = None
        for clitic in _CLITICS:
            if low.endswith(clitic) and len(low) > len(clitic):
                cut = len(tok) - len(clitic)
                split = [tok[:cut], tok[cut:]]
                break
        out.extend(split if split else [tok])
    return out


def tokenize(text: str) -> list[str]:
    """Tokenize and lowercase. Empty text yields an empty list."""
    return [t.lower() for t in tokenize_cased(text)]


def is_placeholder(token: str) -> bool:
    return bool(_PLACEHOLDER_RE.match(token))


def is_punctuation(token: str) -> bool:
    """True when the token carries no letters or digits."""
    return not any(ch.isalnum() for ch in token)


def is_content_word(token: str) -> bool:
    """Content words are everything except stopwords, placeholders,
    reserved sentinels, numbers, and punctuation."""
    if token in RESERVED_TOKENS or is_placeholder(token):
        return False
    low = token.lower()
    if low in STOPWORDS:
        return False
    if _NUMERIC_RE.match(token) or is_punctuation(token):
        return False
    return True


@dataclass(frozen=True)
class Token:
    """A surface token plus its content-word flag."""

    surface: str
    is_content: bool

    @classmethod
    def from_surface(cls, surface: str) -> "Token":
        if not surface:
            raise ValueError("token surface must be non-empty")
        return cls(surface=surface, is_content=is_content_word(surface))


@dataclass(frozen=True)
class MaskResult:
    """Masked token list plus the placeholder -> original-span mapping."""

    tokens: tuple[str, ...]
    mapping: dict[str, tuple[str, ...]]


def mask_entities(tokens: list[str]) -> MaskResult:
    """Replace capitalized spans and numbers with sequential placeholders.

    Operates on cased tokens (run before lowercasing). A maximal run of
    capitalized tokens becomes one ``ENT@k`` placeholder, except a run
    that starts the sentence, which is left alone since ordinary words
    are capitalized there too. Each numeric token becomes ``NUM@k``.
    The returned mapping restores the original tokens exactly.
    """
    out: list[str] = []
    mapping: dict[str, tuple[str, ...]] = {}
    n_ent = 0
    n_num = 0
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if _NUMERIC_RE.match(tok):
            n_num += 1
            name = f"{NUM_PREFIX}{n_num}"
            mapping[name] = (tok,)
            out.append(name)
            i += 1
            continue
        if _is_capitalized(tok) and i > 0:
            j = i
            while j < len(tokens) and _is_capitalized(tokens[j]):
                j += 1
            n_ent += 1
            name = f"{ENT_PREFIX}{n_ent}"
            mapping[name] = tuple(tokens[i:j])
            out.append(name)
            i = j
            continue
        if i == 0 and _is_capitalized(tok):
            # Sentence-initial capitalized span stays; skip the whole run
            # so a following capitalized token is not masked on its own.
            j = i
            while j < len(tokens) and _is_capitalized(tokens[j]):
                out.append(tokens[j])
                j += 1
            i = j
            continue
        out.append(tok)
        i += 1
    return MaskResult(tokens=tuple(out), mapping=mapping)


def _is_capitalized(token: str) -> bool:
    # "I" is an ordinary pronoun, never an entity.
    return token[:1].isupper() and any(c.isalpha() for c in token) and token != "I"


def unmask_entities(tokens: list[str] | tuple[str, ...], mapping: dict[str, tuple[str, ...]]) -> list[str]:
    """Expand placeholders back to their original surface tokens."""
    out: list[str] = []
    for tok in tokens:
        if tok in mapping:
            out.extend(mapping[tok])
        else:
            out.append(tok)
    return out


def preprocess_sentence(text: str) -> tuple[list[str], dict[str, tuple[str, ...]]]:
    """Tokenize, mask entities/numbers, then lowercase non-placeholders."""
    masked = mask_entities(tokenize_cased(text))
    tokens = [t if t in masked.mapping else t.lower() for t in masked.tokens]
    return tokens, masked.mapping


# ---------------------------------------------------------------------------
# Leveled corpora and word-level counts
# ---------------------------------------------------------------------------

N_LEVELS = 5


@dataclass(frozen=True)
class LeveledDocument:
    doc_id: str
    level: int
    sentences: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        if not 0 <= self.level < N_LEVELS:
            raise ValueError(f"level must be in 0..{N_LEVELS - 1}, got {self.level}")


@dataclass(frozen=True)
class LeveledCorpus:
    documents: tuple[LeveledDocument, ...]


@dataclass(frozen=True)
class WordLevelCounts:
    """Per-word occurrence counts at each of the five reading levels."""

    counts: dict[str, tuple[int, ...]]

    def __post_init__(self):
        for word, row in self.counts.items():
            if len(row) != N_LEVELS or any(c < 0 for c in row):
                raise ValueError(f"malformed count row for {word!r}: {row}")
            if sum(row) < 1:
                raise ValueError(f"word {word!r} has all-zero counts")

    def __contains__(self, word: str) -> bool:
        return word in self.counts

    def row(self, word: str) -> tuple[int, ...]:
        return self.counts[word]

    def total(self, word: str) -> int:
        return sum(self.counts.get(word, (0,) * N_LEVELS))

    def vocabulary(self) -> list[str]:
        return sorted(self.counts)


def count_by_level(corpus: LeveledCorpus) -> WordLevelCounts:
    """Exact multiset counts of tokens per level; placeholders excluded."""
    if not corpus.documents:
        raise ValueError("corpus is empty")
    counts: dict[str, list[int]] = {}
    for doc in corpus.documents:
        for sent in doc.sentences:
            for tok in sent:
                if is_placeholder(tok):
                    continue
                row = counts.setdefault(tok, [0] * N_LEVELS)
                row[doc.level] += 1
    return WordLevelCounts(counts={w: tuple(r) for w, r in counts.items()})


def label_word_complexity(counts: WordLevelCounts, word: str, *, stop_on_failure: bool = True) -> int:
    """Assign a 0..4 complexity level from per-level counts.

    Starting from level 4 (original text), the label moves down to level
    i when the word keeps at least 70% of its level-(i+1) frequency and
    at least 40% of its level-4 frequency. With ``stop_on_failure`` the
    descent stops at the first level where either condition fails;
    otherwise every level is checked and the lowest passing one wins.
    """
    if word not in counts:
        raise KeyError(f"word {word!r} not present in the leveled counts")
    row = counts.row(word)
    label = 4
    for i in (3, 2, 1, 0):
        if row[i] >= 0.7 * row[i + 1] and row[i] >= 0.4 * row[4]:
            label = i
        elif stop_on_failure:
            break
    return label


def export_lexicon(path, scores: dict[str, float | int]) -> None:
    """Write a word -> score lexicon as TSV, sorted by word."""
    with open(path, "w", encoding="utf-8") as fh:
        for word in sorted(scores):
            fh.write(f"{word}\t{scores[word]}\n")


# ---------------------------------------------------------------------------
# Aligned pairs and splits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AlignedPair:
    complex_tokens: tuple[str, ...]
    simple_tokens: tuple[str, ...]
    complex_level: int
    simple_level: int

    def __post_init__(self):
        if self.complex_level <= self.simple_level:
            raise ValueError(
                f"complex level must exceed simple level "
                f"({self.complex_level} vs {self.simple_level})"
            )


def filter_adjacent_levels(pairs: list[AlignedPair]) -> list[AlignedPair]:
    """Drop pairs whose levels are only one apart (too close in complexity)."""
    return [p for p in pairs if p.complex_level - p.simple_level >= 2]


@dataclass(frozen=True)
class DatasetSplit:
    train: tuple[AlignedPair, ...]
    validation: tuple[AlignedPair, ...]
    test: tuple[AlignedPair, ...]
    seed: int


def split_corpus(
    pairs: list[AlignedPair],
    ratios: tuple[float, float, float] = (0.9, 0.05, 0.05),
    seed: int = 0,
) -> DatasetSplit:
    """Deterministic shuffle-and-split.

    Validation and test sizes are floors of their ratios; the remainder
    goes to train.
    """
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"split ratios must sum to 1, got {ratios}")
    if len(pairs) < 3:
        raise ValueError(f"need at least 3 pairs to split, got {len(pairs)}")
    shuffled = list(pairs)
    random.Random(seed).shuffle(shuffled)
    n = len(shuffled)
    n_val = int(n * ratios[1])
    n_test = int(n * ratios[2])
    n_train = n - n_val - n_test
    return DatasetSplit(
        train=tuple(shuffled[:n_train]),
        validation=tuple(shuffled[n_train : n_train + n_val]),
        test=tuple(shuffled[n_train + n_val :]),
        seed=seed,
    )


# ---------------------------------------------------------------------------
# File formats (TSV, UTF-8, LF-terminated)
# ---------------------------------------------------------------------------


def read_leveled_corpus(path) -> LeveledCorpus:
    """Read ``level<TAB>doc_id<TAB>sentence`` lines into a LeveledCorpus.

    Sentences are tokenized, entity-masked, and lowercased on ingestion.
    Lines sharing a (doc_id, level) key accumulate into one document.
    """
    docs: dict[tuple[str, int], list[tuple[str, ...]]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 tab-separated fields")
            level_s, doc_id, sentence = parts
            try:
                level = int(level_s)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad level {level_s!r}") from exc
            tokens, _ = preprocess_sentence(sentence)
            if tokens:
                docs.setdefault((doc_id, level), []).append(tuple(tokens))
    documents = tuple(
        LeveledDocument(doc_id=k[0], level=k[1], sentences=tuple(v))
        for k, v in sorted(docs.items())
    )
    return LeveledCorpus(documents=documents)


def read_aligned_pairs(path) -> list[AlignedPair]:
    """Read ``complex_level<TAB>simple_level<TAB>complex<TAB>simple`` lines."""
    pairs: list[AlignedPair] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise ValueError(f"{path}:{lineno}: expected 4 tab-separated fields")
            try:
                c_level, s_level = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad level field") from exc
            c_toks, _ = preprocess_sentence(parts[2])
            s_toks, _ = preprocess_sentence(parts[3])
            if not c_toks or not s_toks:
                raise ValueError(f"{path}:{lineno}: empty sentence after tokenization")
            pairs.append(
                AlignedPair(
                    complex_tokens=tuple(c_toks),
                    simple_tokens=tuple(s_toks),
                    complex_level=c_level,
                    simple_level=s_level,
                )
            )
    return pairs


def write_aligned_pairs(path, rows: list[tuple[int, int, str, str]]) -> None:
    """Write raw aligned-pair rows in the on-disk TSV layout."""
    with open(path, "w", encoding="utf-8") as fh:
        for c_level, s_level, c_sent, s_sent in rows:
            fh.write(f"{c_level}\t{s_level}\t{c_sent}\t{s_sent}\n")


def write_leveled_corpus(path, rows: list[tuple[int, str, str]]) -> None:
    """Write raw ``(level, doc_id, sentence)`` rows in the TSV layout."""
    with open(path, "w", encoding="utf-8") as fh:
        for level, doc_id, sentence in rows:
            fh.write(f"{level}\t{doc_id}\t{sentence}\n")
