"""Word-vector tables, bag-of-words sentence vectors, cosine similarity.

Sentence vectors are (optionally idf-) weighted means of word vectors.
Out-of-vocabulary tokens contribute nothing; a sentence with no known
tokens embeds to the zero vector, which cosine treats as similarity 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DF_TOTAL_KEY = "__N__"


class EmbeddingTable:
    """Immutable token -> vector map with a fixed dimension.

    Unknown tokens map to the zero vector.
    """

    def __init__(self, vectors: dict[str, np.ndarray], dimension: int):
        if dimension < 1:
            raise ValueError("embedding dimension must be >= 1")
        for tok, vec in vectors.items():
            if vec.shape != (dimension,):
                raise ValueError(f"vector for {tok!r} has shape {vec.shape}, want ({dimension},)")
            if not np.all(np.isfinite(vec)):
                raise ValueError(f"non-finite embedding for {tok!r}")
        self.dimension = dimension
        self._vectors = {t: np.asarray(v, dtype=float) for t, v in vectors.items()}
        self._zero = np.zeros(dimension)

    def __contains__(self, token: str) -> bool:
        return token in self._vectors

    def __len__(self) -> int:
        return len(self._vectors)

    def get(self, token: str) -> np.ndarray:
        return self._vectors.get(token, self._zero)

    def tokens(self) -> list[str]:
        return sorted(self._vectors)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"{len(self._vectors)} {self.dimension}\n")
            for tok in sorted(self._vectors):
                vals = " ".join(repr(float(x)) for x in self._vectors[tok])
                fh.write(f"{tok} {vals}\n")


def load_embedding_table(path) -> EmbeddingTable:
    """Read a text embedding file: ``token v1 ... vd``, space-separated.

    An optional first line ``count dim`` (two integer fields) is skipped.
    Duplicate tokens keep the last occurrence. Returns an error naming
    the line for any dimension mismatch.
    """
    vectors: dict[str, np.ndarray] = {}
    dim = None
    n_duplicates = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if lineno == 1 and len(parts) == 2:
                try:
                    int(parts[0]), int(parts[1])
                    continue  # header line
                except ValueError:
                    pass
            token, values = parts[0], parts[1:]
            if not values:
                raise ValueError(f"{path}:{lineno}: no vector values for {token!r}")
            if dim is None:
                dim = len(values)
            elif len(values) != dim:
                raise ValueError(
                    f"{path}:{lineno}: expected {dim} values, found {len(values)}"
                )
            if token in vectors:
                n_duplicates += 1
            vectors[token] = np.array([float(v) for v in values])
    if not vectors:
        raise ValueError(f"{path}: no embedding vectors found")
    if n_duplicates:
        import warnings

        warnings.warn(f"{path}: {n_duplicates} duplicate token(s), last occurrence kept")
    return EmbeddingTable(vectors, dim)


@dataclass(frozen=True)
class SentenceVector:
    values: np.ndarray
    token_count: int

    @property
    def is_zero(self) -> bool:
        return not np.any(self.values)


def embed_sentence(
    table: EmbeddingTable,
    tokens: list[str] | tuple[str, ...],
    weighting: str = "uniform",
    df_table: dict[str, int] | None = None,
    n_documents: int | None = None,
) -> SentenceVector:
    """Weighted mean of in-vocabulary token vectors.

    ``idf`` weighting uses ln(N/df) with df taken from ``df_table``
    (tokens missing there count as df=1). If every weight is zero the
    mean falls back to uniform. Empty or all-OOV sentences give the
    zero vector.
    """
    known = [t for t in tokens if t in table]
    if not known:
        return SentenceVector(values=np.zeros(table.dimension), token_count=0)
    mat = np.stack([table.get(t) for t in known])
    if weighting == "uniform":
        vec = mat.mean(axis=0)
    elif weighting == "idf":
        if df_table is None or n_documents is None:
            raise ValueError("idf weighting requires df_table and n_documents")
        w = np.array([math.log(n_documents / df_table.get(t, 1)) for t in known])
        if w.sum() <= 0:
            vec = mat.mean(axis=0)
        else:
            vec = (w[:, None] * mat).sum(axis=0) / w.sum()
    else:
        raise ValueError(f"unknown weighting {weighting!r}")
    return SentenceVector(values=vec, token_count=len(known))


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    """u·v / (‖u‖‖v‖); returns 0.0 when either vector is all zeros."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def load_document_frequencies(path) -> tuple[dict[str, int], int]:
    """Read a TSV document-frequency table.

    Lines are ``token<TAB>doc_count``; one line ``__N__<TAB>count``
    carries the total number of documents.
    """
    df: dict[str, int] = {}
    total = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 2 tab-separated fields")
            token, count_s = parts
            count = int(count_s)
            if token == DF_TOTAL_KEY:
                total = count
            else:
                df[token] = count
    if total is None:
        raise ValueError(f"{path}: missing {DF_TOTAL_KEY} total-documents line")
    return df, total


def save_document_frequencies(path, df: dict[str, int], n_documents: int) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{DF_TOTAL_KEY}\t{n_documents}\n")
        for token in sorted(df):
            fh.write(f"{token}\t{df[token]}\n")


def count_document_frequencies(documents: list[list[str]] | list[tuple[str, ...]]) -> tuple[dict[str, int], int]:
    """Per-token document frequencies over a list of token sequences."""
    df: dict[str, int] = {}
    for doc in documents:
        for token in set(doc):
            df[token] = df.get(token, 0) + 1
    return df, len(documents)
