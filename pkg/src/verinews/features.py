"""Vocabulary construction and sparse count / TF-IDF document vectors.

The vocabulary indexes every distinct training token in lexicographic
order, so two runs over the same corpus (in any document order) produce
bit-identical feature matrices. IDF uses the smoothed form
ln((1 + N) / (1 + df)) + 1 and TF-IDF vectors are L2-normalized.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatchError
from .textprep import CleanDoc


@dataclass(frozen=True)
class Vocabulary:
    """term -> column index, indices 0..size-1 in lexicographic term order."""

    term_to_index: dict[str, int]

    @property
    def size(self) -> int:
        return len(self.term_to_index)

    def terms(self) -> list[str]:
        """Terms in index order."""
        ordered = [""] * self.size
        for term, i in self.term_to_index.items():
            ordered[i] = term
        return ordered


@dataclass(frozen=True)
class SparseVector:
    """Strictly increasing (index, weight) pairs; no explicit zeros stored."""

    indices: np.ndarray  # int64
    values: np.ndarray  # float64
    dim: int

    def __post_init__(self):
        indices = np.asarray(self.indices, dtype=np.int64)
        values = np.asarray(self.values, dtype=np.float64)
        if indices.shape != values.shape or indices.ndim != 1:
            raise ValueError("indices and values must be 1-d arrays of equal length")
        if indices.size:
            if indices[0] < 0 or indices[-1] >= self.dim:
                raise ValueError("index out of range for dim")
            if np.any(np.diff(indices) <= 0):
                raise ValueError("indices must be strictly increasing")
        if np.any(values == 0.0) or np.any(values < 0.0):
            raise ValueError("weights must be positive (zeros are not stored)")
        indices.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_counts(cls, counts: dict[int, float], dim: int) -> "SparseVector":
        items = sorted((i, w) for i, w in counts.items() if w != 0.0)
        indices = np.fromiter((i for i, _ in items), dtype=np.int64, count=len(items))
        values = np.fromiter((w for _, w in items), dtype=np.float64, count=len(items))
        return cls(indices=indices, values=values, dim=dim)

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.dim)
        dense[self.indices] = self.values
        return dense

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.values**2)))


@dataclass(frozen=True)
class IdfWeights:
    """Inverse document frequencies, one per vocabulary column."""

    idf: np.ndarray  # float64, length = vocabulary size
    n_docs: int

    def __post_init__(self):
        idf = np.asarray(self.idf, dtype=np.float64)
        idf.setflags(write=False)
        object.__setattr__(self, "idf", idf)


def build_vocabulary(
    corpus: list[CleanDoc],
    min_df: int = 1,
    max_df: int | None = None,
    max_terms: int | None = None,
) -> Vocabulary:
    """Index every distinct corpus token lexicographically.

    Pruning is off by default. min_df/max_df bound the term's document
    frequency (absolute counts, inclusive); max_terms keeps the highest-df
    terms, breaking ties lexicographically so the result stays independent
    of document order.
    """
    if min_df < 1:
        raise ValueError("min_df must be >= 1")
    df: Counter[str] = Counter()
    for doc in corpus:
        df.update(set(doc.tokens))
    kept = [
        t for t, n in df.items() if n >= min_df and (max_df is None or n <= max_df)
    ]
    if max_terms is not None and len(kept) > max_terms:
        kept.sort(key=lambda t: (-df[t], t))
        kept = kept[:max_terms]
    return Vocabulary(term_to_index={t: i for i, t in enumerate(sorted(kept))})


def count_transform(doc: CleanDoc, vocab: Vocabulary) -> SparseVector:
    """Raw term counts; out-of-vocabulary tokens are dropped."""
    lookup = vocab.term_to_index
    counts: Counter[int] = Counter()
    for token in doc.tokens:
        i = lookup.get(token)
        if i is not None:
            counts[i] += 1
    return SparseVector.from_counts(counts, dim=vocab.size)


def fit_idf(corpus: list[CleanDoc], vocab: Vocabulary) -> IdfWeights:
    """idf(t) = ln((1 + N) / (1 + df(t))) + 1, so idf >= 1 always.

    df counts documents containing the term at least once; terms in the
    vocabulary but absent from the corpus get df = 0.
    """
    n_docs = len(corpus)
    df = np.zeros(vocab.size, dtype=np.float64)
    lookup = vocab.term_to_index
    for doc in corpus:
        seen = {lookup[t] for t in set(doc.tokens) if t in lookup}
        if seen:
            df[np.fromiter(seen, dtype=np.int64, count=len(seen))] += 1.0
    idf = np.log((1.0 + n_docs) / (1.0 + df)) + 1.0
    return IdfWeights(idf=idf, n_docs=n_docs)


def tfidf_transform(doc: CleanDoc, vocab: Vocabulary, idf: IdfWeights) -> SparseVector:
    """Counts scaled by IDF, then L2-normalized (zero vectors stay zero)."""
    if idf.idf.shape[0] != vocab.size:
        raise DimensionMismatchError(
            f"idf length {idf.idf.shape[0]} != vocabulary size {vocab.size}"
        )
    counts = count_transform(doc, vocab)
    if counts.nnz == 0:
        return counts
    weighted = counts.values * idf.idf[counts.indices]
    norm = np.sqrt(np.sum(weighted**2))
    if norm > 0.0:
        weighted = weighted / norm
    return SparseVector(indices=counts.indices, values=weighted, dim=vocab.size)


def stack(vectors: list[SparseVector]) -> sp.csr_matrix:
    """Stack per-document vectors into one CSR matrix for batched math."""
    if not vectors:
        raise ValueError("cannot stack an empty vector list")
    dim = vectors[0].dim
    for v in vectors:
        if v.dim != dim:
            raise DimensionMismatchError(f"mixed dims in stack: {v.dim} != {dim}")
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([v.nnz for v in vectors])
    if indptr[-1] == 0:
        return sp.csr_matrix((len(vectors), dim), dtype=np.float64)
    indices = np.concatenate([v.indices for v in vectors])
    data = np.concatenate([v.values for v in vectors])
    return sp.csr_matrix((data, indices, indptr), shape=(len(vectors), dim))
