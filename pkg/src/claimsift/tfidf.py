"""TF-IDF vectorization built from scratch.

Tokens are lowercase word-character runs; stopwords are removed before
n-grams are formed. idf(t) = ln((1+N)/(1+df(t))) + 1 with raw term counts,
and every transformed document is L2-normalized (the zero vector stays zero).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import stopwords as default_stopword_set
from .corpus import tokenize

VOCAB_FORMAT = "tfidf-vocabulary/1"


class TfidfError(ValueError):
    pass


@dataclass(frozen=True)
class SparseVector:
    """Sorted (index, value) pairs; the empty vector is represented by empty arrays."""

    indices: np.ndarray  # int32, strictly increasing
    values: np.ndarray  # float64

    @classmethod
    def from_pairs(cls, pairs: dict[int, float]) -> "SparseVector":
        if not pairs:
            return cls(np.empty(0, dtype=np.int32), np.empty(0, dtype=np.float64))
        idx = np.array(sorted(pairs), dtype=np.int32)
        vals = np.array([pairs[int(i)] for i in idx], dtype=np.float64)
        return cls(idx, vals)

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.values**2)))

    def to_dense(self, dim: int) -> np.ndarray:
        dense = np.zeros(dim)
        dense[self.indices] = self.values
        return dense


@dataclass
class TfidfModel:
    max_ngram: int
    vocabulary: dict[str, int]  # ngram -> dense column index 0..V-1
    idf: np.ndarray  # aligned to vocabulary indices
    stopwords: frozenset[str]

    @property
    def n_features(self) -> int:
        return len(self.vocabulary)


def _ngrams(tokens: list[str], max_ngram: int) -> list[str]:
    grams = list(tokens)
    for n in range(2, max_ngram + 1):
        grams.extend(" ".join(tokens[i : i + n]) for i in range(len(tokens) - n + 1))
    return grams


def _document_terms(text: str, max_ngram: int, stop: frozenset[str]) -> list[str]:
    tokens = [t for t in tokenize(text) if t not in stop]
    return _ngrams(tokens, max_ngram)


def fit_tfidf(texts: list[str], max_ngram: int = 1, stop: frozenset[str] | None = None) -> TfidfModel:
    """Build the n-gram vocabulary and idf vector from a corpus of texts."""
    if not texts:
        raise TfidfError("cannot fit TF-IDF on an empty corpus")
    if not 1 <= max_ngram <= 4:
        raise TfidfError(f"max_ngram must be in [1, 4], got {max_ngram}")
    stop = default_stopword_set() if stop is None else stop
    n_docs = len(texts)
    df: dict[str, int] = {}
    any_terms = False
    for text in texts:
        terms = set(_document_terms(text, max_ngram, stop))
        if terms:
            any_terms = True
        for term in terms:
            df[term] = df.get(term, 0) + 1
    if not any_terms:
        raise TfidfError("all texts are empty after tokenization and stopword removal")
    vocabulary = {term: i for i, term in enumerate(sorted(df))}
    idf = np.empty(len(vocabulary))
    for term, i in vocabulary.items():
        idf[i] = math.log((1 + n_docs) / (1 + df[term])) + 1.0
    return TfidfModel(max_ngram=max_ngram, vocabulary=vocabulary, idf=idf, stopwords=stop)


def tfidf_transform(model: TfidfModel, text: str) -> SparseVector:
    """count(t) * idf(t) for in-vocabulary n-grams, L2-normalized."""
    counts: dict[int, float] = {}
    for term in _document_terms(text, model.max_ngram, model.stopwords):
        col = model.vocabulary.get(term)
        if col is not None:
            counts[col] = counts.get(col, 0.0) + 1.0
    if not counts:
        return SparseVector.from_pairs({})
    for col in counts:
        counts[col] *= float(model.idf[col])
    vec = SparseVector.from_pairs(counts)
    norm = vec.norm()
    return SparseVector(vec.indices, vec.values / norm)


def save_tfidf(model: TfidfModel, path: str | Path) -> None:
    """Vocabulary TSV: a versioned header line, then ``ngram<TAB>index<TAB>idf``."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"format={VOCAB_FORMAT}\tmax_ngram={model.max_ngram}\n")
        for term, i in sorted(model.vocabulary.items(), key=lambda kv: kv[1]):
            fh.write(f"{term}\t{i}\t{float(model.idf[i])!r}\n")


def load_tfidf(path: str | Path, stop: frozenset[str] | None = None) -> TfidfModel:
    stop = default_stopword_set() if stop is None else stop
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        fields = dict(part.split("=", 1) for part in header.split("\t"))
        if fields.get("format") != VOCAB_FORMAT:
            raise TfidfError(f"{path}: unsupported vocabulary format {fields.get('format')!r}")
        max_ngram = int(fields["max_ngram"])
        vocabulary: dict[str, int] = {}
        idf_entries: dict[int, float] = {}
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            term, idx, idf_val = line.split("\t")
            vocabulary[term] = int(idx)
            idf_entries[int(idx)] = float(idf_val)
    idf = np.empty(len(vocabulary))
    for i, val in idf_entries.items():
        idf[i] = val
    return TfidfModel(max_ngram=max_ngram, vocabulary=vocabulary, idf=idf, stopwords=stop)
