"""Text feature pipeline for classified listings.

Title and description are concatenated into one document per listing, then:

1. tokenize on non-alphanumeric boundaries,
2. drop tokens shorter than the minimum length, then stop words,
3. expand to n-grams (terms join their tokens with ``_``),
4. prune terms by document-frequency bounds,
5. weigh surviving terms with TF-IDF (natural-log IDF),
6. drop near-duplicate columns with a greedy correlation filter.

The document-frequency bounds and the TF normalisation are configurable via
:class:`TextConfig`; everything downstream treats the result as an ordinary
:class:`~pricemine.structured.FeatureMatrix` whose columns are terms.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyCorpusError, EmptyInputError
from .structured import FeatureMatrix

TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

Document = tuple[str, str]


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    """The stop-word list shipped with the package."""
    text = resources.files("pricemine").joinpath("data/stopwords.txt").read_text("utf-8")
    return _parse_stopwords(text.splitlines())


def load_stopwords(path: str | Path) -> frozenset[str]:
    """Load a stop-word file: one lower-case word per line, ``#`` comments."""
    return _parse_stopwords(Path(path).read_text("utf-8").splitlines())


def _parse_stopwords(lines: Iterable[str]) -> frozenset[str]:
    words: set[str] = set()
    for line in lines:
        word = line.split("#", 1)[0].strip()
        if word:
            words.add(word.lower())
    return frozenset(words)


@dataclass(frozen=True)
class TextConfig:
    """Knobs for the text pipeline.

    ``df_min_fraction`` / ``df_max_fraction`` bound the fraction of documents
    a term may appear in; ``tf_norm`` selects how the raw count vector is
    normalised (Euclidean length by default, total vocabulary-term count as
    the alternative).
    """

    min_token_length: int = 4
    ngram_max: int = 2
    df_min_fraction: float = 0.01
    df_max_fraction: float = 0.5
    stopwords: frozenset[str] = field(default_factory=default_stopwords)
    correlation_threshold: float = 0.99
    tf_norm: str = "l2"

    def __post_init__(self) -> None:
        if self.min_token_length < 1:
            raise ValueError("min_token_length must be >= 1")
        if self.ngram_max < 1:
            raise ValueError("ngram_max must be >= 1")
        if not (0.0 <= self.df_min_fraction < 1.0):
            raise ValueError("df_min_fraction must be in [0, 1)")
        if not (0.0 < self.df_max_fraction <= 1.0):
            raise ValueError("df_max_fraction must be in (0, 1]")
        if self.df_min_fraction >= self.df_max_fraction:
            raise ValueError("df_min_fraction must be < df_max_fraction")
        if not (0.0 < self.correlation_threshold <= 1.0):
            raise ValueError("correlation_threshold must be in (0, 1]")
        if self.tf_norm not in ("l2", "token_count"):
            raise ValueError(f"unknown tf_norm: {self.tf_norm!r}")
        object.__setattr__(self, "stopwords", frozenset(self.stopwords))


def tokenize(text: str, config: TextConfig) -> list[str]:
    """Split on non-alphanumeric characters, drop short tokens and stop words.

    Expects already lower-cased text (the cleaning step guarantees it for
    stored records); order of surviving tokens is preserved.
    """
    return [
        token
        for token in TOKEN_RE.findall(text)
        if len(token) >= config.min_token_length and token not in config.stopwords
    ]


def ngrams(tokens: Sequence[str], n_max: int) -> list[str]:
    """All 1..n_max grams over the token sequence, shortest first."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    terms: list[str] = list(tokens)
    for n in range(2, n_max + 1):
        for start in range(len(tokens) - n + 1):
            terms.append("_".join(tokens[start : start + n]))
    return terms


def document_terms(document: Document, config: TextConfig) -> list[str]:
    """Terms of one (title, description) pair, title text first."""
    title, description = document
    return ngrams(tokenize(title + " " + description, config), config.ngram_max)


@dataclass(frozen=True)
class TextVocabulary:
    """Surviving terms with document frequencies and natural-log IDF values."""

    terms: tuple[str, ...]
    doc_frequency: tuple[int, ...]
    corpus_size: int
    idf: np.ndarray = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "doc_frequency", tuple(int(n) for n in self.doc_frequency))
        if len(self.terms) != len(self.doc_frequency):
            raise ValueError("terms and doc_frequency must align")
        if self.corpus_size < 1:
            raise ValueError("corpus_size must be >= 1")
        for count in self.doc_frequency:
            if not (1 <= count <= self.corpus_size):
                raise ValueError("document frequencies must be in [1, corpus_size]")
        frequencies = np.asarray(self.doc_frequency, dtype=np.float64)
        idf = (
            np.log(self.corpus_size / frequencies)
            if len(self.terms)
            else np.zeros(0, dtype=np.float64)
        )
        object.__setattr__(self, "idf", idf)

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def index(self) -> dict[str, int]:
        return {term: i for i, term in enumerate(self.terms)}


def fit_vocabulary(documents: Sequence[Document], config: TextConfig) -> TextVocabulary:
    """Count document frequencies and keep terms inside the df bounds.

    A term survives iff ``df_min_fraction <= N_i/N <= df_max_fraction``;
    survivors are ordered lexicographically.
    """
    if not documents:
        raise EmptyCorpusError("cannot fit a vocabulary on zero documents")
    total = len(documents)
    frequency: Counter[str] = Counter()
    for document in documents:
        frequency.update(set(document_terms(document, config)))
    kept = sorted(
        term
        for term, count in frequency.items()
        if config.df_min_fraction <= count / total <= config.df_max_fraction
    )
    return TextVocabulary(
        terms=tuple(kept),
        doc_frequency=tuple(frequency[term] for term in kept),
        corpus_size=total,
    )


def tfidf_encode(
    documents: Sequence[Document], vocab: TextVocabulary, config: TextConfig
) -> FeatureMatrix:
    """TF-IDF matrix over the vocabulary, rows aligned to ``documents``.

    TF divides each term's occurrence count by the length of the document's
    count vector over vocabulary terms (Euclidean or total count, per
    ``config.tf_norm``); a document with no vocabulary terms stays all-zero.
    """
    index = vocab.index
    values = np.zeros((len(documents), len(vocab)), dtype=np.float64)
    for row, document in enumerate(documents):
        counts = Counter(document_terms(document, config))
        pairs = [(index[term], count) for term, count in counts.items() if term in index]
        if not pairs:
            continue
        raw = np.array([count for _, count in pairs], dtype=np.float64)
        norm = float(np.sqrt(np.sum(raw * raw))) if config.tf_norm == "l2" else float(np.sum(raw))
        if norm == 0.0:
            continue
        for (column, _), count in zip(pairs, raw):
            values[row, column] = (count / norm) * vocab.idf[column]
    return FeatureMatrix(vocab.terms, values)


def correlation_filter(
    matrix: FeatureMatrix, threshold: float
) -> tuple[FeatureMatrix, list[str]]:
    """Greedily drop columns that correlate with an earlier kept column.

    Constant columns are removed first (their correlation is undefined);
    then a single left-to-right pass removes any column whose absolute
    Pearson correlation with a previously kept column exceeds ``threshold``.
    """
    if matrix.n_rows < 1:
        raise EmptyInputError("correlation filter needs at least one row")
    values = matrix.values
    removed: list[str] = []
    variable: list[int] = []
    for column in range(matrix.n_columns):
        col = values[:, column]
        if col.size == 0 or np.ptp(col) == 0.0:
            removed.append(matrix.column_names[column])
        else:
            variable.append(column)

    kept: list[int] = []
    if variable:
        corr = np.corrcoef(values[:, variable], rowvar=False)
        corr = np.atleast_2d(corr)
        for local, column in enumerate(variable):
            if kept and bool(np.any(np.abs(corr[kept, local]) > threshold)):
                removed.append(matrix.column_names[column])
            else:
                kept.append(local)

    kept_columns = [variable[local] for local in kept]
    names = tuple(matrix.column_names[c] for c in kept_columns)
    surviving = values[:, kept_columns] if kept_columns else np.zeros((matrix.n_rows, 0))
    return FeatureMatrix(names, surviving), removed
