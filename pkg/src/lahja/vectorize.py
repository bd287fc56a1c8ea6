"""Word and character n-gram tf-idf features.

Weights are ``tf * idf`` with raw in-document counts for tf and the smoothed
``idf = ln((1 + N) / (1 + df)) + 1``; each document vector is then scaled to
unit L2 norm over the joint word+char space.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import DomainError, FitError, FormatError

FORMULA = "tfidf-smooth-l2-v1"


@dataclass(frozen=True)
class NgramRange:
    lo: int
    hi: int

    def __post_init__(self):
        if not 1 <= self.lo <= self.hi:
            raise DomainError(f"invalid n-gram range ({self.lo}, {self.hi})")

    @classmethod
    def parse(cls, value) -> "NgramRange":
        """Accept ``NgramRange``, ``(lo, hi)`` or strings like ``"1,2"`` / ``"(1, 2)"``."""
        if isinstance(value, NgramRange):
            return value
        if isinstance(value, str):
            parts = value.strip().strip("()[]").replace("-", ",").split(",")
            try:
                lo, hi = (int(p) for p in parts)
            except ValueError:
                raise DomainError(f"cannot parse n-gram range {value!r}") from None
            return cls(lo, hi)
        lo, hi = value
        return cls(int(lo), int(hi))

    def as_tuple(self) -> tuple[int, int]:
        return (self.lo, self.hi)

    def __str__(self):
        return f"({self.lo}, {self.hi})"


def word_grams(tokens, rng: NgramRange | None) -> list[str]:
    if rng is None:
        return []
    out = []
    for n in range(rng.lo, rng.hi + 1):
        out.extend(" ".join(tokens[i:i + n]) for i in range(len(tokens) - n + 1))
    return out


def char_grams(text: str, rng: NgramRange | None) -> list[str]:
    """Character n-grams over the whole string, spaces included."""
    if rng is None:
        return []
    out = []
    for n in range(rng.lo, rng.hi + 1):
        out.extend(text[i:i + n] for i in range(len(text) - n + 1))
    return out


@dataclass
class SparseVector:
    indices: np.ndarray
    values: np.ndarray
    dim: int

    def __post_init__(self):
        self.indices = np.asarray(self.indices, dtype=np.int64)
        self.values = np.asarray(self.values, dtype=np.float64)

    @property
    def entries(self) -> list[tuple[int, float]]:
        return list(zip(self.indices.tolist(), self.values.tolist()))

    @property
    def nnz(self) -> int:
        return len(self.indices)

    def norm(self) -> float:
        return float(np.sqrt(np.dot(self.values, self.values)))

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.values
        return out

    @classmethod
    def from_dense(cls, row) -> "SparseVector":
        row = np.asarray(row, dtype=np.float64)
        idx = np.flatnonzero(row)
        return cls(idx, row[idx], row.shape[0])


def to_csr(vectors, dim: int | None = None) -> sparse.csr_matrix:
    """Stack sparse vectors into a CSR matrix (rows in input order)."""
    vectors = list(vectors)
    if dim is None:
        if not vectors:
            raise DomainError("cannot infer dimension of an empty batch")
        dim = vectors[0].dim
    for v in vectors:
        if v.dim != dim:
            raise DomainError(f"dimension mismatch: {v.dim} != {dim}")
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([v.nnz for v in vectors])
    indices = np.concatenate([v.indices for v in vectors]) if vectors else np.zeros(0, np.int64)
    data = np.concatenate([v.values for v in vectors]) if vectors else np.zeros(0)
    return sparse.csr_matrix((data, indices, indptr), shape=(len(vectors), dim))


class Vocabulary:
    """Fitted n-gram -> column map plus document frequencies.

    Word columns come first, then character columns; each block is in
    lexicographic gram order.
    """

    def __init__(self, word_map, char_map, doc_freq, n_docs, word_range, char_range, term_freq=None, min_df=1):
        self.word_map = dict(word_map)
        self.char_map = dict(char_map)
        self.doc_freq = np.asarray(doc_freq, dtype=np.int64)
        self.term_freq = None if term_freq is None else np.asarray(term_freq, dtype=np.int64)
        self.n_docs = int(n_docs)
        self.word_range = word_range
        self.char_range = char_range
        self.min_df = min_df
        self.idf = np.log((1.0 + self.n_docs) / (1.0 + self.doc_freq)) + 1.0

    @property
    def dim(self) -> int:
        return len(self.word_map) + len(self.char_map)

    def __len__(self):
        return self.dim

    def columns(self) -> list[str]:
        """Column names, prefixed ``w:`` or ``c:``."""
        names = [""] * self.dim
        for g, j in self.word_map.items():
            names[j] = "w:" + g
        for g, j in self.char_map.items():
            names[j] = "c:" + g
        return names

    def __eq__(self, other):
        return (
            isinstance(other, Vocabulary)
            and self.word_map == other.word_map
            and self.char_map == other.char_map
            and np.array_equal(self.doc_freq, other.doc_freq)
            and self.n_docs == other.n_docs
            and self.word_range == other.word_range
            and self.char_range == other.char_range
        )

    def to_dict(self) -> dict:
        return {
            "formula": FORMULA,
            "word_range": None if self.word_range is None else list(self.word_range.as_tuple()),
            "char_range": None if self.char_range is None else list(self.char_range.as_tuple()),
            "min_df": self.min_df,
            "n_docs": self.n_docs,
            "word_map": self.word_map,
            "char_map": self.char_map,
            "doc_freq": self.doc_freq.tolist(),
        }

    @classmethod
    def from_dict(cls, d) -> "Vocabulary":
        try:
            if d["formula"] != FORMULA:
                raise FormatError(f"unsupported formula {d['formula']!r}", field="vocabulary.formula")
            wr = None if d["word_range"] is None else NgramRange(*d["word_range"])
            cr = None if d["char_range"] is None else NgramRange(*d["char_range"])
            vocab = cls(d["word_map"], d["char_map"], d["doc_freq"], d["n_docs"], wr, cr, min_df=d.get("min_df", 1))
        except KeyError as exc:
            raise FormatError("missing field", field=f"vocabulary.{exc.args[0]}") from None
        except (TypeError, ValueError) as exc:
            raise FormatError(str(exc), field="vocabulary") from None
        if len(vocab.doc_freq) != vocab.dim:
            raise FormatError("length does not match gram maps", field="vocabulary.doc_freq")
        return vocab


def _doc_grams(tokens, word_range, char_range):
    tokens = list(tokens)
    return word_grams(tokens, word_range), char_grams(" ".join(tokens), char_range)


def fit(docs, word_range=NgramRange(1, 2), char_range=NgramRange(1, 5), min_df: int = 1) -> Vocabulary:
    """Fit a vocabulary on preprocessed token lists.

    Either range may be ``None`` to drop that feature family.  Grams with a
    document frequency below ``min_df`` are discarded.
    """
    docs = list(docs)
    if not docs:
        raise FitError("cannot fit a vocabulary on an empty corpus")
    word_range = None if word_range is None else NgramRange.parse(word_range)
    char_range = None if char_range is None else NgramRange.parse(char_range)
    if word_range is None and char_range is None:
        raise DomainError("at least one of word_range and char_range is required")
    w_df, c_df = Counter(), Counter()
    w_tf, c_tf = Counter(), Counter()
    for tokens in docs:
        wg, cg = _doc_grams(tokens, word_range, char_range)
        w_tf.update(wg)
        c_tf.update(cg)
        w_df.update(set(wg))
        c_df.update(set(cg))
    words = sorted(g for g, df in w_df.items() if df >= min_df)
    chars = sorted(g for g, df in c_df.items() if df >= min_df)
    word_map = {g: j for j, g in enumerate(words)}
    char_map = {g: j + len(words) for j, g in enumerate(chars)}
    doc_freq = [w_df[g] for g in words] + [c_df[g] for g in chars]
    term_freq = [w_tf[g] for g in words] + [c_tf[g] for g in chars]
    return Vocabulary(word_map, char_map, doc_freq, len(docs), word_range, char_range, term_freq, min_df)


def transform(tokens, vocab: Vocabulary) -> SparseVector:
    wg, cg = _doc_grams(tokens, vocab.word_range, vocab.char_range)
    counts = Counter()
    for g in wg:
        j = vocab.word_map.get(g)
        if j is not None:
            counts[j] += 1
    for g in cg:
        j = vocab.char_map.get(g)
        if j is not None:
            counts[j] += 1
    if not counts:
        return SparseVector(np.zeros(0, np.int64), np.zeros(0), vocab.dim)
    idx = np.fromiter(sorted(counts), dtype=np.int64, count=len(counts))
    tf = np.array([counts[j] for j in idx.tolist()], dtype=np.float64)
    w = tf * vocab.idf[idx]
    w /= np.sqrt(np.dot(w, w))
    return SparseVector(idx, w, vocab.dim)


def transform_corpus(docs, vocab: Vocabulary) -> list[SparseVector]:
    return [transform(tokens, vocab) for tokens in docs]


def append_meta(vec: SparseVector, meta_values) -> SparseVector:
    """Append already-scaled meta-feature values as extra trailing columns.

    Zero values stay implicit, so the result is still sparse.
    """
    meta_values = np.asarray(meta_values, dtype=np.float64)
    if meta_values.ndim != 1:
        raise DomainError("meta values must be a flat vector")
    if ((meta_values < 0) | (meta_values > 1)).any():
        raise DomainError("meta values must be min-max scaled to [0, 1] first")
    nz = np.flatnonzero(meta_values)
    return SparseVector(
        np.concatenate([vec.indices, nz + vec.dim]),
        np.concatenate([vec.values, meta_values[nz]]),
        vec.dim + len(meta_values),
    )


def featurize(texts, vocab: Vocabulary, norm=None, meta_scaler=None) -> sparse.csr_matrix:
    """Raw texts -> preprocessed tokens -> tf-idf rows (+ scaled meta columns)."""
    from .textproc import preprocess

    texts = list(texts)
    vectors = transform_corpus((preprocess(t, norm) for t in texts), vocab)
    dim = vocab.dim
    if meta_scaler is not None:
        meta_rows = meta_scaler.transform(texts)
        vectors = [append_meta(v, m) for v, m in zip(vectors, meta_rows)]
        dim += len(meta_scaler.features)
    return to_csr(vectors, dim)
