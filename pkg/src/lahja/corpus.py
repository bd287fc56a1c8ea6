"""Labeled corpus ingestion, binary task construction, splits and analytics."""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, ParseError, QuotaError, StratificationError
from .textproc import NormalizationConfig, preprocess

OTHER = "OTHER"


@dataclass(frozen=True)
class Document:
    text: str
    label: str
    # label before binary relabelling, kept for sampling audits
    origin: str | None = None


@dataclass(frozen=True)
class LabeledCorpus:
    docs: tuple[Document, ...]
    positive_label: str | None = None
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "docs", tuple(self.docs))

    def __len__(self):
        return len(self.docs)

    def __iter__(self):
        return iter(self.docs)

    @property
    def texts(self) -> list[str]:
        return [d.text for d in self.docs]

    @property
    def labels(self) -> list[str]:
        return [d.label for d in self.docs]

    @property
    def counts(self) -> dict[str, int]:
        return dict(sorted(Counter(self.labels).items()))

    def binary_targets(self) -> np.ndarray:
        """1 for the positive label, 0 otherwise."""
        if self.positive_label is None:
            raise DomainError("corpus has no positive label")
        return np.array([d.label == self.positive_label for d in self.docs], dtype=np.int64)


def load_tsv(path, label_column=None, text_column=None) -> LabeledCorpus:
    """Read ``label<TAB>text`` lines, or a headed CSV when column names are given.

    Blank lines are skipped.  Raises :class:`ParseError` with the 1-based line
    number of a malformed line, and :class:`ParseError` on invalid UTF-8.
    """
    path = Path(path)
    try:
        raw = path.read_bytes().decode("utf-8")
    except UnicodeDecodeError as exc:
        line = path.read_bytes()[: exc.start].count(b"\n") + 1
        raise ParseError(f"invalid UTF-8 in {path}", line=line) from exc

    if label_column is not None or text_column is not None:
        return _load_csv(raw, path, label_column or "label", text_column or "text")

    docs = []
    for lineno, line in enumerate(raw.split("\n"), start=1):
        line = line.rstrip("\r")
        if not line.strip():
            continue
        label, sep, text = line.partition("\t")
        if not sep:
            raise ParseError("expected label<TAB>text", line=lineno)
        label, text = label.strip(), text.strip()
        if not label or not text:
            raise ParseError("empty label or text", line=lineno)
        docs.append(Document(text, label))
    return LabeledCorpus(docs, provenance={"source": str(path)})


def _load_csv(raw, path, label_column, text_column) -> LabeledCorpus:
    reader = csv.DictReader(raw.splitlines())
    if reader.fieldnames is None:
        return LabeledCorpus((), provenance={"source": str(path)})
    for col in (label_column, text_column):
        if col not in reader.fieldnames:
            raise ParseError(f"missing column {col!r}", line=1)
    docs = []
    for row in reader:
        label = (row[label_column] or "").strip()
        text = (row[text_column] or "").strip()
        if not text:
            continue
        if not label:
            raise ParseError("empty label", line=reader.line_num)
        docs.append(Document(text, label))
    return LabeledCorpus(docs, provenance={"source": str(path)})


def write_tsv(corpus: LabeledCorpus, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for d in corpus.docs:
            fh.write(f"{d.label}\t{d.text}\n")


def build_binary_task(
    corpus: LabeledCorpus,
    positive: str = "LY",
    other_quota: int | None = None,
    tunisian_quota: int = 5000,
    seed: int = 0,
    tunisian_label: str = "TN",
) -> LabeledCorpus:
    """Positive docs plus ``other_quota`` sampled negatives relabelled OTHER.

    Exactly ``tunisian_quota`` of the negatives come from ``tunisian_label``;
    the rest are drawn uniformly from the remaining non-positive dialects.
    ``other_quota`` defaults to the number of positive docs (balanced task).
    Output keeps the input order.
    """
    pos_idx = [i for i, d in enumerate(corpus.docs) if d.label == positive]
    tn_idx = [i for i, d in enumerate(corpus.docs) if d.label == tunisian_label and d.label != positive]
    rest_idx = [
        i for i, d in enumerate(corpus.docs) if d.label not in (positive, tunisian_label)
    ]
    if other_quota is None:
        other_quota = len(pos_idx)
    if tunisian_quota < 0 or other_quota < tunisian_quota:
        raise DomainError("need 0 <= tunisian_quota <= other_quota")
    rest_quota = other_quota - tunisian_quota
    if len(tn_idx) < tunisian_quota:
        raise QuotaError(tunisian_label, tunisian_quota, len(tn_idx))
    if len(rest_idx) < rest_quota:
        raise QuotaError("other dialects", rest_quota, len(rest_idx))

    rng = np.random.default_rng(seed)
    chosen = set(pos_idx)
    chosen.update(int(i) for i in rng.choice(np.array(tn_idx, dtype=np.int64), tunisian_quota, replace=False))
    chosen.update(int(i) for i in rng.choice(np.array(rest_idx, dtype=np.int64), rest_quota, replace=False))

    docs = []
    for i in sorted(chosen):
        d = corpus.docs[i]
        label = positive if d.label == positive else OTHER
        docs.append(Document(d.text, label, origin=d.origin or d.label))
    provenance = dict(corpus.provenance)
    provenance.update(
        positive=positive,
        other_quota=other_quota,
        tunisian_quota=tunisian_quota,
        tunisian_label=tunisian_label,
        sampling_seed=seed,
    )
    return LabeledCorpus(docs, positive_label=positive, provenance=provenance)


def relabel_binary(corpus: LabeledCorpus, positive: str = "LY") -> LabeledCorpus:
    """Keep every doc, mapping all non-positive labels to OTHER."""
    docs = [
        Document(d.text, positive if d.label == positive else OTHER, origin=d.origin or d.label)
        for d in corpus.docs
    ]
    provenance = dict(corpus.provenance, positive=positive)
    return LabeledCorpus(docs, positive_label=positive, provenance=provenance)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def stratified_split(corpus: LabeledCorpus, test_fraction: float = 0.2, seed: int = 0):
    """Per-class shuffled split; each class contributes round(n * fraction) test docs."""
    if not 0 < test_fraction < 1:
        raise DomainError("test_fraction must be in (0, 1)")
    by_class: dict[str, list[int]] = {}
    for i, d in enumerate(corpus.docs):
        by_class.setdefault(d.label, []).append(i)
    if len(by_class) < 2:
        raise StratificationError(f"need at least 2 classes, got {sorted(by_class)}")
    small = {c: len(ix) for c, ix in by_class.items() if len(ix) < 2}
    if small:
        raise StratificationError(f"classes with fewer than 2 docs: {small}")

    rng = np.random.default_rng(seed)
    test_idx = set()
    for label in sorted(by_class):
        idx = np.array(by_class[label], dtype=np.int64)
        n_test = _round_half_up(len(idx) * test_fraction)
        test_idx.update(int(i) for i in rng.permutation(idx)[:n_test])

    provenance = dict(corpus.provenance, split_seed=seed, test_fraction=test_fraction)
    train = [d for i, d in enumerate(corpus.docs) if i not in test_idx]
    test = [d for i, d in enumerate(corpus.docs) if i in test_idx]
    return (
        LabeledCorpus(train, corpus.positive_label, dict(provenance, part="train")),
        LabeledCorpus(test, corpus.positive_label, dict(provenance, part="test")),
    )


# -- analytics ---------------------------------------------------------------


@dataclass(frozen=True)
class NgramStats:
    n: int
    distinct_tokens: int
    total_tokens: int
    hapax_count: int

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "distinct_tokens": self.distinct_tokens,
            "total_tokens": self.total_tokens,
            "hapax_count": self.hapax_count,
        }


def word_ngrams(tokens, n: int) -> list[str]:
    return [" ".join(tokens[i:i + n]) for i in range(len(tokens) - n + 1)]


def _token_lists(corpus, tokenizer, label=None):
    for d in corpus.docs:
        if label is None or d.label == label:
            yield preprocess(d.text, tokenizer)


def ngram_frequencies(corpus: LabeledCorpus, n: int, tokenizer: NormalizationConfig | None = None, label=None) -> Counter:
    if n < 1:
        raise DomainError("n-gram order must be >= 1")
    freq = Counter()
    for tokens in _token_lists(corpus, tokenizer, label):
        freq.update(word_ngrams(tokens, n))
    return freq


def ngram_stats(corpus: LabeledCorpus, n: int, tokenizer: NormalizationConfig | None = None) -> NgramStats:
    freq = ngram_frequencies(corpus, n, tokenizer)
    return NgramStats(
        n=n,
        distinct_tokens=len(freq),
        total_tokens=sum(freq.values()),
        hapax_count=sum(1 for c in freq.values() if c == 1),
    )


def top_ngrams(corpus: LabeledCorpus, n: int, k: int, tokenizer: NormalizationConfig | None = None, label=None):
    """The ``k`` most frequent n-grams; ties go to the lexicographically smaller gram."""
    if k < 1:
        raise DomainError("k must be >= 1")
    freq = ngram_frequencies(corpus, n, tokenizer, label)
    return sorted(freq.items(), key=lambda kv: (-kv[1], kv[0]))[:k]


def _check_class(corpus, label):
    if label not in set(corpus.labels):
        raise KeyError(f"unknown class {label!r}")


def length_histogram(corpus: LabeledCorpus, label: str, tokenizer: NormalizationConfig | None = None) -> dict[int, int]:
    _check_class(corpus, label)
    hist = Counter(len(tokens) for tokens in _token_lists(corpus, tokenizer, label))
    return dict(sorted(hist.items()))


def class_token_entropy(corpus: LabeledCorpus, label: str, tokenizer: NormalizationConfig | None = None) -> float:
    """Shannon entropy, in bits, of the class's unigram distribution."""
    freq = ngram_frequencies(corpus, 1, tokenizer, label)
    total = sum(freq.values())
    if total == 0:
        raise DomainError(f"class {label!r} has no tokens")
    h = 0.0
    for c in freq.values():
        p = c / total
        h -= p * math.log2(p)
    return max(h, 0.0)


def analyze(corpus: LabeledCorpus, tokenizer: NormalizationConfig | None = None, k: int = 10, max_n: int = 3) -> dict:
    """Everything the ``analyze`` command reports, as a JSON-ready dict.

    Documents are tokenized once and re-wrapped as a raw corpus for the
    individual analytics.
    """
    cleaned = LabeledCorpus(
        [Document(" ".join(preprocess(d.text, tokenizer)) or " ", d.label) for d in corpus.docs],
        corpus.positive_label,
    )
    raw = NormalizationConfig.raw()
    report = {
        "n_docs": len(corpus),
        "class_counts": corpus.counts,
        "preprocessing": (tokenizer or NormalizationConfig()).to_dict(),
        "ngram_stats": [ngram_stats(cleaned, n, raw).to_dict() for n in range(1, max_n + 1)],
        "classes": {},
    }
    for label in sorted(set(corpus.labels)):
        try:
            entropy = class_token_entropy(cleaned, label, raw)
        except DomainError:
            entropy = None
        report["classes"][label] = {
            "top_ngrams": {
                str(n): [[g, c] for g, c in top_ngrams(cleaned, n, k, raw, label=label)]
                for n in range(1, max_n + 1)
            },
            "length_histogram": {str(n): c for n, c in length_histogram(cleaned, label, raw).items()},
            "entropy_bits": entropy,
        }
    return report
