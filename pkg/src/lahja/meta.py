"""Informality meta-features of raw sentences and chi-square selection."""

from __future__ import annotations

import math
import re
from dataclasses import asdict, dataclass, fields
from functools import lru_cache
from importlib import resources

import numpy as np

from .errors import DegenerateTableError, DomainError, StateError, StratificationError

CONTINUOUS = ("pct_word_length", "char_length", "space_count")
FLAGS = (
    "has_period",
    "has_comma",
    "has_exclamation",
    "has_happy_emoticon",
    "has_sad_emoticon",
    "has_phone",
    "has_email",
    "has_mention",
    "has_hashtag",
)
FEATURES = CONTINUOUS + FLAGS

# a period that is not glued between two word characters (e-mails, URLs, decimals)
_PERIOD_RE = re.compile(r"(?<!\w)[.\u06D4]|[.\u06D4](?!\w)")
_COMMA_RE = re.compile("[,\u060C]")
_EXCLAMATION_RE = re.compile("[!\uFF01]")
_PHONE_RE = re.compile(r"(?<!\d)\+?\d(?:[ \-.()]?\d){6,}(?!\d)")
_EMAIL_RE = re.compile(r"[^\s@]+@[^\s@]+\.[^\s@]+")
_MENTION_RE = re.compile(r"(?<![\w@])@\w+")
_HASHTAG_RE = re.compile(r"[#\uFF03]\w+")


@lru_cache(maxsize=None)
def emoticons(kind: str) -> tuple[str, ...]:
    """Patterns from the shipped ``emoticons_<kind>.txt`` table (happy or sad)."""
    text = resources.files("lahja").joinpath(f"data/emoticons_{kind}.txt").read_text(encoding="utf-8")
    pats = [ln.strip() for ln in text.splitlines()]
    return tuple(p for p in pats if p and not p.startswith("#"))


def _contains_any(text: str, patterns) -> bool:
    return any(p in text for p in patterns)


@dataclass(frozen=True)
class MetaFeatureVector:
    pct_word_length: float = 0.0
    char_length: int = 0
    space_count: int = 0
    has_period: bool = False
    has_comma: bool = False
    has_exclamation: bool = False
    has_happy_emoticon: bool = False
    has_sad_emoticon: bool = False
    has_phone: bool = False
    has_email: bool = False
    has_mention: bool = False
    has_hashtag: bool = False

    def to_dict(self) -> dict:
        return asdict(self)

    def values(self) -> list[float]:
        return [float(getattr(self, f.name)) for f in fields(self)]


def extract_meta(raw_text: str) -> MetaFeatureVector:
    """Compute every meta-feature on unprocessed text.

    ``pct_word_length`` is the mean whitespace-word length divided by the
    full sentence length (spaces included), so it lies in [0, 1].
    """
    if not raw_text:
        return MetaFeatureVector()
    words = raw_text.split()
    total_len = len(raw_text.strip())
    char_length = sum(1 for ch in raw_text if not ch.isspace())
    mean_word = sum(len(w) for w in words) / len(words) if words else 0.0
    return MetaFeatureVector(
        pct_word_length=mean_word / total_len if total_len else 0.0,
        char_length=char_length,
        space_count=raw_text.count(" "),
        has_period=bool(_PERIOD_RE.search(raw_text)),
        has_comma=bool(_COMMA_RE.search(raw_text)),
        has_exclamation=bool(_EXCLAMATION_RE.search(raw_text)),
        has_happy_emoticon=_contains_any(raw_text, emoticons("happy")),
        has_sad_emoticon=_contains_any(raw_text, emoticons("sad")),
        has_phone=bool(_PHONE_RE.search(raw_text)),
        has_email=bool(_EMAIL_RE.search(raw_text)),
        has_mention=bool(_MENTION_RE.search(raw_text)),
        has_hashtag=bool(_HASHTAG_RE.search(raw_text)),
    )


# -- chi-square ----------------------------------------------------------------


@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray
    row_labels: tuple = ()
    col_labels: tuple = ()

    @property
    def shape(self):
        return self.counts.shape


@dataclass(frozen=True)
class Chi2Result:
    statistic: float
    dof: int
    p_value: float
    significant: bool
    testable: bool = True

    def to_dict(self) -> dict:
        return asdict(self)


def build_contingency(values, labels, levels=None) -> ContingencyTable:
    """Tally docs by (feature bin, class); rows and columns are sorted.

    ``levels`` fixes the row set, so unobserved levels appear as zero rows.
    """
    values, labels = list(values), list(labels)
    if len(values) != len(labels):
        raise DomainError(f"length mismatch: {len(values)} values vs {len(labels)} labels")
    if not values:
        raise DomainError("empty input")
    rows = tuple(sorted(set(values) if levels is None else set(levels)))
    if levels is not None and not set(values) <= set(rows):
        raise DomainError("value outside the declared levels")
    cols = tuple(sorted(set(labels)))
    r_index = {v: i for i, v in enumerate(rows)}
    c_index = {v: i for i, v in enumerate(cols)}
    counts = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for v, c in zip(values, labels):
        counts[r_index[v], c_index[c]] += 1
    return ContingencyTable(counts, rows, cols)


def _gammainc_series(a: float, x: float) -> float:
    # lower regularized P(a, x), valid for x < a + 1
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(10_000):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * 1e-16:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gammaincc_cf(a: float, x: float) -> float:
    # upper regularized Q(a, x) by modified Lentz continued fraction, x >= a + 1
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10_000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def gammaincc(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) = Γ(a, x) / Γ(a)."""
    if a <= 0:
        raise DomainError("a must be positive")
    if x < 0:
        raise DomainError("x must be non-negative")
    if x == 0:
        return 1.0
    if x < a + 1.0:
        return min(1.0, max(0.0, 1.0 - _gammainc_series(a, x)))
    return min(1.0, max(0.0, _gammaincc_cf(a, x)))


def chi2_sf(statistic: float, dof: int) -> float:
    """Survival function of the chi-square distribution."""
    if statistic <= 0:
        return 1.0
    return gammaincc(dof / 2.0, statistic / 2.0)


def chi_square(table, alpha: float = 0.05) -> Chi2Result:
    """Pearson's test of independence, without continuity correction."""
    counts = np.asarray(getattr(table, "counts", table), dtype=np.float64)
    if counts.ndim != 2 or min(counts.shape) < 2:
        raise DegenerateTableError(f"need an R x C table with R, C >= 2, got shape {counts.shape}")
    if (counts < 0).any():
        raise DomainError("negative cell count")
    rows = counts.sum(axis=1)
    cols = counts.sum(axis=0)
    total = counts.sum()
    if total <= 0 or (rows == 0).any() or (cols == 0).any():
        raise DegenerateTableError("zero marginal: expected count of 0 in some cell")
    expected = np.outer(rows, cols) / total
    statistic = float(((counts - expected) ** 2 / expected).sum())
    dof = (counts.shape[0] - 1) * (counts.shape[1] - 1)
    p = chi2_sf(statistic, dof)
    return Chi2Result(statistic, dof, p, p < alpha)


def quartile_boundaries(values) -> list[float]:
    """Distinct nearest-rank 25th/50th/75th percentiles."""
    ordered = sorted(values)
    n = len(ordered)
    if n == 0:
        return []
    bounds = []
    for q in (0.25, 0.5, 0.75):
        rank = max(1, math.ceil(q * n))
        b = ordered[rank - 1]
        if b not in bounds:
            bounds.append(b)
    return bounds


def bin_values(values, bounds) -> list[int]:
    """Bin i holds values in (bounds[i-1], bounds[i]]; the last bin is open above."""
    bounds = np.asarray(bounds, dtype=np.float64)
    return [int(i) for i in np.searchsorted(bounds, np.asarray(values, dtype=np.float64), side="left")]


def select_meta(corpus, alpha: float = 0.05):
    """Test every meta-feature against the binary label.

    Continuous features are quartile-binned on the whole corpus first; empty
    bins are dropped.  A flag that never varies cannot be tested and is
    reported as not significant.  Returns ``(selected_names, results)`` where
    ``results`` maps each feature to a JSON-ready dict.
    """
    labels = corpus.labels
    if len(set(labels)) < 2:
        raise StratificationError("chi-square selection needs two classes")
    vectors = [extract_meta(t) for t in corpus.texts]
    results = {}
    selected = []
    for name in FEATURES:
        column = [getattr(v, name) for v in vectors]
        if name in CONTINUOUS:
            bounds = quartile_boundaries(column)
            binned = bin_values(column, bounds)
            # build_contingency only emits observed bins, so ties never leave empty rows
            table = build_contingency(binned, labels)
            bins = {"kind": "quartile", "boundaries": [float(b) for b in bounds]}
        else:
            binned = [int(bool(v)) for v in column]
            table = build_contingency(binned, labels, levels=(0, 1))
            bins = {"kind": "binary", "boundaries": [0.5]}
        try:
            res = chi_square(table, alpha)
            entry = res.to_dict()
        except DegenerateTableError as exc:
            entry = Chi2Result(0.0, 0, 1.0, False, testable=False).to_dict()
            entry["reason"] = str(exc)
        entry["bins"] = bins
        entry["table"] = table.counts.tolist()
        entry["continuity_correction"] = False
        results[name] = entry
        if entry["significant"]:
            selected.append(name)
    return selected, results


class MetaScaler:
    """Min-max scaler over selected meta-features, fitted on training text."""

    def __init__(self, features=FEATURES):
        self.features = tuple(features)
        self.low = None
        self.high = None

    @property
    def fitted(self) -> bool:
        return self.low is not None

    def _matrix(self, texts) -> np.ndarray:
        rows = [extract_meta(t) for t in texts]
        return np.array([[float(getattr(r, f)) for f in self.features] for r in rows], dtype=np.float64).reshape(
            len(rows), len(self.features)
        )

    def fit(self, texts) -> "MetaScaler":
        m = self._matrix(texts)
        if m.shape[0] == 0:
            raise DomainError("cannot fit scaler on zero documents")
        self.low = m.min(axis=0)
        self.high = m.max(axis=0)
        return self

    def scale(self, values) -> np.ndarray:
        if not self.fitted:
            raise StateError("meta scaler used before fit")
        values = np.asarray(values, dtype=np.float64)
        span = self.high - self.low
        safe = np.where(span > 0, span, 1.0)
        out = np.where(span > 0, (values - self.low) / safe, 0.0)
        return np.clip(out, 0.0, 1.0)

    def transform(self, texts) -> np.ndarray:
        return self.scale(self._matrix(texts))

    def to_dict(self) -> dict:
        return {
            "features": list(self.features),
            "low": None if self.low is None else self.low.tolist(),
            "high": None if self.high is None else self.high.tolist(),
        }

    @classmethod
    def from_dict(cls, d) -> "MetaScaler":
        s = cls(d["features"])
        if d.get("low") is not None:
            s.low = np.asarray(d["low"], dtype=np.float64)
            s.high = np.asarray(d["high"], dtype=np.float64)
        return s
