"""Seeded two-class corpora of pseudo-Arabic words for benchmarks and tests.

Each class draws tokens from its own Zipf-weighted vocabulary; a fraction
``overlap`` of each vocabulary is shared between the classes.  Every class
ranks its vocabulary in its own random order, so a shared word is usually
common in one class and rare in the other.
"""

from __future__ import annotations

import numpy as np

from .corpus import Document, LabeledCorpus

# letters untouched by orthographic normalization
LETTERS = tuple("بتثجحخدذرزسشصضطظعغفقكلمنهوي")


def _make_words(rng, n, taken):
    words = []
    while len(words) < n:
        k = int(rng.integers(3, 7))
        letters = []
        for _ in range(k):
            ch = LETTERS[int(rng.integers(len(LETTERS)))]
            # no doubled letters, so elongation squeezing never fires
            while letters and ch == letters[-1]:
                ch = LETTERS[int(rng.integers(len(LETTERS)))]
            letters.append(ch)
        w = "".join(letters)
        if w not in taken:
            taken.add(w)
            words.append(w)
    return words


def synthetic_corpus(
    n_docs: int = 2000,
    overlap: float = 0.3,
    vocab_size: int = 1000,
    doc_len=(3, 12),
    zipf: float = 1.1,
    positive: str = "LY",
    negative: str = "OTHER",
    seed: int = 0,
) -> LabeledCorpus:
    """Balanced corpus of ``n_docs`` docs (odd counts favour the negative class)."""
    if not 0 <= overlap <= 1:
        raise ValueError("overlap must be in [0, 1]")
    rng = np.random.default_rng(seed)
    n_shared = int(round(overlap * vocab_size))
    taken = set()
    shared = _make_words(rng, n_shared, taken)
    own = {c: _make_words(rng, vocab_size - n_shared, taken) for c in (positive, negative)}
    weights = 1.0 / np.arange(1, vocab_size + 1) ** zipf
    weights /= weights.sum()
    vocab = {}
    for c in (positive, negative):
        words = shared + own[c]
        vocab[c] = [words[i] for i in rng.permutation(vocab_size)]

    n_pos = n_docs // 2
    labels = [positive] * n_pos + [negative] * (n_docs - n_pos)
    rng.shuffle(labels)
    lo, hi = doc_len
    docs = []
    for label in labels:
        k = int(rng.integers(lo, hi + 1))
        idx = rng.choice(vocab_size, size=k, p=weights)
        docs.append(Document(" ".join(vocab[label][i] for i in idx), label))
    provenance = {"source": "synthetic", "seed": seed, "overlap": overlap, "vocab_size": vocab_size}
    return LabeledCorpus(docs, positive_label=positive, provenance=provenance)
