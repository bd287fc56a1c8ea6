import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lahja import vectorize as V
from lahja.errors import DomainError, FitError, FormatError
from lahja.meta import MetaScaler


def test_range_parse():
    assert V.NgramRange.parse("1,2") == V.NgramRange(1, 2)
    assert V.NgramRange.parse("(1, 3)") == V.NgramRange(1, 3)
    assert V.NgramRange.parse((2, 5)).as_tuple() == (2, 5)
    assert str(V.NgramRange(1, 5)) == "(1, 5)"
    for bad in ("3,1", "0,2", "x"):
        with pytest.raises(DomainError):
            V.NgramRange.parse(bad)


def test_word_grams():
    assert V.word_grams(["a", "b", "c"], V.NgramRange(1, 2)) == ["a", "b", "c", "a b", "b c"]


def test_hand_enumerated_columns():
    vocab = V.fit([["اب", "جد"]], (1, 1), (1, 2))
    assert set(vocab.word_map) == {"اب", "جد"}
    expected_chars = {"ا", "ب", " ", "ج", "د", "اب", "ب ", " ج", "جد"}
    assert set(vocab.char_map) == expected_chars
    assert (vocab.doc_freq == 1).all()
    cols = vocab.columns()
    assert cols[: len(vocab.word_map)] == ["w:اب", "w:جد"]
    assert cols[len(vocab.word_map):] == ["c:" + g for g in sorted(expected_chars)]


def test_fit_deterministic():
    docs = [["a", "b"], ["b", "c", "a"]]
    assert V.fit(docs) == V.fit(docs)


def test_single_column_normalization():
    vocab = V.fit([["a"]], (1, 1), None)
    v = V.transform(["a"], vocab)
    assert v.entries == [(0, 1.0)]


def test_two_doc_idf():
    vocab = V.fit([["a"], ["b"]], (1, 1), None)
    assert vocab.idf.tolist() == [math.log(3 / 2) + 1, math.log(3 / 2) + 1]
    v = V.transform(["a"], vocab)
    assert v.indices.tolist() == [vocab.word_map["a"]]
    assert v.values.tolist() == [1.0]


def test_closed_form_weights():
    docs = [["a", "a", "b"], ["b", "c"]]
    vocab = V.fit(docs, (1, 1), None)
    # hand: idf(a)=ln(3/2)+1, idf(b)=ln(3/3)+1=1; doc1 tf a=2, b=1
    ia, ib = math.log(1.5) + 1, 1.0
    w = np.array([2 * ia, 1 * ib])
    w /= np.linalg.norm(w)
    v = V.transform(docs[0], vocab)
    assert v.to_dense()[[vocab.word_map["a"], vocab.word_map["b"]]].tolist() == w.tolist()


def test_unknown_grams_zero_vector():
    vocab = V.fit([["a"]], (1, 1), (1, 2))
    v = V.transform(["ز"], vocab)
    assert v.nnz == 0 and v.dim == vocab.dim


def test_min_df():
    vocab = V.fit([["a", "b"], ["a"]], (1, 1), None, min_df=2)
    assert list(vocab.word_map) == ["a"]


def test_fit_errors():
    with pytest.raises(FitError):
        V.fit([])
    with pytest.raises(DomainError):
        V.fit([["a"]], None, None)


def test_vocab_roundtrip():
    vocab = V.fit([["شن", "حالك"], ["باهي"]])
    again = V.Vocabulary.from_dict(vocab.to_dict())
    assert again == vocab
    assert np.array_equal(again.idf, vocab.idf)


def test_vocab_bad_dict():
    d = V.fit([["a"]]).to_dict()
    del d["doc_freq"]
    with pytest.raises(FormatError, match="vocabulary.doc_freq"):
        V.Vocabulary.from_dict(d)
    d = V.fit([["a"]]).to_dict()
    d["formula"] = "other"
    with pytest.raises(FormatError, match="vocabulary.formula"):
        V.Vocabulary.from_dict(d)


def test_to_csr_dim_mismatch():
    with pytest.raises(DomainError):
        V.to_csr([V.SparseVector([0], [1.0], 2), V.SparseVector([0], [1.0], 3)])


def test_append_meta():
    v = V.SparseVector([1], [1.0], 3)
    out = V.append_meta(v, [0.0, 1.0])
    assert out.dim == 5 and out.entries == [(1, 1.0), (4, 1.0)]
    with pytest.raises(DomainError):
        V.append_meta(v, [1.5])


def test_featurize_meta_columns():
    texts = ["شن حالك!", "باهي"]
    vocab = V.fit([["شن", "حالك"], ["باهي"]])
    scaler = MetaScaler(("char_length", "has_exclamation")).fit(texts)
    X = V.featurize(texts, vocab, meta_scaler=scaler)
    assert X.shape == (2, vocab.dim + 2)
    assert X[0, vocab.dim] == 1.0 and X[1, vocab.dim] == 0.0


def test_matches_sklearn_tfidf_on_counts():
    sk = pytest.importorskip("sklearn.feature_extraction.text")
    docs = [["شن", "حالك", "شن"], ["باهي", "هلبا"], ["شن", "باهي"], ["هلبا", "هلبا", "هلبا"]]
    vocab = V.fit(docs, (1, 2), (1, 3))
    # brute-force count matrix from the n-gram definitions
    counts = np.zeros((len(docs), vocab.dim))
    for i, toks in enumerate(docs):
        for g in V.word_grams(toks, vocab.word_range):
            counts[i, vocab.word_map[g]] += 1
        for g in V.char_grams(" ".join(toks), vocab.char_range):
            counts[i, vocab.char_map[g]] += 1
    ref = sk.TfidfTransformer(norm="l2", smooth_idf=True, sublinear_tf=False).fit_transform(counts).toarray()
    ours = V.to_csr(V.transform_corpus(docs, vocab)).toarray()
    assert np.allclose(ours, ref, atol=1e-12)


words = st.lists(st.sampled_from(["شن", "حالك", "باهي", "هلبا", "برشا", "ازيك", "ا"]), max_size=8)


@settings(max_examples=200, deadline=None)
@given(st.lists(words, min_size=1, max_size=6), words)
def test_unit_norm(train, doc):
    vocab = V.fit(train)
    v = V.transform(doc, vocab)
    if v.nnz:
        assert abs(v.norm() - 1.0) <= 1e-9
        assert (v.values > 0).all()
    assert list(v.indices) == sorted(v.indices)
