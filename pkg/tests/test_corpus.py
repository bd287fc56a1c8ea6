import math

import pytest

from lahja.corpus import (
    OTHER,
    Document,
    LabeledCorpus,
    analyze,
    build_binary_task,
    class_token_entropy,
    length_histogram,
    load_tsv,
    ngram_frequencies,
    ngram_stats,
    relabel_binary,
    stratified_split,
    top_ngrams,
    write_tsv,
)
from lahja.errors import DomainError, ParseError, QuotaError, StratificationError
from lahja.textproc import NormalizationConfig

RAW = NormalizationConfig.raw()


def _corpus(texts, label="A"):
    return LabeledCorpus([Document(t, label) for t in texts])


def test_load_tsv(tmp_path):
    path = tmp_path / "d.tsv"
    path.write_text("LY\tشن حالكم\nEG\tازيك\n", encoding="utf-8")
    corpus = load_tsv(path)
    assert len(corpus) == 2
    assert corpus.counts == {"EG": 1, "LY": 1}


def test_load_empty(tmp_path):
    path = tmp_path / "e.tsv"
    path.write_text("", encoding="utf-8")
    assert len(load_tsv(path)) == 0


def test_missing_tab(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text("LYشن حالكم\n", encoding="utf-8")
    with pytest.raises(ParseError, match="line 1"):
        load_tsv(path)


def test_bad_utf8(tmp_path):
    path = tmp_path / "bin.tsv"
    path.write_bytes(b"LY\tok\nLY\t\xff\xfe\n")
    with pytest.raises(ParseError, match="line 2"):
        load_tsv(path)


def test_csv_columns(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("id,dialect,tweet\n1,LY,شن حالك\n2,TN,برشا\n", encoding="utf-8")
    corpus = load_tsv(path, label_column="dialect", text_column="tweet")
    assert corpus.labels == ["LY", "TN"]
    assert corpus.texts == ["شن حالك", "برشا"]


def test_write_roundtrip(tmp_path, tiny_corpus):
    path = tmp_path / "out.tsv"
    write_tsv(tiny_corpus, path)
    assert load_tsv(path) == tiny_corpus


def _dialects():
    docs = [Document(f"ly{i}", "LY") for i in range(40)]
    docs += [Document(f"tn{i}", "TN") for i in range(15)]
    docs += [Document(f"eg{i}", "EG") for i in range(30)]
    docs += [Document(f"sa{i}", "SA") for i in range(30)]
    return LabeledCorpus(docs)


def test_binary_task_balanced():
    task = build_binary_task(_dialects(), "LY", tunisian_quota=10, seed=1)
    assert task.counts == {"LY": 40, OTHER: 40}
    origins = [d.origin for d in task if d.label == OTHER]
    assert origins.count("TN") == 10
    assert task.positive_label == "LY"


def test_binary_task_deterministic():
    a = build_binary_task(_dialects(), "LY", tunisian_quota=10, seed=5)
    b = build_binary_task(_dialects(), "LY", tunisian_quota=10, seed=5)
    assert a.docs == b.docs


def test_binary_task_quota_shortfall():
    with pytest.raises(QuotaError) as err:
        build_binary_task(_dialects(), "LY", tunisian_quota=20)
    assert err.value.shortfall == 5


def test_zero_quotas_single_class():
    task = build_binary_task(_dialects(), "LY", other_quota=0, tunisian_quota=0)
    assert task.counts == {"LY": 40}
    with pytest.raises(StratificationError):
        stratified_split(task)


def test_relabel():
    task = relabel_binary(_dialects(), "LY")
    assert task.counts == {"LY": 40, OTHER: 75}
    assert task.binary_targets().sum() == 40


def test_split_counts():
    task = build_binary_task(_dialects(), "LY", tunisian_quota=10)
    train, test = stratified_split(task, 0.2, seed=0)
    assert test.counts == {"LY": 8, OTHER: 8}
    assert train.counts == {"LY": 32, OTHER: 32}
    assert set(train.docs).isdisjoint(test.docs)


def test_split_half():
    corpus = LabeledCorpus([Document("a1", "A"), Document("a2", "A"), Document("b1", "B"), Document("b2", "B")])
    train, test = stratified_split(corpus, 0.5, seed=3)
    assert train.counts == test.counts == {"A": 1, "B": 1}


def test_split_deterministic(tiny_corpus):
    task = relabel_binary(tiny_corpus, "LY")
    assert stratified_split(task, 0.25, 7) == stratified_split(task, 0.25, 7)


def test_split_rejects_tiny_class():
    corpus = LabeledCorpus([Document("a", "A"), Document("b", "B"), Document("b", "B")])
    with pytest.raises(StratificationError):
        stratified_split(corpus)


def test_split_fraction_domain(tiny_corpus):
    with pytest.raises(DomainError):
        stratified_split(tiny_corpus, 1.0)


def test_ngram_stats_unigram():
    s = ngram_stats(_corpus(["a b", "b c"]), 1, RAW)
    assert (s.distinct_tokens, s.total_tokens, s.hapax_count) == (3, 4, 2)


def test_ngram_stats_bigram():
    s = ngram_stats(_corpus(["a b", "b c"]), 2, RAW)
    assert (s.distinct_tokens, s.total_tokens, s.hapax_count) == (2, 2, 2)


def test_ngram_n_invalid():
    with pytest.raises(DomainError):
        ngram_frequencies(_corpus(["a"]), 0, RAW)


def test_top_ngrams():
    assert top_ngrams(_corpus(["a a b"]), 1, 2, RAW) == [("a", 2), ("b", 1)]
    assert top_ngrams(_corpus(["b a"]), 1, 1, RAW) == [("a", 1)]
    assert top_ngrams(_corpus(["b a"]), 1, 10, RAW) == [("a", 1), ("b", 1)]


def test_length_histogram():
    corpus = LabeledCorpus(
        [Document("a b c", "A"), Document("a b c", "A"), Document("a b c d e", "A"), Document("x", "B")]
    )
    assert length_histogram(corpus, "A", RAW) == {3: 2, 5: 1}
    assert length_histogram(corpus, "B", RAW) == {1: 1}


def test_entropy():
    assert class_token_entropy(_corpus(["a a a"]), "A", RAW) == 0.0
    assert class_token_entropy(_corpus(["a b"]), "A", RAW) == pytest.approx(1.0)
    assert class_token_entropy(_corpus(["a a a b"]), "A", RAW) == pytest.approx(
        -0.75 * math.log2(0.75) - 0.25 * math.log2(0.25)
    )


def test_analyze_report(tiny_corpus):
    rep = analyze(tiny_corpus, k=3, max_n=2)
    assert rep["n_docs"] == 8
    assert [s["n"] for s in rep["ngram_stats"]] == [1, 2]
    assert set(rep["classes"]) == {"EG", "LB", "LY", "TN"}


def test_analyze_order_independent(tiny_corpus):
    rev = LabeledCorpus(tuple(reversed(tiny_corpus.docs)))
    a, b = analyze(tiny_corpus), analyze(rev)
    assert a["ngram_stats"] == b["ngram_stats"]
    assert a["classes"] == b["classes"]
