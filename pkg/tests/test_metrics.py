import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lahja import metrics as M
from lahja.errors import DomainError


def test_confusion_tally():
    cm = M.confusion([1, 1, 0, 0], [1, 0, 0, 1])
    assert (cm.tp, cm.fn, cm.tn, cm.fp) == (1, 1, 1, 1)


def test_confusion_perfect_and_all_positive():
    cm = M.confusion([1, 0, 1, 0], [1, 0, 1, 0])
    assert cm.fp == cm.fn == 0
    cm = M.confusion([1, 0, 1, 0], [1, 1, 1, 1])
    assert cm.fp == 2 and cm.tn == 0


def test_confusion_errors():
    with pytest.raises(DomainError):
        M.confusion([1, 0], [1])
    with pytest.raises(DomainError):
        M.confusion([2], [1])
    with pytest.raises(DomainError):
        M.confusion([], [])


def test_basic_from_reconstruction():
    cm = M.reconstruct_confusion(0.85589, 0.84844, 0.86658)
    b = M.basic_metrics(cm)
    assert b.accuracy == pytest.approx(0.85589, abs=5e-5)
    assert b.precision == pytest.approx(0.84844, abs=1e-9)
    assert b.recall == pytest.approx(0.86658, abs=1e-9)
    assert b.f1 == pytest.approx(0.85741, abs=5e-5)


def test_reconstruction_inconsistent():
    with pytest.raises(DomainError):
        M.reconstruct_confusion(0.5, 0.9, 0.9)


def test_single_tp():
    b = M.basic_metrics(M.ConfusionMatrix(1, 0, 0, 0))
    assert (b.accuracy, b.precision, b.recall, b.f1) == (1.0, 1.0, 1.0, 1.0)


def test_degenerate_precision():
    b = M.basic_metrics(M.ConfusionMatrix(0, 0, 3, 5))
    assert b.precision == 0.0
    assert "precision" in b.degenerate and "f1" in b.degenerate


def test_hard_log_loss_example():
    assert M.hard_log_loss_from_accuracy(0.85589) == pytest.approx(0.14411 * 34.53878, abs=1e-4)
    n = 100_000
    y = np.r_[np.ones(n // 2), np.zeros(n // 2)].astype(int)
    pred = y.copy()
    pred[:14411] = 0
    assert M.log_loss(y, pred.astype(float), mode="hard") == pytest.approx(4.97743, abs=1e-3)


def test_log_loss_half():
    assert M.log_loss([1, 0, 0, 1, 1], [0.5] * 5) == pytest.approx(math.log(2))


def test_log_loss_perfect():
    assert M.log_loss([1, 0, 1], [1.0, 0.0, 1.0]) < 1e-10


def test_log_loss_domain():
    with pytest.raises(DomainError):
        M.log_loss([1], [1.5])
    with pytest.raises(DomainError):
        M.log_loss([1], [0.5], mode="soft")


def test_kappa_examples():
    cm = M.reconstruct_confusion(0.84411, 0.84205, 0.84712)
    assert M.cohen_kappa(cm) == pytest.approx(0.68822, abs=2e-4)
    assert M.cohen_kappa(M.ConfusionMatrix(5, 0, 0, 5)) == 1.0
    assert M.cohen_kappa(M.ConfusionMatrix(5, 5, 0, 0)) == 0.0


def test_mcc_examples():
    assert M.mcc(M.ConfusionMatrix(5, 0, 0, 5)) == 1.0
    assert M.mcc(M.ConfusionMatrix(0, 5, 5, 0)) == -1.0
    assert M.mcc(M.ConfusionMatrix(5, 5, 0, 0)) == 0.0


def test_roc_simple():
    roc = M.roc_curve([0, 0, 1, 1], [0.1, 0.4, 0.35, 0.8])
    assert roc.auc == pytest.approx(0.75)
    assert roc.points[0] == (0.0, 0.0) and roc.points[-1] == (1.0, 1.0)


def test_roc_ties_grouped():
    roc = M.roc_curve([0, 1, 0, 1], [0.5, 0.5, 0.5, 0.5])
    assert roc.points == [(0.0, 0.0), (1.0, 1.0)]
    assert roc.auc == 0.5


def test_roc_needs_both_classes():
    with pytest.raises(DomainError):
        M.roc_curve([1, 1], [0.2, 0.3])


def _report(y, s):
    y = np.asarray(y)
    s = np.asarray(s, dtype=float)
    p = 1 / (1 + np.exp(-s))
    return M.report_from_predictions(y, (s > 0).astype(int), s, p, {"classifier": "multinomial_nb"})


def test_report_json_fields():
    r = _report([1, 0, 1, 0], [2.0, -1.0, -0.5, 0.3])
    d = r.to_dict()
    assert d["format"] == M.REPORT_FORMAT
    assert d["log_loss_eps"] == 1e-15
    assert set(d["confusion"]) == {"tp", "fp", "fn", "tn"}
    assert "roc" not in r.to_dict(include_roc=False)


def test_report_single_class_truth():
    r = _report([1, 1], [1.0, -1.0])
    assert "roc" in r.degenerate and math.isnan(r.auc)


def test_markdown_tables_and_csv():
    reports = []
    for kind in ("logistic_regression", "multinomial_nb"):
        r = _report([1, 0, 1, 0], [2.0, -1.0, -0.5, 0.3])
        r.config = {"classifier": kind, "word_range": [1, 2], "char_range": [1, 5]}
        reports.append(r)
    t4, t5 = M.to_markdown_tables(reports)
    assert t4.splitlines()[0] == "| Classifier | Word gram | Character gram | Accuracy | Precision | Recall | F1 |"
    assert t4.splitlines()[2].startswith("| Logistic Regression | (1, 2) | (1, 5) | 0.50000 |")
    assert t5.splitlines()[3].startswith("| Multinomial NB | (1, 2) | (1, 5) | 17.26939 |")
    csv = M.roc_csv(reports).splitlines()
    assert csv[0] == "classifier,word_range,char_range,fpr,tpr"
    assert csv[1] == "logistic_regression,1-2,1-5,0.0,0.0"


labels = st.lists(st.integers(0, 1), min_size=2, max_size=60)


@settings(max_examples=200, deadline=None)
@given(labels, st.data())
def test_report_identities(y, data):
    y = np.array(y)
    s = np.array(data.draw(st.lists(st.floats(-5, 5), min_size=len(y), max_size=len(y))))
    r = _report(y, s)
    cm = r.confusion
    assert r.accuracy == (cm.tp + cm.tn) / cm.total
    n = cm.total
    p_o = (cm.tp + cm.tn) / n
    p_e = ((cm.tp + cm.fp) * (cm.tp + cm.fn) + (cm.fn + cm.tn) * (cm.fp + cm.tn)) / n**2
    if p_e < 1:
        assert r.kappa == pytest.approx((p_o - p_e) / (1 - p_e), abs=1e-12)
    assert -1 <= r.mcc <= 1
    assert r.log_loss_hard == pytest.approx(M.hard_log_loss_from_accuracy(r.accuracy), abs=1e-12)
    if r.precision + r.recall > 0:
        assert r.f1 == pytest.approx(2 * r.precision * r.recall / (r.precision + r.recall))
    if len(set(y.tolist())) == 2:
        assert 0 <= r.auc <= 1
        fpr, tpr = zip(*r.roc)
        assert all(b >= a for a, b in zip(fpr, fpr[1:]))
        assert all(b >= a for a, b in zip(tpr, tpr[1:]))
        assert r.roc[0] == (0.0, 0.0) and r.roc[-1] == (1.0, 1.0)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 40), st.data())
def test_kappa_balanced_identity(half, data):
    y = np.r_[np.ones(half), np.zeros(half)].astype(int)
    pred = np.array(data.draw(st.lists(st.integers(0, 1), min_size=2 * half, max_size=2 * half)))
    cm = M.confusion(y, pred)
    acc = M.basic_metrics(cm).accuracy
    assert M.cohen_kappa(cm) == pytest.approx(2 * acc - 1, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(labels, st.randoms(use_true_random=False), st.data())
def test_permutation_invariance(y, rnd, data):
    y = np.array(y)
    pred = np.array(data.draw(st.lists(st.integers(0, 1), min_size=len(y), max_size=len(y))))
    perm = list(range(len(y)))
    rnd.shuffle(perm)
    a, b = M.confusion(y, pred), M.confusion(y[perm], pred[perm])
    assert a == b and M.mcc(a) == M.mcc(b)


def test_against_sklearn():
    skm = pytest.importorskip("sklearn.metrics")
    rng = np.random.default_rng(0)
    for _ in range(50):
        y = rng.integers(0, 2, 40)
        y[:2] = [0, 1]
        s = np.round(rng.normal(size=40), 1)  # rounding creates ties
        p = 1 / (1 + np.exp(-s))
        pred = (s > 0).astype(int)
        cm = M.confusion(y, pred)
        assert M.cohen_kappa(cm) == pytest.approx(skm.cohen_kappa_score(y, pred), abs=1e-12)
        assert M.mcc(cm) == pytest.approx(skm.matthews_corrcoef(y, pred), abs=1e-12)
        assert M.roc_curve(y, s).auc == pytest.approx(skm.roc_auc_score(y, s), abs=1e-12)
        assert M.log_loss(y, p) == pytest.approx(skm.log_loss(y, p), abs=1e-12)
