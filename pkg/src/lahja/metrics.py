"""Binary evaluation: confusion matrix, threshold metrics, log loss, kappa,
MCC and ROC/AUC, assembled into a JSON-ready report."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DomainError

REPORT_FORMAT = "lahja-report-v1"
EPS = 1e-15
# per-error cost of a confidently wrong hard label: -ln(EPS)
HARD_ERROR_COST = -math.log(EPS)


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: float
    fp: float
    fn: float
    tn: float

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise DomainError("confusion counts must be non-negative")

    @property
    def total(self):
        return self.tp + self.fp + self.fn + self.tn

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class BasicMetrics:
    accuracy: float
    precision: float
    recall: float
    f1: float
    degenerate: tuple = ()


def _binary(y, name):
    y = np.asarray(y)
    if y.ndim != 1:
        raise DomainError(f"{name} must be one-dimensional")
    if not np.isin(y, (0, 1)).all():
        raise DomainError(f"{name} must contain 0/1 labels")
    return y.astype(np.int64)


def confusion(y_true, y_pred) -> ConfusionMatrix:
    """2x2 tally with label 1 as the positive class."""
    y_true = _binary(y_true, "y_true")
    y_pred = _binary(y_pred, "y_pred")
    if len(y_true) != len(y_pred):
        raise DomainError(f"length mismatch: {len(y_true)} vs {len(y_pred)}")
    if len(y_true) == 0:
        raise DomainError("empty label arrays")
    tp = int(np.sum((y_true == 1) & (y_pred == 1)))
    fp = int(np.sum((y_true == 0) & (y_pred == 1)))
    fn = int(np.sum((y_true == 1) & (y_pred == 0)))
    tn = int(np.sum((y_true == 0) & (y_pred == 0)))
    return ConfusionMatrix(tp, fp, fn, tn)


def basic_metrics(cm: ConfusionMatrix) -> BasicMetrics:
    """Accuracy, precision, recall and F1.

    A zero denominator yields 0 for that metric and is listed in
    ``degenerate``.
    """
    if cm.total <= 0:
        raise DomainError("empty confusion matrix")
    degenerate = []
    accuracy = (cm.tp + cm.tn) / cm.total
    if cm.tp + cm.fp > 0:
        precision = cm.tp / (cm.tp + cm.fp)
    else:
        precision = 0.0
        degenerate.append("precision")
    if cm.tp + cm.fn > 0:
        recall = cm.tp / (cm.tp + cm.fn)
    else:
        recall = 0.0
        degenerate.append("recall")
    if precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    else:
        f1 = 0.0
        degenerate.append("f1")
    return BasicMetrics(accuracy, precision, recall, f1, tuple(degenerate))


def log_loss(y_true, p, eps: float = EPS, mode: str = "prob") -> float:
    """Mean binary cross-entropy with probabilities clipped to [eps, 1 - eps].

    ``mode="hard"`` first replaces ``p`` by the 0/1 label it rounds to
    (``p > 0.5``), giving ``error_rate * -ln(eps)`` up to O(eps) terms.
    """
    y = _binary(y_true, "y_true").astype(np.float64)
    p = np.asarray(p, dtype=np.float64)
    if p.shape != y.shape:
        raise DomainError("y_true and p differ in shape")
    if len(y) == 0:
        raise DomainError("empty input")
    if ((p < 0) | (p > 1)).any():
        raise DomainError("probabilities must lie in [0, 1]")
    if mode == "hard":
        p = (p > 0.5).astype(np.float64)
    elif mode != "prob":
        raise DomainError(f"unknown log-loss mode {mode!r}")
    # probability given to the true class, clipped symmetrically
    p_true = np.where(y == 1, p, 1.0 - p)
    p_true = np.clip(p_true, eps, 1.0 - eps)
    return float(-np.mean(np.log(p_true)))


def hard_log_loss_from_accuracy(accuracy: float, eps: float = EPS) -> float:
    return (1.0 - accuracy) * -math.log(eps) + accuracy * -math.log1p(-eps)


def cohen_kappa(cm: ConfusionMatrix) -> float:
    n = cm.total
    if n <= 0:
        raise DomainError("empty confusion matrix")
    p_o = (cm.tp + cm.tn) / n
    p_e = ((cm.tp + cm.fp) * (cm.tp + cm.fn) + (cm.fn + cm.tn) * (cm.fp + cm.tn)) / (n * n)
    if p_e == 1:
        return 0.0
    return (p_o - p_e) / (1 - p_e)


def mcc(cm: ConfusionMatrix) -> float:
    denom = (cm.tp + cm.fp) * (cm.tp + cm.fn) * (cm.tn + cm.fp) * (cm.tn + cm.fn)
    if denom == 0:
        return 0.0
    return float((cm.tp * cm.tn - cm.fp * cm.fn) / math.sqrt(denom))


@dataclass(frozen=True)
class RocCurve:
    fpr: tuple
    tpr: tuple
    thresholds: tuple
    auc: float

    @property
    def points(self):
        return list(zip(self.fpr, self.tpr))


def roc_curve(y_true, scores) -> RocCurve:
    """One point per distinct score (descending), starting at (0, 0); trapezoid AUC."""
    y = _binary(y_true, "y_true")
    s = np.asarray(scores, dtype=np.float64)
    if s.shape != y.shape:
        raise DomainError("y_true and scores differ in shape")
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DomainError("ROC needs both classes in y_true")
    order = np.argsort(-s, kind="mergesort")
    s, y = s[order], y[order]
    # last index of each run of equal scores
    last = np.r_[np.flatnonzero(np.diff(s) != 0), len(s) - 1]
    tps = np.cumsum(y)[last]
    fps = (last + 1) - tps
    tpr = np.r_[0.0, tps / n_pos]
    fpr = np.r_[0.0, fps / n_neg]
    thresholds = np.r_[np.inf, s[last]]
    auc = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))
    return RocCurve(tuple(fpr.tolist()), tuple(tpr.tolist()), tuple(thresholds.tolist()), auc)


@dataclass
class EvalReport:
    config: dict
    n_test: int
    confusion: ConfusionMatrix
    accuracy: float
    precision: float
    recall: float
    f1: float
    log_loss_prob: float
    log_loss_hard: float
    kappa: float
    mcc: float
    auc: float
    roc: list
    calibrated: bool = True
    degenerate: list = field(default_factory=list)

    def to_dict(self, include_roc: bool = True) -> dict:
        d = {
            "format": REPORT_FORMAT,
            "config": self.config,
            "n_test": self.n_test,
            "confusion": self.confusion.to_dict(),
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "log_loss_prob": self.log_loss_prob,
            "log_loss_hard": self.log_loss_hard,
            "log_loss_eps": EPS,
            "kappa": self.kappa,
            "mcc": self.mcc,
            "auc": self.auc,
            "probabilities_calibrated": self.calibrated,
            "degenerate": list(self.degenerate),
        }
        if include_roc:
            d["roc"] = [list(p) for p in self.roc]
        return d


def report_from_predictions(y_true, y_pred, scores, proba, config=None, calibrated=True) -> EvalReport:
    """Assemble every metric from labels, hard predictions, scores and probabilities."""
    cm = confusion(y_true, y_pred)
    basic = basic_metrics(cm)
    y = np.asarray(y_true)
    if len(np.unique(y)) == 2:
        roc = roc_curve(y, scores)
        auc, points = roc.auc, roc.points
        degenerate = list(basic.degenerate)
    else:
        auc, points = float("nan"), []
        degenerate = list(basic.degenerate) + ["roc"]
    return EvalReport(
        config=dict(config or {}),
        n_test=int(cm.total),
        confusion=cm,
        accuracy=basic.accuracy,
        precision=basic.precision,
        recall=basic.recall,
        f1=basic.f1,
        log_loss_prob=log_loss(y_true, proba, mode="prob"),
        log_loss_hard=log_loss(y_true, np.asarray(y_pred, dtype=np.float64), mode="hard"),
        kappa=cohen_kappa(cm),
        mcc=mcc(cm),
        auc=auc,
        roc=points,
        calibrated=calibrated,
        degenerate=degenerate,
    )


def evaluate(model, test, vocab, norm=None, meta_scaler=None, config=None) -> EvalReport:
    """Preprocess, vectorize and score a labelled test corpus."""
    from .vectorize import featurize

    X = featurize(test.texts, vocab, norm, meta_scaler)
    return evaluate_vectors(model, X, test.binary_targets(), config)


def evaluate_vectors(model, X, y_true, config=None) -> EvalReport:
    """Score a fitted model on vectorized test rows ``X`` with 0/1 labels."""
    scores = model.decision_scores(X)
    y_pred = model.predict(X)
    proba = model.predict_proba(X)
    return report_from_predictions(y_true, y_pred, scores, proba, config, model.calibrated)


def reconstruct_confusion(accuracy, precision, recall, total=1.0, positive_fraction=0.5) -> ConfusionMatrix:
    """Confusion matrix implied by precision and recall on a test set with a
    known positive share.  ``accuracy`` is returned unchanged by the result
    only when the inputs are mutually consistent; it is used as a check."""
    pos = total * positive_fraction
    neg = total - pos
    tp = recall * pos
    fn = pos - tp
    fp = tp / precision - tp if precision > 0 else 0.0
    tn = neg - fp
    cm = ConfusionMatrix(tp, fp, fn, tn)
    if abs((tp + tn) / total - accuracy) > 5e-3:
        raise DomainError("accuracy inconsistent with precision/recall under the given class balance")
    return cm


def to_markdown_tables(reports) -> tuple[str, str]:
    """Two Markdown tables: accuracy/precision/recall/F1 and log loss/kappa/MCC."""
    from .models import DISPLAY_NAMES

    head4 = "| Classifier | Word gram | Character gram | Accuracy | Precision | Recall | F1 |\n"
    head4 += "|---|---|---|---|---|---|---|\n"
    head5 = "| Classifier | Word gram | Character gram | log loss | Cohen kappa score | Matthews Corr. Coeff. |\n"
    head5 += "|---|---|---|---|---|---|\n"
    rows4, rows5 = [], []
    for r in reports:
        c = r.config
        name = DISPLAY_NAMES.get(c.get("classifier"), c.get("classifier"))
        wr = _fmt_range(c.get("word_range"))
        cr = _fmt_range(c.get("char_range"))
        rows4.append(f"| {name} | {wr} | {cr} | {r.accuracy:.5f} | {r.precision:.5f} | {r.recall:.5f} | {r.f1:.5f} |")
        rows5.append(f"| {name} | {wr} | {cr} | {r.log_loss_hard:.5f} | {r.kappa:.5f} | {r.mcc:.5f} |")
    return head4 + "\n".join(rows4) + "\n", head5 + "\n".join(rows5) + "\n"


def _fmt_range(r):
    if r is None:
        return "-"
    lo, hi = r
    return f"({lo}, {hi})"


def roc_csv(reports) -> str:
    """Long-format CSV of ROC points: classifier, word_range, char_range, fpr, tpr."""
    lines = ["classifier,word_range,char_range,fpr,tpr"]
    for r in reports:
        c = r.config
        wr = "-".join(map(str, c.get("word_range") or ()))
        cr = "-".join(map(str, c.get("char_range") or ()))
        for fpr, tpr in r.roc:
            lines.append(f"{c.get('classifier')},{wr},{cr},{fpr!r},{tpr!r}")
    return "\n".join(lines) + "\n"
