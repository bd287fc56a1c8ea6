"""Binary text classifiers over sparse tf-idf rows.

Four kinds share one contract (:func:`fit`, :func:`decision_scores`,
:func:`predict`, :func:`predict_proba`):

* ``multinomial_nb`` - additive-smoothed multinomial likelihoods; fractional
  tf-idf weights are summed in place of counts.
* ``bernoulli_nb`` - presence/absence likelihoods on binarized inputs.
* ``logistic_regression`` and ``linear_svm`` - mean logistic / hinge loss plus
  ``(lam / 2) * ||w||^2``, minimized by seeded, epoch-shuffled SGD with step
  ``1 / (lam * (t + t0))``.  The bias is not regularized.

Labels are 0/1 with 1 the positive class.  Scores are positive-class log odds
(naive Bayes) or margins (linear models).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np
from scipy import sparse
from scipy.special import expit

from .errors import DomainError, FitError, FormatError
from .vectorize import SparseVector, to_csr

KINDS = ("logistic_regression", "linear_svm", "multinomial_nb", "bernoulli_nb")
NB_KINDS = ("multinomial_nb", "bernoulli_nb")
# |score| at or below this is a tie (absorbs round-off in log-space sums)
TIE_TOL = 1e-10
LINEAR_KINDS = ("logistic_regression", "linear_svm")
DISPLAY_NAMES = {
    "logistic_regression": "Logistic Regression",
    "linear_svm": "Linear SVM",
    "multinomial_nb": "Multinomial NB",
    "bernoulli_nb": "Bernoulli NB",
}


@dataclass(frozen=True)
class TrainConfig:
    kind: str = "multinomial_nb"
    alpha: float = 1.0
    binarize_threshold: float = 0.0
    l2_lambda: float = 1e-4
    epochs: int = 20
    tol: float = 1e-5
    # epochs without a tol-relative improvement on the best objective before stopping
    patience: int = 5
    seed: int = 0
    # one full-gradient step per epoch with backtracking; used by tests
    full_batch: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown classifier kind {self.kind!r}; expected one of {KINDS}")
        if not self.alpha > 0:
            raise DomainError("alpha must be > 0")
        if self.l2_lambda < 0:
            raise DomainError("l2_lambda must be >= 0")
        if self.epochs < 1:
            raise DomainError("epochs must be >= 1")
        if self.patience < 1:
            raise DomainError("patience must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)


def as_matrix(X, dim: int | None = None) -> sparse.csr_matrix:
    if sparse.issparse(X):
        X = sparse.csr_matrix(X, dtype=np.float64)
    elif isinstance(X, np.ndarray):
        X = sparse.csr_matrix(np.atleast_2d(X).astype(np.float64))
    else:
        X = list(X)
        if X and not isinstance(X[0], SparseVector):
            X = sparse.csr_matrix(np.atleast_2d(np.asarray(X, dtype=np.float64)))
        else:
            X = to_csr(X, dim)
    if dim is not None and X.shape[1] != dim:
        raise DomainError(f"dimension mismatch: model expects {dim}, got {X.shape[1]}")
    return X


# -- losses -------------------------------------------------------------------


def _loss(kind, margins, ypm):
    z = ypm * margins
    if kind == "logistic_regression":
        return np.logaddexp(0.0, -z)
    return np.maximum(0.0, 1.0 - z)


def _dloss(kind, margins, ypm):
    """Derivative of the per-sample loss with respect to the margin."""
    z = ypm * margins
    if kind == "logistic_regression":
        return -ypm * expit(-z)
    return np.where(z < 1.0, -ypm, 0.0)


def objective(w, b, X, y, lam, kind="logistic_regression") -> float:
    """Mean loss plus ``lam / 2 * ||w||^2`` for 0/1 labels ``y``."""
    X = as_matrix(X)
    ypm = 2.0 * np.asarray(y, dtype=np.float64) - 1.0
    margins = X @ w + b
    return float(_loss(kind, margins, ypm).mean() + 0.5 * lam * np.dot(w, w))


def gradient(w, b, X, y, lam, kind="logistic_regression"):
    """(Sub)gradient of :func:`objective` with respect to ``(w, b)``."""
    X = as_matrix(X)
    ypm = 2.0 * np.asarray(y, dtype=np.float64) - 1.0
    g = _dloss(kind, X @ w + b, ypm)
    n = X.shape[0]
    return X.T @ g / n + lam * w, float(g.sum() / n)


def _initial_step(kind, lam):
    if lam == 0:
        return 1.0
    typw = math.sqrt(1.0 / math.sqrt(lam))
    d = abs(float(_dloss(kind, np.array([-typw]), np.array([1.0]))[0]))
    eta0 = typw / max(1.0, d)
    # keeps the shrink factor 1 - eta * lam positive
    return min(eta0, 0.5 / lam)


def _sgd(X, y, cfg: TrainConfig):
    n, d = X.shape
    lam = cfg.l2_lambda
    ypm = 2.0 * y.astype(np.float64) - 1.0
    eta0 = _initial_step(cfg.kind, lam)
    rng = np.random.default_rng(cfg.seed)
    indptr, indices, data = X.indptr, X.indices, X.data

    # w = scale * v keeps the L2 shrink O(1) per step
    v = np.zeros(d)
    scale = 1.0
    b = 0.0
    t = 0
    best = objective(v, b, X, y, lam, cfg.kind)
    history = [best]
    stale = 0
    logistic = cfg.kind == "logistic_regression"
    for _ in range(cfg.epochs):
        for i in rng.permutation(n):
            eta = eta0 / (1.0 + eta0 * lam * t)
            lo, hi = indptr[i], indptr[i + 1]
            idx, vals = indices[lo:hi], data[lo:hi]
            yi = ypm[i]
            m = scale * float(np.dot(v[idx], vals)) + b
            if logistic:
                g = -yi * float(expit(-yi * m))
            else:
                g = -yi if yi * m < 1.0 else 0.0
            scale *= 1.0 - eta * lam
            if g != 0.0:
                v[idx] -= (eta * g / scale) * vals
                b -= eta * g
            if scale < 1e-9:
                v *= scale
                scale = 1.0
            t += 1
        cur = objective(scale * v, b, X, y, lam, cfg.kind)
        history.append(cur)
        if best - cur < cfg.tol * abs(best):
            stale += 1
            if stale >= cfg.patience:
                break
        else:
            stale = 0
        best = min(best, cur)
    return scale * v, b, history


def _full_batch(X, y, cfg: TrainConfig):
    n, d = X.shape
    lam = cfg.l2_lambda
    eta0 = _initial_step(cfg.kind, lam)
    w = np.zeros(d)
    b = 0.0
    cur = objective(w, b, X, y, lam, cfg.kind)
    history = [cur]
    for t in range(cfg.epochs):
        gw, gb = gradient(w, b, X, y, lam, cfg.kind)
        eta = eta0 / (1.0 + eta0 * lam * t)
        for _ in range(40):
            w_new, b_new = w - eta * gw, b - eta * gb
            new = objective(w_new, b_new, X, y, lam, cfg.kind)
            if new <= cur:
                w, b, cur = w_new, b_new, new
                break
            eta *= 0.5
        history.append(cur)
    return w, b, history


# -- model --------------------------------------------------------------------


class ClassifierModel:
    """A fitted classifier.  Build with :func:`fit` or :meth:`from_dict`."""

    def __init__(self, kind, dim, config: TrainConfig, params: dict, majority: int, history=None):
        self.kind = kind
        self.dim = int(dim)
        self.config = config
        self.params = params
        self.majority = int(majority)
        self.history = history or []

    @property
    def calibrated(self) -> bool:
        return self.kind != "linear_svm"

    def joint_log_likelihood(self, X) -> np.ndarray:
        """Per-class ``log P(c) + log P(x | c)``, shape ``(n, 2)``; naive Bayes only."""
        if self.kind not in NB_KINDS:
            raise DomainError(f"{self.kind} has no class likelihoods")
        X = as_matrix(X, self.dim)
        prior = self.params["class_log_prior"]
        if self.kind == "multinomial_nb":
            return np.asarray(X @ self.params["feature_log_prob"].T) + prior
        Xb = (X > self.config.binarize_threshold).astype(np.float64)
        log_p = self.params["feature_log_prob"]
        log_q = self.params["feature_log_neg_prob"]
        return np.asarray(Xb @ (log_p - log_q).T) + log_q.sum(axis=1) + prior

    def decision_scores(self, X) -> np.ndarray:
        if self.kind in NB_KINDS:
            jll = self.joint_log_likelihood(X)
            return jll[:, 1] - jll[:, 0]
        X = as_matrix(X, self.dim)
        return np.asarray(X @ self.params["weights"]) + self.params["bias"]

    def predict(self, X) -> np.ndarray:
        s = self.decision_scores(X)
        out = (s > TIE_TOL).astype(np.int64)
        out[np.abs(s) <= TIE_TOL] = self.majority
        return out

    def predict_proba(self, X) -> np.ndarray:
        """Positive-class probability.

        Naive Bayes: exact posterior; logistic regression: sigmoid of the
        margin; linear SVM: the same logistic link, uncalibrated.
        """
        return expit(self.decision_scores(X))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "dim": self.dim,
            "hyperparams": self.config.to_dict(),
            "majority_class": self.majority,
            "calibrated": self.calibrated,
            "nb_input": "fractional tf-idf weights summed as counts" if self.kind == "multinomial_nb" else None,
            "parameters": {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in self.params.items()},
        }

    @classmethod
    def from_dict(cls, d) -> "ClassifierModel":
        try:
            kind = d["kind"]
            if kind not in KINDS:
                raise FormatError(f"unknown kind {kind!r}", field="kind")
            config = TrainConfig(**d["hyperparams"])
            raw = d["parameters"]
            if kind in NB_KINDS:
                names = ["class_log_prior", "feature_log_prob"]
                if kind == "bernoulli_nb":
                    names.append("feature_log_neg_prob")
            else:
                names = ["weights", "bias"]
            params = {}
            for name in names:
                if name not in raw:
                    raise FormatError("missing field", field=f"parameters.{name}")
                params[name] = float(raw[name]) if name == "bias" else np.asarray(raw[name], dtype=np.float64)
            return cls(kind, d["dim"], config, params, d["majority_class"])
        except KeyError as exc:
            raise FormatError("missing field", field=str(exc.args[0])) from None
        except (TypeError, ValueError, DomainError) as exc:
            raise FormatError(str(exc), field="model") from None


def _check_labels(y, n):
    y = np.asarray(y)
    if y.ndim != 1 or len(y) != n:
        raise DomainError(f"expected {n} labels, got shape {y.shape}")
    if not np.isin(y, (0, 1)).all():
        raise DomainError("labels must be 0/1")
    y = y.astype(np.int64)
    if len(np.unique(y)) < 2:
        raise FitError("training data contains a single class")
    return y


def fit(X, y, cfg: TrainConfig | None = None, **overrides) -> ClassifierModel:
    cfg = cfg or TrainConfig()
    if overrides:
        cfg = replace(cfg, **overrides)
    X = as_matrix(X)
    n, d = X.shape
    if n < 2:
        raise FitError("need at least 2 training documents")
    y = _check_labels(y, n)
    counts = np.bincount(y, minlength=2)
    majority = int(counts[1] >= counts[0])

    if cfg.kind == "multinomial_nb":
        if X.nnz and X.data.min() < 0:
            raise DomainError("multinomial NB needs non-negative features")
        fc = np.vstack([np.asarray(X[y == c].sum(axis=0)).ravel() for c in (0, 1)]) + cfg.alpha
        params = {
            "class_log_prior": np.log(counts / n),
            "feature_log_prob": np.log(fc) - np.log(fc.sum(axis=1, keepdims=True)),
        }
        return ClassifierModel(cfg.kind, d, cfg, params, majority)

    if cfg.kind == "bernoulli_nb":
        Xb = (X > cfg.binarize_threshold).astype(np.float64)
        fc = np.vstack([np.asarray(Xb[y == c].sum(axis=0)).ravel() for c in (0, 1)])
        p = (fc + cfg.alpha) / (counts[:, None] + 2.0 * cfg.alpha)
        params = {
            "class_log_prior": np.log(counts / n),
            "feature_log_prob": np.log(p),
            "feature_log_neg_prob": np.log1p(-p),
        }
        return ClassifierModel(cfg.kind, d, cfg, params, majority)

    solver = _full_batch if cfg.full_batch else _sgd
    w, b, history = solver(X, y, cfg)
    return ClassifierModel(cfg.kind, d, cfg, {"weights": w, "bias": float(b)}, majority, history)


def decision_scores(model: ClassifierModel, X) -> np.ndarray:
    return model.decision_scores(X)


def predict(model: ClassifierModel, X) -> np.ndarray:
    return model.predict(X)


def predict_proba(model: ClassifierModel, X) -> np.ndarray:
    return model.predict_proba(X)
