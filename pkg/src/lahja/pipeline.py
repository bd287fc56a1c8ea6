"""End-to-end glue: run configuration, training, model files and the sweep."""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace

from . import models
from . import vectorize as vec
from .corpus import OTHER, build_binary_task, relabel_binary, stratified_split
from .errors import DomainError, FormatError, LahjaError
from .meta import MetaScaler, select_meta
from .metrics import evaluate_vectors
from .textproc import STEP_NAMES, NormalizationConfig, preprocess, read_stopwords

MODEL_FORMAT = "lahja-model-v1"
SWEEP_WORD_RANGES = ((1, 1), (1, 2), (1, 3))
SWEEP_CHAR_RANGE = (1, 5)


@dataclass(frozen=True)
class RunConfig:
    """Every knob of a run.  Defaults reproduce the reference setup."""

    data: str | None = None
    positive: str = "LY"
    word_range: tuple | None = (1, 2)
    char_range: tuple | None = (1, 5)
    classifier: str = "multinomial_nb"
    alpha: float = 1.0
    binarize_threshold: float = 0.0
    l2_lambda: float = 1e-4
    epochs: int = 20
    tol: float = 1e-5
    patience: int = 5
    test_fraction: float = 0.2
    seed: int = 0
    stopwords: str | None = None
    no_stopwords: bool = False
    repeat_cap: int = 1
    meta: bool = False
    meta_alpha: float = 0.05
    min_df: int = 1
    # sampling of negatives; None keeps every doc (all non-positive -> OTHER)
    other_quota: int | None = None
    tunisian_quota: int = 0
    tunisian_label: str = "TN"
    label_column: str | None = None
    text_column: str | None = None
    out: str | None = None
    jobs: int = 1

    def __post_init__(self):
        for name in ("word_range", "char_range"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, vec.NgramRange.parse(value).as_tuple())
        if self.word_range is None and self.char_range is None:
            raise DomainError("at least one of word_range and char_range is required")
        if not 0 < self.test_fraction < 1:
            raise DomainError("test_fraction must be in (0, 1)")
        if self.jobs < 1:
            raise DomainError("jobs must be >= 1")
        self.train_config()  # validates classifier hyperparameters

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    @classmethod
    def resolve(cls, file_values=None, flag_values=None) -> "RunConfig":
        """Defaults < config file < command-line flags (``None`` flags are unset)."""
        merged = {}
        known = set(cls.field_names())
        for source in (file_values or {}, flag_values or {}):
            for key, value in source.items():
                if key not in known:
                    raise FormatError("unknown configuration key", field=key)
                if value is not None:
                    merged[key] = value
        return cls(**merged)

    def train_config(self) -> models.TrainConfig:
        return models.TrainConfig(
            kind=self.classifier,
            alpha=self.alpha,
            binarize_threshold=self.binarize_threshold,
            l2_lambda=self.l2_lambda,
            epochs=self.epochs,
            tol=self.tol,
            patience=self.patience,
            seed=self.seed,
        )

    def normalization(self) -> NormalizationConfig:
        stopwords = None if self.stopwords is None else read_stopwords(self.stopwords)
        return NormalizationConfig(
            remove_stopwords=not self.no_stopwords, repeat_cap=self.repeat_cap, stopwords=stopwords
        )

    def to_dict(self) -> dict:
        """Effective settings echoed into reports (output paths and worker count omitted)."""
        d = asdict(self)
        for key in ("out", "jobs"):
            d.pop(key)
        for key in ("word_range", "char_range"):
            if d[key] is not None:
                d[key] = list(d[key])
        return d


def load_toml(path) -> dict:
    try:
        import tomllib
    except ModuleNotFoundError:  # Python < 3.11
        import tomli as tomllib
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise FormatError(str(exc), field=str(path)) from None
    # allow either a flat file or a [run] table
    return data.get("run", data)


def prepare_task(corpus, cfg: RunConfig):
    """Binary relabelling (optionally quota-sampled) and the stratified split."""
    if cfg.other_quota is not None:
        task = build_binary_task(
            corpus, cfg.positive, cfg.other_quota, cfg.tunisian_quota, cfg.seed, cfg.tunisian_label
        )
    else:
        task = relabel_binary(corpus, cfg.positive)
    return stratified_split(task, cfg.test_fraction, cfg.seed)


class Pipeline:
    """Preprocessing + vocabulary + (optional) meta scaler + classifier."""

    def __init__(self, norm, vocab, model, positive="LY", negative=OTHER, meta_scaler=None, metadata=None):
        self.norm = norm
        self.vocab = vocab
        self.model = model
        self.positive = positive
        self.negative = negative
        self.meta_scaler = meta_scaler
        self.metadata = dict(metadata or {})

    def featurize(self, texts):
        return vec.featurize(texts, self.vocab, self.norm, self.meta_scaler)

    def scores(self, texts):
        return self.model.decision_scores(self.featurize(texts))

    def predict(self, texts) -> list[str]:
        return [self.positive if y == 1 else self.negative for y in self.model.predict(self.featurize(texts))]

    def predict_proba(self, texts):
        return self.model.predict_proba(self.featurize(texts))

    def evaluate(self, corpus, config=None):
        y = relabel_binary(corpus, self.positive).binary_targets()
        return evaluate_vectors(self.model, self.featurize(corpus.texts), y, config)

    def to_dict(self, timestamp: str | None = None) -> dict:
        d = {"format": MODEL_FORMAT}
        d.update(self.model.to_dict())
        d["labels"] = {"positive": self.positive, "negative": self.negative}
        d["preprocessing"] = self.norm.to_dict()
        d["vocabulary"] = self.vocab.to_dict()
        d["meta"] = None if self.meta_scaler is None else self.meta_scaler.to_dict()
        metadata = dict(self.metadata)
        if timestamp is not None:
            metadata["created"] = timestamp
        d["metadata"] = metadata
        return d

    @classmethod
    def from_dict(cls, d) -> "Pipeline":
        if not isinstance(d, dict):
            raise FormatError("model file must hold a JSON object", field="format")
        if d.get("format") != MODEL_FORMAT:
            raise FormatError(f"expected {MODEL_FORMAT!r}, got {d.get('format')!r}", field="format")
        for key in ("labels", "preprocessing", "vocabulary", "metadata"):
            if key not in d:
                raise FormatError("missing field", field=key)
        norm = _norm_from_dict(d["preprocessing"])
        vocab = vec.Vocabulary.from_dict(d["vocabulary"])
        model = models.ClassifierModel.from_dict(d)
        scaler = None
        if d.get("meta") is not None:
            try:
                scaler = MetaScaler.from_dict(d["meta"])
            except (KeyError, TypeError, ValueError):
                raise FormatError("malformed meta scaler", field="meta") from None
        expected = vocab.dim + (len(scaler.features) if scaler else 0)
        if model.dim != expected:
            raise FormatError(f"model expects {model.dim} features, vocabulary gives {expected}", field="dim")
        for name in ("weights", "feature_log_prob"):
            p = model.params.get(name)
            if p is not None and p.shape[-1] != model.dim:
                raise FormatError("parameter length does not match dim", field=f"parameters.{name}")
        try:
            labels = d["labels"]
            return cls(norm, vocab, model, labels["positive"], labels["negative"], scaler, d["metadata"])
        except (KeyError, TypeError):
            raise FormatError("missing positive/negative", field="labels") from None

    def save(self, path, timestamp: str | None = None) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(timestamp), fh, ensure_ascii=False, sort_keys=True, separators=(",", ":"))
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "Pipeline":
        with open(path, encoding="utf-8") as fh:
            try:
                d = json.load(fh)
            except json.JSONDecodeError as exc:
                raise FormatError(f"invalid JSON ({exc})", field="format") from None
        return cls.from_dict(d)


def _norm_from_dict(d) -> NormalizationConfig:
    try:
        kwargs = {name: bool(d[name]) for name in STEP_NAMES}
        kwargs["repeat_cap"] = int(d["repeat_cap"])
        kwargs["stopwords"] = frozenset(d["stopwords"])
    except KeyError as exc:
        raise FormatError("missing field", field=f"preprocessing.{exc.args[0]}") from None
    except (TypeError, ValueError) as exc:
        raise FormatError(str(exc), field="preprocessing") from None
    return NormalizationConfig(**kwargs)


def _meta_scaler(train, cfg: RunConfig):
    if not cfg.meta:
        return None
    selected, _ = select_meta(train, cfg.meta_alpha)
    if not selected:
        return None
    return MetaScaler(selected).fit(train.texts)


def train(train_corpus, cfg: RunConfig, split_info=None) -> Pipeline:
    """Fit preprocessing vocabulary, optional meta scaler and classifier."""
    norm = cfg.normalization()
    tokens = [preprocess(t, norm) for t in train_corpus.texts]
    vocab = vec.fit(tokens, cfg.word_range, cfg.char_range, cfg.min_df)
    scaler = _meta_scaler(train_corpus, cfg)
    X = _rows(tokens, train_corpus.texts, vocab, scaler)
    model = models.fit(X, train_corpus.binary_targets(), cfg.train_config())
    metadata = {"seed": cfg.seed, "split": split_info or {}, "n_train": len(train_corpus)}
    return Pipeline(norm, vocab, model, cfg.positive, OTHER, scaler, metadata)


def _rows(tokens, texts, vocab, scaler):
    vectors = vec.transform_corpus(tokens, vocab)
    dim = vocab.dim
    if scaler is not None:
        vectors = [vec.append_meta(v, m) for v, m in zip(vectors, scaler.transform(texts))]
        dim += len(scaler.features)
    return vec.to_csr(vectors, dim)


def split_info(train_corpus, test_corpus, cfg: RunConfig) -> dict:
    return {
        "test_fraction": cfg.test_fraction,
        "seed": cfg.seed,
        "n_train": len(train_corpus),
        "n_test": len(test_corpus),
        "train_counts": train_corpus.counts,
        "test_counts": test_corpus.counts,
    }


def _sweep_word_range(args):
    """Fit one vocabulary and every classifier on it; returns (kind, report) pairs."""
    train_corpus, test_corpus, cfg, word_range = args
    cfg = replace(cfg, word_range=word_range, char_range=SWEEP_CHAR_RANGE)
    norm = cfg.normalization()
    tr_tokens = [preprocess(t, norm) for t in train_corpus.texts]
    te_tokens = [preprocess(t, norm) for t in test_corpus.texts]
    vocab = vec.fit(tr_tokens, cfg.word_range, cfg.char_range, cfg.min_df)
    scaler = _meta_scaler(train_corpus, cfg)
    X_tr = _rows(tr_tokens, train_corpus.texts, vocab, scaler)
    X_te = _rows(te_tokens, test_corpus.texts, vocab, scaler)
    y_tr, y_te = train_corpus.binary_targets(), test_corpus.binary_targets()
    out = []
    for kind in models.KINDS:
        run = replace(cfg, classifier=kind)
        model = models.fit(X_tr, y_tr, run.train_config())
        out.append((kind, evaluate_vectors(model, X_te, y_te, run.to_dict())))
    return out


def sweep(train_corpus, test_corpus, cfg: RunConfig) -> list:
    """All four classifiers x word ranges (1,1), (1,2), (1,3) with char (1,5).

    Reports come back classifier-major, word-range-minor.  With ``cfg.jobs >
    1`` the word ranges run in separate processes; results are identical.
    """
    jobs = [(train_corpus, test_corpus, cfg, wr) for wr in SWEEP_WORD_RANGES]
    if cfg.jobs > 1:
        workers = min(cfg.jobs, len(jobs), os.cpu_count() or 1)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_word_range, jobs))
    else:
        results = [_sweep_word_range(j) for j in jobs]
    reports = []
    for kind in models.KINDS:
        for per_range in results:
            reports.extend(r for k, r in per_range if k == kind)
    return reports


def reports_json(reports) -> str:
    """Canonical JSON text for a list of reports (stable bytes for a fixed seed)."""
    return json.dumps([r.to_dict() for r in reports], ensure_ascii=False, sort_keys=True, indent=1) + "\n"


__all__ = [
    "MODEL_FORMAT",
    "RunConfig",
    "Pipeline",
    "LahjaError",
    "load_toml",
    "prepare_task",
    "train",
    "sweep",
    "split_info",
    "reports_json",
]
