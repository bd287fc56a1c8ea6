"""Command-line interface: ``lahja {clean,analyze,chi2,train,evaluate,sweep,predict}``.

Exit codes: 0 success, 1 pipeline error, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone

from . import __version__
from .corpus import analyze, load_tsv, relabel_binary
from .errors import LahjaError
from .meta import select_meta
from .metrics import roc_csv, to_markdown_tables
from .models import KINDS
from .pipeline import Pipeline, RunConfig, load_toml, prepare_task, reports_json, split_info, sweep, train
from .textproc import NormalizationConfig, preprocess, read_stopwords


def _read_lines(path):
    if path in (None, "-"):
        return sys.stdin.read().splitlines()
    with open(path, encoding="utf-8") as fh:
        return fh.read().splitlines()


def _write(text, path=None):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, indent=1) + "\n"


def _norm_from_args(args) -> NormalizationConfig:
    stopwords = read_stopwords(args.stopwords) if args.stopwords else None
    return NormalizationConfig(
        remove_stopwords=not args.no_stopwords, repeat_cap=args.repeat_cap or 1, stopwords=stopwords
    )


def _run_config(args) -> RunConfig:
    file_values = load_toml(args.config) if args.config else {}
    flags = {name: getattr(args, name, None) for name in RunConfig.field_names()}
    return RunConfig.resolve(file_values, flags)


def _load_data(cfg: RunConfig):
    if not cfg.data:
        raise OSError("no dataset given (use --data or a config file)")
    return load_tsv(cfg.data, cfg.label_column, cfg.text_column)


# -- commands -----------------------------------------------------------------


def cmd_clean(args):
    norm = _norm_from_args(args)
    out = "".join(" ".join(preprocess(line, norm)) + "\n" for line in _read_lines(args.input))
    _write(out, args.out)


def cmd_analyze(args):
    corpus = load_tsv(args.data, args.label_column, args.text_column)
    report = analyze(corpus, _norm_from_args(args), k=args.top, max_n=args.max_n)
    _write(_dump(report), args.out)


def cmd_chi2(args):
    corpus = relabel_binary(load_tsv(args.data, args.label_column, args.text_column), args.positive)
    selected, results = select_meta(corpus, args.alpha)
    _write(_dump({"alpha": args.alpha, "selected": selected, "features": results}), args.out)


def cmd_train(args):
    cfg = _run_config(args)
    train_part, test_part = prepare_task(_load_data(cfg), cfg)
    info = split_info(train_part, test_part, cfg)
    pipe = train(train_part, cfg, info)
    pipe.metadata["run"] = cfg.to_dict()
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds") if args.timestamp else None
    pipe.save(args.model, stamp)
    report = pipe.evaluate(test_part, cfg.to_dict()).to_dict()
    report["train_accuracy"] = float((pipe.model.predict(pipe.featurize(train_part.texts))
                                      == train_part.binary_targets()).mean())
    _write(_dump(report), args.report)


def cmd_evaluate(args):
    pipe = Pipeline.load(args.model)
    run = pipe.metadata.get("run", {})
    corpus = load_tsv(args.data, args.label_column, args.text_column)
    if args.heldout:
        cfg = RunConfig.resolve({k: v for k, v in run.items() if k in RunConfig.field_names()})
        corpus = prepare_task(corpus, cfg)[1]
    report = pipe.evaluate(corpus, dict(run, data=args.data, heldout=bool(args.heldout)))
    _write(_dump(report.to_dict()), args.report)


def cmd_sweep(args):
    cfg = _run_config(args)
    if not cfg.out:
        raise OSError("sweep needs an output directory (--out)")
    train_part, test_part = prepare_task(_load_data(cfg), cfg)
    reports = sweep(train_part, test_part, cfg)
    os.makedirs(cfg.out, exist_ok=True)
    table4, table5 = to_markdown_tables(reports)
    _write(reports_json(reports), os.path.join(cfg.out, "reports.json"))
    _write(table4, os.path.join(cfg.out, "table_metrics.md"))
    _write(table5, os.path.join(cfg.out, "table_agreement.md"))
    _write(roc_csv(reports), os.path.join(cfg.out, "roc.csv"))
    _write(table4 + "\n" + table5)


def cmd_predict(args):
    pipe = Pipeline.load(args.model)
    lines = _read_lines(args.input)
    if not lines:
        _write("", args.out)
        return
    X = pipe.featurize(lines)
    scores = pipe.model.decision_scores(X)
    proba = pipe.model.predict_proba(X)
    labels = pipe.model.predict(X)
    rows = [
        f"{pipe.positive if y == 1 else pipe.negative}\t{s!r}\t{p!r}\n"
        for y, s, p in zip(labels, scores.tolist(), proba.tolist())
    ]
    _write("".join(rows), args.out)


# -- parser -------------------------------------------------------------------


def _add_norm_flags(p):
    p.add_argument("--stopwords", help="stop-word file (one entry per line)")
    p.add_argument("--no-stopwords", action="store_true", help="skip stop-word removal")
    p.add_argument("--repeat-cap", type=int, default=None, help="letters kept from an elongated run (default 1)")


def _add_data_flags(p):
    p.add_argument("--label-column", default=None, help="CSV label column (CSV input)")
    p.add_argument("--text-column", default=None, help="CSV text column (CSV input)")


def _add_run_flags(p, with_model_choice=True):
    # every default is None so unset flags fall through to the config file
    p.add_argument("--config", help="TOML file with run settings")
    p.add_argument("--data", help="labelled TSV (label<TAB>text) or CSV with --label/--text-column")
    p.add_argument("--positive", default=None, help="positive label (default LY)")
    if with_model_choice:
        p.add_argument("--classifier", choices=KINDS, default=None)
        p.add_argument("--word-range", default=None, help='word n-gram range, e.g. "1,2"')
        p.add_argument("--char-range", default=None, help='char n-gram range, e.g. "1,5"')
    p.add_argument("--alpha", type=float, default=None, help="NB smoothing")
    p.add_argument("--binarize-threshold", type=float, default=None)
    p.add_argument("--l2-lambda", type=float, default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--test-fraction", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--stopwords", default=None)
    p.add_argument("--no-stopwords", action="store_const", const=True, default=None)
    p.add_argument("--repeat-cap", type=int, default=None)
    p.add_argument("--meta", action="store_const", const=True, default=None, help="append chi-square-selected meta-features")
    p.add_argument("--min-df", type=int, default=None)
    p.add_argument("--other-quota", type=int, default=None, help="sample this many negatives")
    p.add_argument("--tunisian-quota", type=int, default=None, help="negatives drawn from --tunisian-label")
    p.add_argument("--tunisian-label", default=None)
    _add_data_flags(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lahja", description="Libyan dialect identification toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("clean", help="preprocess text, one output line per input line")
    p.add_argument("input", nargs="?", default="-", help="input file (default stdin)")
    p.add_argument("--out", default=None)
    _add_norm_flags(p)
    p.set_defaults(func=cmd_clean)

    p = sub.add_parser("analyze", help="corpus n-gram statistics as JSON")
    p.add_argument("data")
    p.add_argument("--top", type=int, default=10, help="top n-grams per class")
    p.add_argument("--max-n", type=int, default=3)
    p.add_argument("--out", default=None)
    _add_norm_flags(p)
    _add_data_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("chi2", help="chi-square test of every meta-feature")
    p.add_argument("data")
    p.add_argument("--positive", default="LY")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--out", default=None)
    _add_data_flags(p)
    p.set_defaults(func=cmd_chi2)

    p = sub.add_parser("train", help="train one model and report on the held-out split")
    _add_run_flags(p)
    p.add_argument("--model", required=True, help="output model file (JSON)")
    p.add_argument("--report", default=None, help="report path (default stdout)")
    p.add_argument("--timestamp", action="store_true", help="record creation time in the model file")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="evaluate a saved model on labelled data")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--heldout", action="store_true", help="re-create the training split and score its test part only")
    p.add_argument("--report", default=None)
    _add_data_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="4 classifiers x 3 word ranges, char (1,5)")
    _add_run_flags(p, with_model_choice=False)
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--jobs", type=int, default=None, help="worker processes")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("predict", help="label<TAB>score<TAB>proba per input line")
    p.add_argument("--model", required=True)
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_predict)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except LahjaError as exc:
        print(f"lahja: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"lahja: I/O error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
