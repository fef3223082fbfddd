"""Command-line entry point: prep, train, eval, predict, report.

Exit codes are a stable contract: 0 success, 1 internal failure, 2 usage
or input error. Option precedence is flags > config file > defaults; the
config file is flat key=value text. VERINEWS_THREADS overrides the default
worker count when no --threads flag is given.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

from .corpus import RawRecord, parse_csv, to_documents
from .errors import VerinewsError
from .metrics import render_confusion, render_report, report_from_json, report_to_json
from .models import TrainConfig
from .persistence import FEATURE_COUNT, FEATURE_TFIDF, read_bundle, write_bundle
from .pipeline import (
    DEFAULT_FEATURES,
    default_workers,
    evaluate_bundle,
    predict_bundle,
    preprocess_many,
    train_bundle,
)
from .textprep import PipelineConfig, load_lemma_exceptions, load_stopwords

THREADS_ENV = "VERINEWS_THREADS"

_CONFIG_KEYS = {
    "model",
    "features",
    "format",
    "threads",
    "seed",
    "nb_alpha",
    "lr_c",
    "lr_tol",
    "lr_max_iter",
    "sgd_alpha",
    "sgd_epochs",
    "sgd_tol",
    "stopwords",
    "lemmas",
    "placeholder",
    "min_token_len",
    "min_df",
    "max_df",
    "max_terms",
}


class UsageError(Exception):
    """Bad flags or unusable input; maps to exit code 2."""


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config_file(getattr(args, "config", None))
        return args.run(args, config)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (VerinewsError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - last-resort internal failure
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="verinews", description="news veracity classification toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    prep = sub.add_parser("prep", help="dump preprocessed tokens as CSV")
    _common_flags(prep)
    _pipeline_flags(prep)
    prep.add_argument("--in", dest="input", required=True, help="input CSV")
    prep.add_argument("--out", help="output CSV (default: stdout)")
    prep.set_defaults(run=_cmd_prep)

    train = sub.add_parser("train", help="train a model and write a bundle")
    _common_flags(train)
    _pipeline_flags(train)
    train.add_argument("--in", dest="input", required=True, help="labeled training CSV")
    train.add_argument("--out", required=True, help="bundle output path")
    train.add_argument("--model", choices=sorted(DEFAULT_FEATURES))
    train.add_argument("--features", choices=[FEATURE_COUNT, FEATURE_TFIDF])
    train.add_argument("--force", action="store_true", help="allow unusual model/feature pairs")
    train.add_argument("--nb-alpha", type=float, dest="nb_alpha")
    train.add_argument("--lr-c", type=float, dest="lr_c")
    train.add_argument("--lr-tol", type=float, dest="lr_tol")
    train.add_argument("--lr-max-iter", type=int, dest="lr_max_iter")
    train.add_argument("--sgd-alpha", type=float, dest="sgd_alpha")
    train.add_argument("--sgd-epochs", type=int, dest="sgd_epochs")
    train.add_argument("--sgd-tol", type=float, dest="sgd_tol")
    train.add_argument("--seed", type=int)
    train.add_argument("--min-df", type=int, dest="min_df", help="vocabulary pruning (default off)")
    train.add_argument("--max-df", type=int, dest="max_df", help="vocabulary pruning (default off)")
    train.add_argument("--max-terms", type=int, dest="max_terms", help="vocabulary cap (default off)")
    train.set_defaults(run=_cmd_train)

    ev = sub.add_parser("eval", help="evaluate a bundle on a labeled CSV")
    _common_flags(ev)
    ev.add_argument("--in", dest="input", required=True, help="labeled evaluation CSV")
    ev.add_argument("--model", required=True, help="bundle path")
    ev.add_argument("--format", choices=["text", "json"])
    ev.add_argument("--out", help="write the report here instead of stdout")
    ev.set_defaults(run=_cmd_eval)

    pred = sub.add_parser("predict", help="label an unlabeled CSV")
    _common_flags(pred)
    pred.add_argument("--in", dest="input", required=True, help="unlabeled CSV")
    pred.add_argument("--model", required=True, help="bundle path")
    pred.add_argument("--out", required=True, help="predictions CSV path")
    pred.set_defaults(run=_cmd_predict)

    rep = sub.add_parser("report", help="render a JSON eval report as text")
    _common_flags(rep)
    rep.add_argument("--in", dest="input", required=True, help="JSON report path")
    rep.set_defaults(run=_cmd_report)
    return parser


def _common_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--threads", type=int, help="worker count (default: all cores)")


def _pipeline_flags(p: argparse.ArgumentParser):
    p.add_argument("--stopwords", help="stop-word list file (one token per line)")
    p.add_argument("--lemmas", help="lemma exceptions file (surface<TAB>lemma)")
    p.add_argument("--placeholder", help="numeric placeholder token")
    p.add_argument("--min-token-len", type=int, dest="min_token_len")


# --- commands -------------------------------------------------------------


def _cmd_prep(args, config) -> int:
    records = _read_records(args.input)
    labeled = bool(records) and records[0].rating is not None
    docs = to_documents(records, labeled=labeled)
    cfg = _resolve_pipeline(args, config)
    clean = preprocess_many(docs, cfg, _resolve_threads(args, config))

    rows = [
        [d.id, d.label.display_name if d.label is not None else "", ",".join(d.tokens)]
        for d in clean
    ]
    text = _format_csv([["public_id", "label", "tokens"], *rows])
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_train(args, config) -> int:
    model_kind = _resolve(args, config, "model", str, None)
    if model_kind is None:
        raise UsageError("--model is required (nb, lr or sgd)")
    if model_kind not in DEFAULT_FEATURES:
        raise UsageError(f"unknown model {model_kind!r}")
    feature_kind = _resolve(args, config, "features", str, DEFAULT_FEATURES[model_kind])
    if feature_kind not in (FEATURE_COUNT, FEATURE_TFIDF):
        raise UsageError(f"unknown feature kind {feature_kind!r}")
    if DEFAULT_FEATURES[model_kind] != feature_kind and not args.force:
        raise UsageError(
            f"{model_kind} expects {DEFAULT_FEATURES[model_kind]} features; "
            f"pass --force to train on {feature_kind}"
        )

    records = _read_records(args.input)
    if records and records[0].rating is None:
        raise UsageError(f"{args.input}: no rating column; training needs labels")
    docs = to_documents(records, labeled=True)

    train_cfg = TrainConfig(
        lr_C=_resolve(args, config, "lr_c", float, 100.0),
        lr_tol=_resolve(args, config, "lr_tol", float, 1e-4),
        lr_max_iter=_resolve(args, config, "lr_max_iter", int, 100),
        sgd_alpha=_resolve(args, config, "sgd_alpha", float, 1e-4),
        sgd_epochs=_resolve(args, config, "sgd_epochs", int, 1000),
        sgd_tol=_resolve(args, config, "sgd_tol", float, 1e-3),
        seed=_resolve(args, config, "seed", int, 42),
    )
    bundle, summary = train_bundle(
        docs,
        model_kind,
        feature_kind,
        pipeline_cfg=_resolve_pipeline(args, config),
        train_cfg=train_cfg,
        nb_alpha=_resolve(args, config, "nb_alpha", float, 1.0),
        workers=_resolve_threads(args, config),
        created_at=_source_date_epoch(),
        min_df=_resolve(args, config, "min_df", int, 1),
        max_df=_resolve(args, config, "max_df", int, None),
        max_terms=_resolve(args, config, "max_terms", int, None),
    )
    write_bundle(bundle, args.out)

    counts = " ".join(
        f"{label.display_name}={n}" for label, n in summary.class_counts.counts.items()
    )
    print(f"trained {model_kind} on {summary.class_counts.total} documents ({feature_kind})")
    print(f"class counts: {counts}")
    print(f"vocabulary size: {summary.vocab_size}")
    if summary.converged is not None:
        print(f"converged: {'yes' if summary.converged else 'NO (hit iteration limit)'}")
    print(f"wrote {args.out}")
    return 0


def _cmd_eval(args, config) -> int:
    bundle = read_bundle(args.model)
    records = _read_records(args.input)
    if not records:
        raise UsageError(f"{args.input}: no data rows to evaluate")
    if records[0].rating is None:
        raise UsageError(f"{args.input}: no rating column; evaluation needs labels")
    docs = to_documents(records, labeled=True)
    report = evaluate_bundle(bundle, docs, _resolve_threads(args, config))

    fmt = _resolve(args, config, "format", str, "text")
    if fmt == "json":
        text = report_to_json(report)
    elif fmt == "text":
        title = f"{bundle.model_kind} on {bundle.feature_kind} features"
        text = render_report(report) + "\n" + render_confusion(report.confusion, title)
    else:
        raise UsageError(f"unknown format {fmt!r}")
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_predict(args, config) -> int:
    bundle = read_bundle(args.model)
    docs = to_documents(_read_records(args.input), labeled=False)
    rows = []
    if docs:
        preds, scores = predict_bundle(bundle, docs, _resolve_threads(args, config))
        rows = [
            [doc.id, label.display_name, *[repr(float(s)) for s in row]]
            for doc, label, row in zip(docs, preds, scores)
        ]
    header = [
        "public_id",
        "predicted_label",
        "score_false",
        "score_true",
        "score_partially_false",
        "score_other",
    ]
    Path(args.out).write_text(_format_csv([header, *rows]), encoding="utf-8")
    print(f"wrote {len(rows)} predictions to {args.out}")
    return 0


def _cmd_report(args, config) -> int:
    report = report_from_json(_read_text(args.input))
    sys.stdout.write(render_report(report))
    sys.stdout.write("\n")
    sys.stdout.write(render_confusion(report.confusion))
    return 0


# --- option plumbing ------------------------------------------------------


def _read_records(path: str) -> list[RawRecord]:
    return parse_csv(_read_text(path).encode("utf-8"))


def _read_text(path: str) -> str:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such file: {path}")
    return p.read_text(encoding="utf-8")


def _format_csv(rows: list[list[str]]) -> str:
    import io

    out = io.StringIO()
    csv.writer(out, lineterminator="\n").writerows(rows)
    return out.getvalue()


def _load_config_file(path: str | None) -> dict[str, str]:
    if not path:
        return {}
    values = {}
    for i, line in enumerate(_read_text(path).splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        key, sep, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise UsageError(f"{path}:{i}: expected key=value, got {line!r}")
        if key not in _CONFIG_KEYS:
            raise UsageError(f"{path}:{i}: unknown config key {key!r}")
        values[key] = value
    return values


def _resolve(args, config, key, cast, default):
    """flags > config file > default."""
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        try:
            return cast(config[key])
        except ValueError as exc:
            raise UsageError(f"config key {key!r}: {exc}") from exc
    return default


def _resolve_threads(args, config) -> int:
    if getattr(args, "threads", None) is not None:
        workers = args.threads
    elif os.environ.get(THREADS_ENV):
        try:
            workers = int(os.environ[THREADS_ENV])
        except ValueError as exc:
            raise UsageError(f"{THREADS_ENV}: {exc}") from exc
    elif "threads" in config:
        workers = int(config["threads"])
    else:
        workers = default_workers()
    if workers < 1:
        raise UsageError(f"thread count must be >= 1, got {workers}")
    return workers


def _resolve_pipeline(args, config) -> PipelineConfig:
    base = PipelineConfig.default()
    stopwords_path = _resolve(args, config, "stopwords", str, None)
    lemmas_path = _resolve(args, config, "lemmas", str, None)
    try:
        return PipelineConfig(
            stopword_list=load_stopwords(stopwords_path)
            if stopwords_path
            else base.stopword_list,
            lemma_exceptions=load_lemma_exceptions(lemmas_path)
            if lemmas_path
            else base.lemma_exceptions,
            numeric_placeholder=_resolve(
                args, config, "placeholder", str, base.numeric_placeholder
            ),
            min_token_len=_resolve(args, config, "min_token_len", int, base.min_token_len),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _source_date_epoch() -> int | None:
    # Reproducible-builds convention: record a creation time only when the
    # environment pins one, keeping rerun outputs byte-identical.
    raw = os.environ.get("SOURCE_DATE_EPOCH")
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError as exc:
        raise UsageError(f"SOURCE_DATE_EPOCH: {exc}") from exc


if __name__ == "__main__":
    sys.exit(main())
