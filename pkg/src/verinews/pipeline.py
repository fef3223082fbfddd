"""End-to-end glue: preprocess, featurize, train, score, evaluate.

These functions tie the modules together behind the bundle abstraction so
the CLI, the demos, and library users share one code path. Preprocessing
fans out over a process pool when asked; results are order-stable and
identical to the serial path because every stage is a pure function.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np

from .corpus import ClassCounts, Document, Label, dataset_stats
from .errors import TrainingError
from .features import (
    SparseVector,
    build_vocabulary,
    count_transform,
    fit_idf,
    stack,
    tfidf_transform,
)
from .metrics import EvalReport, classification_report, confusion_matrix
from .models import NbModel, TrainConfig, lr_fit, nb_fit, sgd_fit
from .persistence import FEATURE_COUNT, FEATURE_TFIDF, ModelBundle
from .textprep import CleanDoc, PipelineConfig, preprocess_document

# Below this many documents a pool costs more than it saves.
PARALLEL_MIN_DOCS = 32

MODEL_NB = "nb"
MODEL_LR = "lr"
MODEL_SGD = "sgd"

DEFAULT_FEATURES = {MODEL_NB: FEATURE_COUNT, MODEL_LR: FEATURE_TFIDF, MODEL_SGD: FEATURE_TFIDF}


@dataclass(frozen=True)
class TrainSummary:
    class_counts: ClassCounts
    vocab_size: int
    converged: bool | None  # None for models without an iterative fit


def default_workers() -> int:
    return os.cpu_count() or 1


def preprocess_many(
    docs: list[Document], cfg: PipelineConfig, workers: int = 1
) -> list[CleanDoc]:
    """Preprocess documents, preserving order; pure so pooling is safe."""
    fn = partial(preprocess_document, cfg=cfg)
    if workers <= 1 or len(docs) < PARALLEL_MIN_DOCS:
        return [fn(d) for d in docs]
    chunk = max(1, len(docs) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, docs, chunksize=chunk))


def transform_many(bundle: ModelBundle, clean: list[CleanDoc]) -> list[SparseVector]:
    """Vectorize with the bundle's frozen vocabulary (and IDF, if TF-IDF)."""
    if bundle.feature_kind == FEATURE_TFIDF:
        return [tfidf_transform(d, bundle.vocab, bundle.idf) for d in clean]
    return [count_transform(d, bundle.vocab) for d in clean]


def train_bundle(
    docs: list[Document],
    model_kind: str,
    feature_kind: str,
    pipeline_cfg: PipelineConfig | None = None,
    train_cfg: TrainConfig | None = None,
    nb_alpha: float = 1.0,
    workers: int = 1,
    created_at: int | None = None,
    min_df: int = 1,
    max_df: int | None = None,
    max_terms: int | None = None,
) -> tuple[ModelBundle, TrainSummary]:
    """Full training pass: clean, build vocabulary, featurize, fit."""
    if model_kind not in DEFAULT_FEATURES:
        raise ValueError(f"unknown model kind {model_kind!r}")
    if any(d.label is None for d in docs):
        raise TrainingError("training requires a fully labeled corpus")
    pipeline_cfg = pipeline_cfg or PipelineConfig.default()
    train_cfg = train_cfg or TrainConfig()

    clean = preprocess_many(docs, pipeline_cfg, workers)
    vocab = build_vocabulary(clean, min_df=min_df, max_df=max_df, max_terms=max_terms)
    labels = [d.label for d in clean]

    idf = None
    if feature_kind == FEATURE_TFIDF:
        idf = fit_idf(clean, vocab)
        vectors = [tfidf_transform(d, vocab, idf) for d in clean]
    else:
        vectors = [count_transform(d, vocab) for d in clean]

    if model_kind == MODEL_NB:
        model = nb_fit(vectors, labels, alpha=nb_alpha)
        converged = None
    elif model_kind == MODEL_LR:
        model = lr_fit(vectors, labels, train_cfg)
        converged = model.converged
    else:
        model = sgd_fit(vectors, labels, train_cfg)
        converged = model.converged

    bundle = ModelBundle(
        pipeline=pipeline_cfg,
        vocab=vocab,
        idf=idf,
        model=model,
        feature_kind=feature_kind,
        n_train_docs=len(docs),
        created_at=created_at,
    )
    summary = TrainSummary(
        class_counts=dataset_stats(docs), vocab_size=vocab.size, converged=converged
    )
    return bundle, summary


def score_matrix(bundle: ModelBundle, vectors: list[SparseVector]) -> np.ndarray:
    """(n, 4) decision scores; rows follow the input order."""
    X = stack(vectors)
    model = bundle.model
    if isinstance(model, NbModel):
        return X @ model.feature_log_prob.T + model.class_log_prior
    return X @ model.weights.T + model.bias


def predict_labels(scores: np.ndarray) -> list[Label]:
    """Row-wise argmax with ties broken toward the lowest label code."""
    if np.any(np.isnan(scores)):
        raise ValueError("NaN score")
    return [Label(int(i)) for i in np.argmax(scores, axis=1)]


def predict_bundle(
    bundle: ModelBundle, docs: list[Document], workers: int = 1
) -> tuple[list[Label], np.ndarray]:
    clean = preprocess_many(docs, bundle.pipeline, workers)
    scores = score_matrix(bundle, transform_many(bundle, clean))
    return predict_labels(scores), scores


def evaluate_bundle(
    bundle: ModelBundle, docs: list[Document], workers: int = 1
) -> EvalReport:
    """Score a labeled corpus against the bundle's frozen vocabulary."""
    if any(d.label is None for d in docs):
        raise TrainingError("evaluation requires a fully labeled corpus")
    preds, _ = predict_bundle(bundle, docs, workers)
    return classification_report(confusion_matrix([d.label for d in docs], preds))
