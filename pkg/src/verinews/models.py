"""The three classifiers: Multinomial Naive Bayes on count vectors, and
one-vs-rest logistic / hinge linear models on TF-IDF vectors.

All training is deterministic. The SGD classifier shuffles with a PCG64
generator seeded from the training config, so a fixed seed reproduces
bit-identical weights on any platform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.optimize
from scipy.special import expit

from .corpus import Label
from .errors import DimensionMismatchError, TrainingError
from .features import SparseVector, stack

N_CLASSES = 4

KIND_LOGISTIC = "logistic"
KIND_HINGE = "hinge"


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for the linear models.

    The hinge classifier uses the step-size schedule
    eta_t = 1 / (sgd_alpha * (t0 + t)) with eta_0 = sgd_alpha**-0.25 and
    t0 = 1 / (sgd_alpha * eta_0); at the default sgd_alpha = 1e-4 that is
    eta_0 = 10 and t0 = 1000.
    """

    lr_C: float = 100.0
    lr_tol: float = 1e-4
    lr_max_iter: int = 100
    sgd_alpha: float = 1e-4
    sgd_epochs: int = 1000
    sgd_tol: float = 1e-3
    seed: int = 42

    def __post_init__(self):
        for name in ("lr_C", "lr_tol", "sgd_alpha", "sgd_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.lr_max_iter < 1 or self.sgd_epochs < 1:
            raise ValueError("iteration limits must be >= 1")


@dataclass(frozen=True)
class NbModel:
    """Laplace-smoothed multinomial model. Rows of exp(feature_log_prob)
    sum to 1; classes absent from training get a -inf prior."""

    class_log_prior: np.ndarray  # (4,)
    feature_log_prob: np.ndarray  # (4, V)
    alpha: float
    vocab_size: int


@dataclass(frozen=True)
class LinearModel:
    """One-vs-rest linear decision model (logistic or hinge)."""

    weights: np.ndarray  # (4, V)
    bias: np.ndarray  # (4,)
    kind: str
    converged: bool = True


def nb_fit(X: list[SparseVector], y: list[Label], alpha: float = 1.0) -> NbModel:
    """Estimate priors and smoothed per-class term distributions.

    feature_log_prob[c][t] = ln((T_ct + alpha) / (sum_t' T_ct' + alpha*V))
    where T_ct is the total count of term t over class-c documents.
    """
    if not X:
        raise TrainingError("empty training set")
    if len(X) != len(y):
        raise TrainingError(f"{len(X)} vectors but {len(y)} labels")
    if alpha <= 0:
        raise TrainingError(f"smoothing alpha must be positive, got {alpha}")
    dim = X[0].dim

    term_counts = np.zeros((N_CLASSES, dim))
    doc_counts = np.zeros(N_CLASSES)
    for vec, label in zip(X, y):
        if vec.dim != dim:
            raise DimensionMismatchError(f"vector dim {vec.dim} != {dim}")
        term_counts[int(label), vec.indices] += vec.values
        doc_counts[int(label)] += 1.0

    with np.errstate(divide="ignore"):
        class_log_prior = np.log(doc_counts / len(X))
    if dim > 0:
        smoothed = term_counts + alpha
        feature_log_prob = np.log(smoothed) - np.log(smoothed.sum(axis=1, keepdims=True))
    else:
        feature_log_prob = np.zeros((N_CLASSES, 0))
    return NbModel(
        class_log_prior=class_log_prior,
        feature_log_prob=feature_log_prob,
        alpha=float(alpha),
        vocab_size=dim,
    )


def nb_log_posterior(model: NbModel, x: SparseVector) -> np.ndarray:
    """Unnormalized log posterior per class: prior + sum_t x_t * log theta."""
    if x.dim != model.vocab_size:
        raise DimensionMismatchError(f"vector dim {x.dim} != model dim {model.vocab_size}")
    return model.class_log_prior + model.feature_log_prob[:, x.indices] @ x.values


def predict(scores: np.ndarray) -> Label:
    """Label with the maximal score; ties break toward the lowest code."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.shape != (N_CLASSES,):
        raise ValueError(f"expected {N_CLASSES} scores, got shape {scores.shape}")
    if np.any(np.isnan(scores)):
        raise ValueError("NaN score")
    if not np.any(np.isfinite(scores)):
        raise ValueError("all class scores are -inf; no class is predictable")
    return Label(int(np.argmax(scores)))


def logistic_objective(z, X, y_pm, C):
    """Regularized logistic loss and gradient for one binary subproblem.

    z is [w..., b]; the objective is 0.5*||w||^2 + C * sum ln(1+exp(-y*s))
    with s = X@w + b and y in {-1, +1}. The bias is unregularized.
    """
    w, b = z[:-1], z[-1]
    margins = -y_pm * (X @ w + b)
    f = 0.5 * float(w @ w) + C * float(np.sum(np.logaddexp(0.0, margins)))
    coef = C * (-y_pm) * expit(margins)
    grad = np.empty_like(z)
    grad[:-1] = w + X.T @ coef
    grad[-1] = float(np.sum(coef))
    return f, grad


def lr_fit(X: list[SparseVector], y: list[Label], cfg: TrainConfig) -> LinearModel:
    """Fit four one-vs-rest L2-regularized logistic classifiers.

    Each subproblem is minimized with L-BFGS-B until the gradient max-norm
    drops below lr_tol or lr_max_iter iterations elapse; failing the
    gradient test only clears the converged flag.
    """
    labels = _check_training_inputs(X, y)
    X_csr = stack(X)
    n, dim = X_csr.shape

    weights = np.zeros((N_CLASSES, dim))
    bias = np.zeros(N_CLASSES)
    converged = True
    for c in range(N_CLASSES):
        y_pm = np.where(labels == c, 1.0, -1.0)
        z, ok = _minimize_logistic(X_csr, y_pm, cfg)
        weights[c] = z[:-1]
        bias[c] = z[-1]
        converged = converged and ok
    _check_finite(weights, bias)
    return LinearModel(weights=weights, bias=bias, kind=KIND_LOGISTIC, converged=converged)


def _minimize_logistic(X, y_pm, cfg: TrainConfig, callback=None):
    result = scipy.optimize.minimize(
        logistic_objective,
        np.zeros(X.shape[1] + 1),
        args=(X, y_pm, cfg.lr_C),
        jac=True,
        method="L-BFGS-B",
        callback=callback,
        options={"maxiter": cfg.lr_max_iter, "gtol": cfg.lr_tol, "ftol": 0.0},
    )
    _, grad = logistic_objective(result.x, X, y_pm, cfg.lr_C)
    return result.x, float(np.max(np.abs(grad))) <= cfg.lr_tol


def linear_decision(model: LinearModel, x: SparseVector) -> np.ndarray:
    """Per-class decision scores w_c . x + b_c."""
    if x.dim != model.weights.shape[1]:
        raise DimensionMismatchError(
            f"vector dim {x.dim} != model dim {model.weights.shape[1]}"
        )
    return model.weights[:, x.indices] @ x.values + model.bias


def sgd_fit(X: list[SparseVector], y: list[Label], cfg: TrainConfig) -> LinearModel:
    """Fit four one-vs-rest hinge classifiers by per-example SGD.

    Per example: s = w.x + b; the L2 penalty (sgd_alpha/2)*||w||^2 decays w
    every step and a margin violation (y*s < 1) adds eta*y*x to w and
    eta*y to b. Shuffling draws from one PCG64 stream per subproblem,
    spawned from cfg.seed. Training stops early once the mean epoch
    objective improves by less than sgd_tol.
    """
    labels = _check_training_inputs(X, y)
    X_csr = stack(X)
    n, dim = X_csr.shape

    eta0 = cfg.sgd_alpha**-0.25
    t0 = 1.0 / (cfg.sgd_alpha * eta0)

    weights = np.zeros((N_CLASSES, dim))
    bias = np.zeros(N_CLASSES)
    converged = True
    seeds = np.random.SeedSequence(cfg.seed).spawn(N_CLASSES)
    for c in range(N_CLASSES):
        y_pm = np.where(labels == c, 1.0, -1.0)
        w, b, stopped = _sgd_binary(X_csr, y_pm, cfg, t0, np.random.Generator(np.random.PCG64(seeds[c])))
        weights[c] = w
        bias[c] = b
        converged = converged and stopped
    _check_finite(weights, bias)
    return LinearModel(weights=weights, bias=bias, kind=KIND_HINGE, converged=converged)


def _sgd_binary(X, y_pm, cfg, t0, rng):
    n, dim = X.shape
    alpha = cfg.sgd_alpha
    w = np.zeros(dim)
    scale = 1.0  # w_effective = scale * w; keeps the per-step decay O(nnz)
    b = 0.0
    t = 0.0
    prev_loss = None
    indptr, cols, data = X.indptr, X.indices, X.data

    for _ in range(cfg.sgd_epochs):
        for i in rng.permutation(n):
            lo, hi = indptr[i], indptr[i + 1]
            idx, val = cols[lo:hi], data[lo:hi]
            s = scale * float(w[idx] @ val) + b
            eta = 1.0 / (alpha * (t0 + t))
            scale *= max(0.0, 1.0 - eta * alpha)
            if scale < 1e-9:
                w *= scale
                scale = 1.0
            yi = y_pm[i]
            if yi * s < 1.0:
                w[idx] += (eta * yi / scale) * val
                b += eta * yi
            t += 1.0

        w_eff = scale * w
        margins = 1.0 - y_pm * (X @ w_eff + b)
        loss = float(np.mean(np.maximum(0.0, margins))) + 0.5 * alpha * float(w_eff @ w_eff)
        if prev_loss is not None and prev_loss - loss < cfg.sgd_tol:
            return w_eff, b, True
        prev_loss = loss
    return scale * w, b, False


def _check_training_inputs(X: list[SparseVector], y: list[Label]) -> np.ndarray:
    if not X:
        raise TrainingError("empty training set")
    if len(X) != len(y):
        raise TrainingError(f"{len(X)} vectors but {len(y)} labels")
    labels = np.fromiter((int(label) for label in y), dtype=np.int64, count=len(y))
    if np.unique(labels).size < 2:
        raise TrainingError("training data contains a single class")
    return labels


def _check_finite(weights: np.ndarray, bias: np.ndarray):
    if not (np.all(np.isfinite(weights)) and np.all(np.isfinite(bias))):
        raise TrainingError("training produced non-finite parameters")
