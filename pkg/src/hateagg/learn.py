"""Logistic-regression training, stratified cross-validation, and metrics.

The classifier is deliberately dependency-free: full-batch gradient descent
with backtracking (Armijo) line search from a zero initialization, so a given
training set always produces the same model. Features are standardized with
statistics fitted on the training rows only; a zero-variance column gets
std 1, which makes its standardized values constant zero and freezes its
weight at the origin.

The loss is the mean negative log-likelihood plus an L2 penalty on the
weights (never the bias):

    L(w, b) = mean_i [ log(1 + exp(z_i)) - y_i * z_i ] + (lambda / 2) ||w||^2
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import expit
from scipy.stats import rankdata

from .degroot import DiffusionConfig, degroot_init, degroot_run
from .errors import DegenerateDataError, InputError
from .features import AggregationConfig, FeatureMatrix, build_features, per_node_counts
from .ingest import Dataset
from .serialize import dump_json

__all__ = [
    "LearnConfig",
    "LogRegModel",
    "EvalReport",
    "loss_and_gradient",
    "train_logreg",
    "predict_proba",
    "stratified_kfold",
    "metrics",
    "cross_validate",
    "cross_validate_features",
    "threshold_sweep",
]

METRIC_NAMES = ("precision", "recall", "f1", "roc_auc")


@dataclass
class LearnConfig:
    folds: int = 5
    seed: int = 0
    l2_lambda: float = 1.0
    max_iters: int = 10_000
    grad_tol: float = 1e-7
    decision_threshold: float = 0.5
    select_threshold: bool = False  # pick the threshold by train-fold F1
    threads: int = 1

    def __post_init__(self) -> None:
        if self.folds < 2:
            raise InputError("folds must be >= 2")
        if self.l2_lambda < 0:
            raise InputError("l2_lambda must be >= 0")
        if not (0.0 <= self.decision_threshold <= 1.0):
            raise InputError("decision_threshold must be in [0, 1]")
        if self.threads < 1:
            raise InputError("threads must be >= 1")


@dataclass
class LogRegModel:
    """Trained weights plus the standardization fitted on the training rows."""

    schema: list[str]
    weights: np.ndarray
    bias: float
    mean: np.ndarray
    std: np.ndarray
    decision_threshold: float = 0.5
    n_iters: int = 0
    loss_history: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "schema": list(self.schema),
            "weights": [float(w) for w in self.weights],
            "bias": float(self.bias),
            "standardization": {
                "mean": [float(m) for m in self.mean],
                "std": [float(s) for s in self.std],
            },
            "decision_threshold": float(self.decision_threshold),
            "n_iters": int(self.n_iters),
        }


def _nll_mean(z: np.ndarray, y: np.ndarray) -> float:
    # log(1 + e^z) - y z, evaluated stably
    return float(np.mean(np.logaddexp(0.0, z) - y * z))


def loss_and_gradient(
    X: np.ndarray, y: np.ndarray, w: np.ndarray, b: float, lam: float
) -> tuple[float, np.ndarray, float]:
    """Regularized mean-NLL loss and its exact gradient at (w, b).

    The NLL term is the mean over examples; the L2 penalty applies to the
    weights only, never the bias.
    """
    z = X @ w + b
    n = len(y)
    loss = _nll_mean(z, y) + 0.5 * lam * float(w @ w)
    resid = (expit(z) - y) / n
    gw = X.T @ resid + lam * w
    gb = float(np.sum(resid))
    return loss, gw, gb


def train_logreg(
    features: FeatureMatrix | np.ndarray,
    y: Sequence[int] | np.ndarray,
    config: LearnConfig | None = None,
    schema: list[str] | None = None,
) -> LogRegModel:
    """Fit the regularized logistic regression on the given rows.

    Deterministic: zero init, full-batch descent, Armijo backtracking, stop
    when the gradient max-norm (weights and bias) drops below ``grad_tol``.
    """
    config = config or LearnConfig()
    if isinstance(features, FeatureMatrix):
        X = features.values
        schema = features.schema
    else:
        X = np.asarray(features, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, None]
        schema = schema or [f"f{i}" for i in range(X.shape[1])]
    y = np.asarray(y, dtype=np.float64)
    if X.shape[0] != len(y):
        raise InputError("feature rows and labels disagree in length")
    if not np.all(np.isfinite(X)):
        raise InputError("feature matrix contains non-finite values")
    n_pos = int(np.sum(y == 1))
    if n_pos == 0 or n_pos == len(y):
        raise DegenerateDataError("training labels contain a single class")

    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std = np.where(std == 0.0, 1.0, std)
    Xs = (X - mean) / std

    lam = config.l2_lambda
    w = np.zeros(X.shape[1])
    b = 0.0
    loss, gw, gb = loss_and_gradient(Xs, y, w, b, lam)
    history = [loss]
    steps = 0

    while steps < config.max_iters:
        gnorm = max(float(np.max(np.abs(gw))) if len(gw) else 0.0, abs(gb))
        if gnorm < config.grad_tol:
            break

        step = 1.0
        g2 = float(gw @ gw) + gb * gb
        accepted = False
        for _ in range(60):
            w_new = w - step * gw
            b_new = b - step * gb
            z_new = Xs @ w_new + b_new
            loss_new = _nll_mean(z_new, y) + 0.5 * lam * float(w_new @ w_new)
            if loss_new <= loss - 1e-4 * step * g2:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break  # step underflow: gradient no longer improves the loss
        w, b = w_new, b_new
        loss, gw, gb = loss_and_gradient(Xs, y, w, b, lam)
        history.append(loss)
        steps += 1

    return LogRegModel(
        schema=list(schema),
        weights=w,
        bias=b,
        mean=mean,
        std=std,
        decision_threshold=config.decision_threshold,
        n_iters=steps,
        loss_history=history,
    )


def predict_proba(model: LogRegModel, x: np.ndarray) -> np.ndarray | float:
    """Sigmoid score(s) for one feature row or a matrix of rows."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != len(model.weights):
        raise InputError(
            f"feature length {x.shape[-1]} does not match schema length "
            f"{len(model.weights)}"
        )
    xs = (x - model.mean) / model.std
    z = xs @ model.weights + model.bias
    out = expit(z)
    return float(out) if np.ndim(out) == 0 else out


def stratified_kfold(
    y: Sequence[int] | np.ndarray, k: int, seed: int
) -> list[np.ndarray]:
    """k disjoint test folds with per-class counts balanced to within one.

    Each class is shuffled with a seeded generator and dealt round-robin;
    fold contents are sorted index arrays. Same seed, same folds.
    """
    y = np.asarray(y)
    n = len(y)
    if k < 2:
        raise InputError("k must be >= 2")
    if k > n:
        raise InputError(f"cannot split {n} examples into {k} folds")
    rng = np.random.default_rng(seed)
    folds: list[list[np.ndarray]] = [[] for _ in range(k)]
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        perm = rng.permutation(idx)
        for i in range(k):
            folds[i].append(perm[i::k])
    return [
        np.sort(np.concatenate(parts)) if parts else np.zeros(0, dtype=np.int64)
        for parts in folds
    ]


def metrics(
    y_true: Sequence[int] | np.ndarray,
    y_pred: Sequence[int] | np.ndarray,
    y_score: Sequence[float] | np.ndarray,
) -> dict:
    """Precision, recall, F1, and ROC AUC (ties count half).

    Zero-denominator conventions: precision is 0 with no predicted
    positives, F1 is 0 when precision + recall is 0. An evaluation set
    without both classes cannot be scored and raises.
    """
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    y_score = np.asarray(y_score, dtype=np.float64)
    if not (len(y_true) == len(y_pred) == len(y_score)):
        raise InputError("metric inputs disagree in length")
    if not np.all(np.isfinite(y_score)):
        raise InputError("scores must be finite")
    n_pos = int(np.sum(y_true == 1))
    n_neg = len(y_true) - n_pos
    if n_pos == 0:
        raise DegenerateDataError("no positive examples: recall undefined")
    if n_neg == 0:
        raise DegenerateDataError("no negative examples: ROC AUC undefined")

    tp = int(np.sum((y_pred == 1) & (y_true == 1)))
    fp = int(np.sum((y_pred == 1) & (y_true == 0)))
    fn = int(np.sum((y_pred == 0) & (y_true == 1)))
    precision = tp / (tp + fp) if (tp + fp) > 0 else 0.0
    recall = tp / (tp + fn)
    f1 = 2 * precision * recall / (precision + recall) if (precision + recall) > 0 else 0.0

    ranks = rankdata(y_score, method="average")
    pos_rank_sum = float(np.sum(ranks[y_true == 1]))
    auc = (pos_rank_sum - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg)
    return {"precision": precision, "recall": recall, "f1": f1, "roc_auc": auc}


@dataclass
class EvalReport:
    """Per-fold metrics with mean and (population) std, plus the run config."""

    config: dict
    folds: list[dict]
    mean: dict
    std: dict

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "folds": self.folds,
            "mean": self.mean,
            "std": self.std,
        }

    def to_json(self) -> str:
        return dump_json(self.to_dict())


def _summarize(config: dict, fold_metrics: list[dict]) -> EvalReport:
    mean = {
        m: float(np.mean([f[m] for f in fold_metrics])) for m in METRIC_NAMES
    }
    std = {m: float(np.std([f[m] for f in fold_metrics])) for m in METRIC_NAMES}
    return EvalReport(config=config, folds=fold_metrics, mean=mean, std=std)


def _best_f1_threshold(y: np.ndarray, scores: np.ndarray) -> float:
    """Smallest threshold maximizing F1 of (scores >= t) on the given labels."""
    best_t = 0.5
    best_f1 = -1.0
    for t in np.unique(scores):
        pred = scores >= t
        tp = int(np.sum(pred & (y == 1)))
        fp = int(np.sum(pred & (y == 0)))
        fn = int(np.sum(~pred & (y == 1)))
        p = tp / (tp + fp) if (tp + fp) > 0 else 0.0
        r = tp / (tp + fn) if (tp + fn) > 0 else 0.0
        f1 = 2 * p * r / (p + r) if (p + r) > 0 else 0.0
        if f1 > best_f1:
            best_f1 = f1
            best_t = float(t)
    return best_t


def cross_validate_features(
    X: np.ndarray,
    y: np.ndarray,
    config: LearnConfig,
    run_config: dict | None = None,
    schema: list[str] | None = None,
) -> EvalReport:
    """Stratified k-fold evaluation of the classifier on raw feature rows."""
    y = np.asarray(y, dtype=np.int64)
    if len(y) < 2 * config.folds:
        raise DegenerateDataError(
            f"need at least {2 * config.folds} labeled users for {config.folds} folds"
        )
    folds = stratified_kfold(y, config.folds, config.seed)
    all_idx = np.arange(len(y))

    def eval_fold(test_idx: np.ndarray) -> dict:
        train_mask = np.ones(len(y), dtype=bool)
        train_mask[test_idx] = False
        train_idx = all_idx[train_mask]
        model = train_logreg(X[train_idx], y[train_idx], config, schema=schema)
        if config.select_threshold:
            train_scores = predict_proba(model, X[train_idx])
            thr = _best_f1_threshold(y[train_idx], np.asarray(train_scores))
        else:
            thr = config.decision_threshold
        scores = np.asarray(predict_proba(model, X[test_idx]))
        pred = (scores >= thr).astype(np.int64)
        return metrics(y[test_idx], pred, scores)

    fold_metrics = _run_folds(eval_fold, folds, config.threads)
    return _summarize(run_config or {}, fold_metrics)


def _run_folds(eval_fold, folds, threads: int) -> list[dict]:
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(eval_fold, f) for f in folds]
            return [f.result() for f in futures]
    return [eval_fold(f) for f in folds]


def _degroot_report(
    dataset: Dataset,
    agg: AggregationConfig,
    config: LearnConfig,
    diffusion: DiffusionConfig,
    run_config: dict,
) -> EvalReport:
    node_idx, y = dataset.labeled_indices()
    if len(y) < 2 * config.folds:
        raise DegenerateDataError(
            f"need at least {2 * config.folds} labeled users for {config.folds} folds"
        )
    beliefs, _ = degroot_run(
        dataset.graph,
        degroot_init(dataset, agg, init=diffusion.init),
        max_iters=diffusion.max_iters,
        tol=diffusion.tol,
        direction=diffusion.direction,
    )
    scores = beliefs.values[node_idx]
    folds = stratified_kfold(y, config.folds, config.seed)
    all_idx = np.arange(len(y))

    def eval_fold(test_idx: np.ndarray) -> dict:
        # no trained model here: the cutoff is swept on the train fold
        train_mask = np.ones(len(y), dtype=bool)
        train_mask[test_idx] = False
        thr = _best_f1_threshold(y[all_idx[train_mask]], scores[all_idx[train_mask]])
        pred = (scores[test_idx] >= thr).astype(np.int64)
        return metrics(y[test_idx], pred, scores[test_idx])

    fold_metrics = _run_folds(eval_fold, folds, config.threads)
    return _summarize(run_config, fold_metrics)


def cross_validate(
    dataset: Dataset,
    mode: str,
    agg: AggregationConfig | None = None,
    config: LearnConfig | None = None,
    diffusion: DiffusionConfig | None = None,
) -> EvalReport:
    """Stratified k-fold evaluation of one aggregation mode on a dataset.

    Features are computed once for all users (neighbor flags derive from
    scores, not labels, so no information crosses fold boundaries); the
    model and its standardization are refitted per training fold. Mode
    "degroot" evaluates diffused beliefs with a per-fold threshold instead
    of a trained model.
    """
    agg = agg or AggregationConfig()
    config = config or LearnConfig()
    run_config = {
        "mode": mode,
        "tau_t": agg.tau_t,
        "tau_fixed": agg.tau_fixed,
        "k_bins": agg.k_bins,
        "softmax_histograms": agg.softmax_histograms,
        "folds": config.folds,
        "seed": config.seed,
        "l2_lambda": config.l2_lambda,
        "decision_threshold": config.decision_threshold,
        "select_threshold": config.select_threshold,
    }
    if mode == "degroot":
        diffusion = diffusion or DiffusionConfig()
        run_config.update(
            {
                "direction": diffusion.direction,
                "max_iters": diffusion.max_iters,
                "tol": diffusion.tol,
                "init": diffusion.init,
                "threshold_selection": "train_fold_f1",
            }
        )
        return _degroot_report(dataset, agg, config, diffusion, run_config)

    fm = build_features(dataset, mode, agg, threads=config.threads)
    node_idx, y = dataset.labeled_indices()
    if len(y) == 0:
        raise DegenerateDataError("dataset has no labeled users")
    X = fm.values[node_idx]
    return cross_validate_features(
        X, y, config, run_config=run_config, schema=fm.schema
    )


def threshold_sweep(
    dataset: Dataset,
    thresholds: Sequence[int],
    tau_t: float = 0.5,
) -> list[dict]:
    """Naive fixed-threshold classifier swept over user-level count cutoffs.

    For each cutoff t, every labeled user with at least t flagged posts is
    predicted hateful. ROC AUC uses the counts as scores and is therefore
    identical in every row.
    """
    thresholds = list(thresholds)
    if thresholds != sorted(thresholds):
        raise InputError("thresholds must be sorted ascending")
    if any(t < 1 for t in thresholds):
        raise InputError("thresholds must be >= 1")
    counts, _ = per_node_counts(dataset, tau_t)
    node_idx, y = dataset.labeled_indices()
    if len(y) == 0:
        raise DegenerateDataError("dataset has no labeled users")
    scores = counts[node_idx].astype(np.float64)
    rows = []
    for t in thresholds:
        pred = (scores >= t).astype(np.int64)
        m = metrics(y, pred, scores)
        rows.append({"threshold": int(t), **m})
    return rows
