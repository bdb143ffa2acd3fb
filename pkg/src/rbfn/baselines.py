"""Logistic-regression and one-hidden-layer MLP baselines (full-batch GD)."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import Scaler, transform


class TrainingDivergedError(RuntimeError):
    pass


def sigmoid(a):
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(a, dtype=float)))


def _bce(p: np.ndarray, t: np.ndarray) -> float:
    p = np.clip(p, 1e-15, 1 - 1e-15)
    return float(-np.mean(np.sum(t * np.log(p) + (1 - t) * np.log(1 - p), axis=-1)))


def _targets(y, n_classes: int) -> np.ndarray:
    y = np.asarray(y, dtype=int)
    if n_classes == 2:
        return y[:, None].astype(float)
    t = np.zeros((len(y), n_classes))
    t[np.arange(len(y)), y] = 1.0
    return t


# ---------------------------------------------------------------- logistic


@dataclass(frozen=True)
class LogisticConfig:
    lr: float = 0.5
    epochs: int = 500
    seed: int = 0  # unused by the zero-initialized optimizer; kept for run manifests


@dataclass(frozen=True)
class LogisticModel:
    """One sigmoid unit per task: a single unit for L=2, one-vs-rest for L>2."""

    weights: np.ndarray  # (K, d)
    bias: np.ndarray  # (K,)
    n_classes: int
    class_names: tuple[str, ...] = ()
    feature_names: tuple[str, ...] = ()
    scaler: Scaler | None = None
    loss_history: tuple[float, ...] = field(default=(), compare=False, repr=False)


def logistic_loss_and_grad(weights, bias, x, t):
    """Mean binary cross-entropy summed over units, with its gradients."""
    p = sigmoid(x @ weights.T + bias)
    err = (p - t) / x.shape[0]
    return _bce(p, t), err.T @ x, err.sum(axis=0)


def logistic_train(x, y, n_classes: int, config: LogisticConfig = LogisticConfig()) -> LogisticModel:
    x = np.asarray(getattr(x, "values", x), dtype=float)
    y = np.asarray(getattr(y, "indices", y), dtype=int)
    if config.epochs < 1:
        raise ValueError("epochs must be >= 1")
    t = _targets(y, n_classes)
    w = np.zeros((t.shape[1], x.shape[1]))
    b = np.zeros(t.shape[1])
    history = []
    for epoch in range(1, config.epochs + 1):
        loss, gw, gb = logistic_loss_and_grad(w, b, x, t)
        if not np.isfinite(loss):
            raise TrainingDivergedError(f"non-finite loss at epoch {epoch}")
        history.append(loss)
        w -= config.lr * gw
        b -= config.lr * gb
    return LogisticModel(w, b, n_classes, loss_history=tuple(history))


def logistic_scores(model: LogisticModel, x) -> np.ndarray:
    """Class probabilities for standardized inputs."""
    p = sigmoid(np.atleast_2d(x) @ model.weights.T + model.bias)
    if model.n_classes == 2:
        return np.hstack([1.0 - p, p])
    total = p.sum(axis=1, keepdims=True)
    return np.where(total > 0, p / np.where(total > 0, total, 1.0), 1.0 / model.n_classes)


# ---------------------------------------------------------------- MLP


@dataclass(frozen=True)
class MlpConfig:
    hidden: int = 8
    lr: float = 0.1
    epochs: int = 2000
    seed: int = 0


@dataclass(frozen=True)
class MlpModel:
    hidden_weights: np.ndarray  # (H, d+1), column 0 = bias
    output_weights: np.ndarray  # (L, H+1), column 0 = bias
    activation: str = "sigmoid"
    class_names: tuple[str, ...] = ()
    feature_names: tuple[str, ...] = ()
    scaler: Scaler | None = None
    loss_history: tuple[float, ...] = field(default=(), compare=False, repr=False)

    @property
    def n_classes(self) -> int:
        return self.output_weights.shape[0]


def _with_bias(a: np.ndarray) -> np.ndarray:
    return np.hstack([np.ones((a.shape[0], 1)), a])


def mlp_outputs(w1, w2, x):
    h = sigmoid(_with_bias(x) @ w1.T)
    return h, sigmoid(_with_bias(h) @ w2.T)


def mlp_loss_and_grad(w1, w2, x, t):
    """Per-class sigmoid outputs, mean summed cross-entropy; backprop gradients."""
    x = np.atleast_2d(x)
    n = x.shape[0]
    h, p = mlp_outputs(w1, w2, x)
    delta_out = (p - t) / n  # dL/d(output pre-activation)
    g2 = delta_out.T @ _with_bias(h)
    delta_hidden = (delta_out @ w2[:, 1:]) * h * (1 - h)
    g1 = delta_hidden.T @ _with_bias(x)
    return _bce(p, t), g1, g2


def mlp_train(x, y, n_classes: int, config: MlpConfig = MlpConfig()) -> MlpModel:
    x = np.asarray(getattr(x, "values", x), dtype=float)
    y = np.asarray(getattr(y, "indices", y), dtype=int)
    if config.hidden < 1:
        raise ValueError("hidden must be >= 1")
    if config.epochs < 1:
        raise ValueError("epochs must be >= 1")
    t = np.zeros((len(y), n_classes))
    t[np.arange(len(y)), y] = 1.0
    rng = np.random.default_rng(config.seed)
    w1 = rng.uniform(-0.5, 0.5, size=(config.hidden, x.shape[1] + 1))
    w2 = rng.uniform(-0.5, 0.5, size=(n_classes, config.hidden + 1))
    history = []
    for epoch in range(1, config.epochs + 1):
        loss, g1, g2 = mlp_loss_and_grad(w1, w2, x, t)
        if not np.isfinite(loss):
            raise TrainingDivergedError(f"non-finite loss at epoch {epoch}")
        history.append(loss)
        w1 -= config.lr * g1
        w2 -= config.lr * g2
    return MlpModel(w1, w2, loss_history=tuple(history))


def mlp_scores(model: MlpModel, x) -> np.ndarray:
    _, p = mlp_outputs(model.hidden_weights, model.output_weights, np.atleast_2d(x))
    total = p.sum(axis=1, keepdims=True)
    return p / total


# ---------------------------------------------------------------- shared


def baseline_predict(model, x_raw, scaler: Scaler | None = None):
    """Standardize, score, normalize; returns (class index, probabilities).

    Batched input gives arrays of indices and an (N, L) probability matrix.
    """
    scaler = scaler if scaler is not None else model.scaler
    x = np.asarray(x_raw, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    d = model.weights.shape[1] if isinstance(model, LogisticModel) else model.hidden_weights.shape[1] - 1
    if x.shape[1] != d:
        raise ValueError(f"expected {d} features, got {x.shape[1]}")
    if scaler is not None:
        x = transform(scaler, x)
    if isinstance(model, LogisticModel):
        proba = logistic_scores(model, x)
    elif isinstance(model, MlpModel):
        proba = mlp_scores(model, x)
    else:
        raise TypeError(f"unsupported model {type(model).__name__}")
    idx = np.argmax(proba, axis=1)
    if single:
        return int(idx[0]), proba[0]
    return idx, proba
