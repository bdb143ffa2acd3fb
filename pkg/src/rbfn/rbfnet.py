"""Gaussian RBF network: hidden layer, spreads, ridge output weights, training."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .dataset import FeatureMatrix, LabelVector, Scaler, fit_scaler, transform
from .kmeans import assign, kmeans, random_subset_centers

SPREAD_EPS = 1e-6
DEFAULT_LAMBDA = 1e-8
SPREAD_MODES = ("scalar", "per_dimension")
CENTER_STRATEGIES = ("kmeans", "random_subset")


class SingularSystemError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class KernelConfig:
    kind: str = "gaussian"
    spread_mode: str = "scalar"

    def __post_init__(self):
        if self.kind != "gaussian":
            raise ValueError(f"unsupported kernel {self.kind!r}")
        if self.spread_mode not in SPREAD_MODES:
            raise ValueError(f"spread_mode must be one of {SPREAD_MODES}")


@dataclass(frozen=True)
class RbfModel:
    centers: np.ndarray  # (J, d), standardized units
    spreads: np.ndarray  # (J,) or (J, d)
    weights: np.ndarray  # (J+1, L); row 0 is the bias
    class_names: tuple[str, ...]
    scaler: Scaler
    kernel: KernelConfig = field(default_factory=KernelConfig)
    feature_names: tuple[str, ...] = ()
    # categorical source column -> levels, needed to re-encode raw records
    levels: dict = field(default_factory=dict)

    def __post_init__(self):
        centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
        spreads = np.asarray(self.spreads, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        J, d = centers.shape
        if J < 1:
            raise ValueError("need at least one hidden unit")
        if len(self.class_names) < 2:
            raise ValueError("need at least two classes")
        want = (J,) if self.kernel.spread_mode == "scalar" else (J, d)
        if spreads.shape != want:
            raise ValueError(f"spreads shape {spreads.shape}, expected {want}")
        if weights.shape != (J + 1, len(self.class_names)):
            raise ValueError(f"weights shape {weights.shape}, expected {(J + 1, len(self.class_names))}")
        if np.any(spreads <= 0):
            raise ValueError("spreads must be strictly positive")
        for name, arr in (("centers", centers), ("spreads", spreads), ("weights", weights)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite {name}")
            arr.setflags(write=False)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "spreads", spreads)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "class_names", tuple(self.class_names))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def n_hidden(self) -> int:
        return self.centers.shape[0]

    @property
    def n_features(self) -> int:
        return self.centers.shape[1]


def gaussian_kernel(r, sigma):
    """exp(-r^2 / (2 sigma^2)); equals 1 at the centre."""
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma <= 0):
        raise ValueError("sigma must be positive")
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("distance must be non-negative")
    out = np.exp(-(r * r) / (2.0 * sigma * sigma))
    return float(out) if out.ndim == 0 else out


def _check_dim(x: np.ndarray, d: int) -> None:
    if x.shape[-1] != d:
        raise ValueError(f"expected {d} features, got {x.shape[-1]}")


def activations(centers: np.ndarray, spreads: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Hidden outputs for a batch ``x`` (N, d) -> (N, J)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    _check_dim(x, centers.shape[1])
    diff = x[:, None, :] - centers[None, :, :]
    if spreads.ndim == 1:
        r = np.sqrt(np.einsum("njd,njd->nj", diff, diff))
        return gaussian_kernel(r, spreads[None, :])
    scaled = diff / spreads[None, :, :]
    return np.exp(-0.5 * np.einsum("njd,njd->nj", scaled, scaled))


def hidden_activations(model: RbfModel, x) -> np.ndarray:
    """z for one standardized input vector."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("expected a single feature vector")
    return activations(model.centers, model.spreads, x)[0]


def design_matrix(centers, spreads, x) -> np.ndarray:
    """Hidden activations with a leading column of ones for the bias weight."""
    z = activations(centers, spreads, x)
    return np.hstack([np.ones((z.shape[0], 1)), z])


def forward(model: RbfModel, x) -> np.ndarray:
    """Raw summation-layer scores for standardized input(s)."""
    x = np.asarray(x, dtype=float)
    phi = design_matrix(model.centers, model.spreads, x)
    scores = phi @ model.weights
    return scores[0] if x.ndim == 1 else scores


def scores_to_proba(scores) -> np.ndarray:
    """Clip at zero and normalize each row; an all-zero row becomes uniform."""
    s = np.clip(np.atleast_2d(np.asarray(scores, dtype=float)), 0.0, None)
    total = s.sum(axis=1, keepdims=True)
    L = s.shape[1]
    safe = np.where(total > 0, total, 1.0)
    proba = np.where(total > 0, s / safe, 1.0 / L)
    return proba[0] if np.ndim(scores) == 1 else proba


def predict_proba(model: RbfModel, x_raw) -> np.ndarray:
    x = transform(model.scaler, np.asarray(x_raw, dtype=float))
    return scores_to_proba(forward(model, x))


def predict(model: RbfModel, x_raw):
    """Class index (or indices for a batch); ties go to the lowest index."""
    proba = predict_proba(model, x_raw)
    out = np.argmax(proba, axis=-1)
    return int(out) if np.ndim(out) == 0 else out


def compute_spreads(centers, assignments, points, mode: str = "scalar") -> np.ndarray:
    """Per-unit widths from the spread of each cluster.

    Degenerate clusters (size <= 1, or width <= SPREAD_EPS) get the shared
    fallback d_max / sqrt(2J), capped by the distance to the nearest other
    center, or 1 when every center coincides. The cap keeps crowded units
    from producing near-identical columns in the design matrix.
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    x = np.atleast_2d(np.asarray(points, dtype=float))
    labels = np.asarray(assignments, dtype=int)
    if mode not in SPREAD_MODES:
        raise ValueError(f"spread mode must be one of {SPREAD_MODES}")
    J, d = centers.shape
    diff = centers[:, None, :] - centers[None, :, :]
    dist = np.sqrt(np.einsum("ijd,ijd->ij", diff, diff))
    d_max = float(dist.max())
    shared = d_max / math.sqrt(2 * J) if d_max > SPREAD_EPS else 1.0
    fallback = np.full(J, shared)
    if d_max > SPREAD_EPS:
        others = np.where(dist > SPREAD_EPS, dist, np.inf)
        np.fill_diagonal(others, np.inf)
        fallback = np.minimum(shared, others.min(axis=1))

    spreads = np.empty((J,) if mode == "scalar" else (J, d))
    for j in range(J):
        members = x[labels == j]
        spreads[j] = fallback[j]
        if len(members) <= 1:
            continue
        dev = members - centers[j]
        if mode == "scalar":
            s = math.sqrt(float(np.mean(np.sum(dev * dev, axis=1))))
            if s > SPREAD_EPS:
                spreads[j] = s
        else:
            s = members.std(axis=0)
            spreads[j] = np.where(s > SPREAD_EPS, s, fallback[j])
    return spreads


def fit_output_weights(phi, targets, lam: float = DEFAULT_LAMBDA) -> np.ndarray:
    """Solve (phi^T phi + lam I) W = phi^T T."""
    phi = np.atleast_2d(np.asarray(phi, dtype=float))
    t = np.asarray(targets, dtype=float)
    if t.ndim == 1:
        t = t[:, None]
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    if phi.shape[0] != t.shape[0]:
        raise ValueError("phi and targets have different row counts")
    gram = phi.T @ phi
    if lam > 0:
        gram = gram + lam * np.eye(gram.shape[0])
    elif np.linalg.matrix_rank(gram) < gram.shape[0]:
        raise SingularSystemError(
            "normal equations are singular with lambda=0; use a positive lambda"
        )
    try:
        return np.linalg.solve(gram, phi.T @ t)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"{exc}; increase lambda") from None


@dataclass(frozen=True)
class TrainConfig:
    n_hidden: int = 10
    center_strategy: str = "kmeans"
    spread_mode: str = "scalar"
    lam: float = DEFAULT_LAMBDA
    seed: int = 0
    kmeans_restarts: int = 1

    def __post_init__(self):
        if self.center_strategy not in CENTER_STRATEGIES:
            raise ValueError(f"center_strategy must be one of {CENTER_STRATEGIES}")
        if self.spread_mode not in SPREAD_MODES:
            raise ValueError(f"spread_mode must be one of {SPREAD_MODES}")
        if self.n_hidden < 1:
            raise ValueError("n_hidden must be >= 1")
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")


def one_hot(indices, n_classes: int) -> np.ndarray:
    t = np.zeros((len(indices), n_classes))
    t[np.arange(len(indices)), np.asarray(indices, dtype=int)] = 1.0
    return t


def train(m: FeatureMatrix, y: LabelVector, config: TrainConfig = TrainConfig()) -> RbfModel:
    x_raw = m.values
    n = x_raw.shape[0]
    if config.n_hidden > n:
        raise ValueError(f"n_hidden={config.n_hidden} exceeds training size {n}")
    if len(y.indices) != n:
        raise ValueError("feature and label counts differ")
    scaler = fit_scaler(x_raw)
    x = transform(scaler, x_raw)
    if config.center_strategy == "kmeans":
        clustering = kmeans(x, config.n_hidden, seed=config.seed, n_init=config.kmeans_restarts)
        centers, labels = clustering.centers, clustering.assignments
    else:
        centers = random_subset_centers(x, config.n_hidden, seed=config.seed)
        labels, _ = assign(x, centers)
    spreads = compute_spreads(centers, labels, x, config.spread_mode)
    phi = design_matrix(centers, spreads, x)
    weights = fit_output_weights(phi, one_hot(y.indices, y.n_classes), config.lam)
    return RbfModel(
        centers=centers,
        spreads=spreads,
        weights=weights,
        class_names=y.class_names,
        scaler=scaler,
        kernel=KernelConfig(spread_mode=config.spread_mode),
        feature_names=m.feature_names,
        levels=dict(m.levels),
    )


@dataclass(frozen=True)
class HiddenSizeSelection:
    chosen: int
    # rows of (J, mean accuracy, standard error, per-fold accuracies)
    table: tuple[tuple[int, float, float, tuple[float, ...]], ...]


def one_se_choice(table: Sequence[tuple[int, float, float]]) -> int:
    """Smallest J whose mean accuracy is within one SE of the best mean."""
    best = max(table, key=lambda row: row[1])
    threshold = best[1] - best[2]
    eligible = [J for J, mean, _ in table if mean >= threshold - 1e-12]
    return min(eligible)


def select_hidden_size(
    m: FeatureMatrix,
    y: LabelVector,
    grid: Sequence[int],
    folds: int = 5,
    seed: int = 0,
    base: TrainConfig = TrainConfig(),
) -> HiddenSizeSelection:
    from .evaluation import kfold_cv, stratified_folds  # evaluation imports this module

    if not grid:
        raise ValueError("hidden-size grid is empty")
    fold_sets = stratified_folds(y.indices, folds, seed)
    smallest_train = len(y.indices) - max(len(f) for f in fold_sets)
    too_big = [J for J in grid if J > smallest_train]
    if too_big:
        raise ValueError(f"grid values {too_big} exceed smallest training fold size {smallest_train}")

    rows = []
    for J in sorted(set(grid)):
        cfg = TrainConfig(
            n_hidden=J,
            center_strategy=base.center_strategy,
            spread_mode=base.spread_mode,
            lam=base.lam,
            seed=base.seed,
            kmeans_restarts=base.kmeans_restarts,
        )
        trainer = _rbf_trainer(cfg)
        cv = kfold_cv(m, y, folds, trainer, seed)
        accs = tuple(f.accuracy for f in cv.fold_metrics)
        se = float(np.std(accs, ddof=1) / math.sqrt(len(accs))) if len(accs) > 1 else 0.0
        rows.append((J, float(np.mean(accs)), se, accs))
    chosen = one_se_choice([(J, mean, se) for J, mean, se, _ in rows])
    return HiddenSizeSelection(chosen, tuple(rows))


def _rbf_trainer(cfg: TrainConfig) -> Callable:
    def fit_and_predict(train_m: FeatureMatrix, train_y: LabelVector, test_x: np.ndarray) -> np.ndarray:
        model = train(train_m, train_y, cfg)
        return np.atleast_1d(predict(model, test_x))

    return fit_and_predict
