"""Splits, stratified cross-validation, confusion metrics and model comparison."""
from __future__ import annotations

import csv
import io
import time
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import baselines, rbfnet
from .dataset import FeatureMatrix, LabelVector, fit_scaler, transform

# (train features, train labels, raw test features) -> predicted class indices
Trainer = Callable[[FeatureMatrix, LabelVector, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ClassRates:
    sensitivity: float
    specificity: float
    sensitivity_degenerate: bool = False
    specificity_degenerate: bool = False


@dataclass(frozen=True)
class Metrics:
    confusion: np.ndarray  # rows = true, cols = predicted
    accuracy: float
    per_class: tuple[ClassRates, ...]
    n: int


@dataclass(frozen=True)
class TimingReport:
    model_kind: str
    train_wall_time: float
    epochs_or_iterations: int
    final_train_accuracy: float


def _ratio(num: int, den: int) -> tuple[float, bool]:
    # 0/0 -> 1.0, flagged
    if den == 0:
        return 1.0, True
    return num / den, False


def compute_metrics(true_labels, predicted_labels, n_classes: int) -> Metrics:
    t = np.asarray(true_labels, dtype=int)
    p = np.asarray(predicted_labels, dtype=int)
    if t.shape != p.shape:
        raise ValueError(f"length mismatch: {t.shape[0]} true vs {p.shape[0]} predicted")
    if t.size == 0:
        raise ValueError("no labels")
    conf = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(conf, (t, p), 1)
    n = int(t.size)
    rates = []
    for c in range(n_classes):
        tp = int(conf[c, c])
        fn = int(conf[c].sum()) - tp
        fp = int(conf[:, c].sum()) - tp
        tn = n - tp - fn - fp
        sens, sens_flag = _ratio(tp, tp + fn)
        spec, spec_flag = _ratio(tn, tn + fp)
        rates.append(ClassRates(sens, spec, sens_flag, spec_flag))
    return Metrics(conf, int(np.trace(conf)) / n, tuple(rates), n)


def _largest_remainder(counts: np.ndarray, total: int, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    share = counts * total / counts.sum()
    alloc = np.clip(np.floor(share).astype(int), lo, hi)
    order = np.argsort(-(share - np.floor(share)), kind="stable")
    while alloc.sum() < total:
        for c in order:
            if alloc.sum() < total and alloc[c] < hi[c]:
                alloc[c] += 1
    while alloc.sum() > total:
        for c in order[::-1]:
            if alloc.sum() > total and alloc[c] > lo[c]:
                alloc[c] -= 1
    return alloc


def split_indices(labels, n_train: int, seed: int = 0, stratify: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Seeded train/test index partition, stratified by class when possible."""
    y = np.asarray(labels, dtype=int)
    n = y.size
    if not 1 <= n_train < n:
        raise ValueError(f"n_train must be in [1, {n - 1}], got {n_train}")
    rng = np.random.default_rng(seed)
    classes, counts = np.unique(y, return_counts=True)
    n_test = n - n_train
    if stratify and counts.min() < 2:
        warnings.warn("a class has fewer than 2 members; falling back to an unstratified split")
        stratify = False
    if stratify and (n_train < len(classes) or n_test < len(classes)):
        warnings.warn("split too small to place every class on both sides; unstratified split")
        stratify = False
    if not stratify:
        perm = rng.permutation(n)
        return np.sort(perm[:n_train]), np.sort(perm[n_train:])
    alloc = _largest_remainder(counts, n_train, np.ones_like(counts), counts - 1)
    train, test = [], []
    for c, k in zip(classes, alloc):
        members = rng.permutation(np.flatnonzero(y == c))
        train.append(members[:k])
        test.append(members[k:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def train_test_split(m: FeatureMatrix, y: LabelVector, n_train: int, seed: int = 0, stratify: bool = True):
    tr, te = split_indices(y.indices, n_train, seed, stratify)
    return (m.take(tr), y.take(tr)), (m.take(te), y.take(te))


def stratified_folds(labels, folds: int, seed: int = 0) -> list[np.ndarray]:
    """Deal shuffled members of each class round-robin into ``folds`` index sets."""
    y = np.asarray(labels, dtype=int)
    if folds < 2:
        raise ValueError("folds must be >= 2")
    if folds > y.size:
        raise ValueError(f"folds={folds} exceeds sample count {y.size}")
    rng = np.random.default_rng(seed)
    order = np.concatenate([rng.permutation(np.flatnonzero(y == c)) for c in np.unique(y)])
    return [np.sort(order[i::folds]) for i in range(folds)]


@dataclass(frozen=True)
class CvResult:
    fold_metrics: tuple[Metrics, ...]
    folds: tuple[np.ndarray, ...]
    mean_accuracy: float
    std_accuracy: float


def kfold_cv(m: FeatureMatrix, y: LabelVector, folds: int, trainer: Trainer, seed: int = 0) -> CvResult:
    fold_sets = stratified_folds(y.indices, folds, seed)
    n = y.indices.size
    results = []
    for test_idx in fold_sets:
        train_idx = np.setdiff1d(np.arange(n), test_idx)
        pred = trainer(m.take(train_idx), y.take(train_idx), m.values[test_idx])
        results.append(compute_metrics(y.indices[test_idx], pred, y.n_classes))
    accs = np.array([r.accuracy for r in results])
    return CvResult(tuple(results), tuple(fold_sets), float(accs.mean()), float(accs.std()))


# ---------------------------------------------------------------- comparison


@dataclass(frozen=True)
class CompareConfig:
    rbf: rbfnet.TrainConfig = field(default_factory=lambda: rbfnet.TrainConfig(n_hidden=20))
    mlp: baselines.MlpConfig = field(default_factory=baselines.MlpConfig)
    logistic: baselines.LogisticConfig = field(default_factory=baselines.LogisticConfig)
    n_train: int | None = None
    seed: int = 0


@dataclass(frozen=True)
class ComparisonRow:
    model_kind: str
    metrics: Metrics
    timing: TimingReport


def _timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


def compare_models(
    m: FeatureMatrix, y: LabelVector, config: CompareConfig = CompareConfig()
) -> list[ComparisonRow]:
    """Train RBF, MLP and logistic models on one shared split and score the test side."""
    n = y.indices.size
    n_train = config.n_train if config.n_train is not None else int(round(0.6 * n))
    (tr_m, tr_y), (te_m, te_y) = train_test_split(m, y, n_train, config.seed)
    L = y.n_classes

    rows = []
    rbf_model, dt = _timed(lambda: rbfnet.train(tr_m, tr_y, config.rbf))
    train_acc = float(np.mean(np.atleast_1d(rbfnet.predict(rbf_model, tr_m.values)) == tr_y.indices))
    test_pred = np.atleast_1d(rbfnet.predict(rbf_model, te_m.values))
    rows.append(ComparisonRow("rbf", compute_metrics(te_y.indices, test_pred, L),
                              TimingReport("rbf", dt, 1, train_acc)))

    # baselines train on standardized inputs; scaling is excluded from their timing as well
    scaler = fit_scaler(tr_m.values)
    x_std = transform(scaler, tr_m.values)
    for kind, fit, cfg in (
        ("mlp", baselines.mlp_train, config.mlp),
        ("logistic", baselines.logistic_train, config.logistic),
    ):
        model, dt = _timed(lambda: fit(x_std, tr_y.indices, L, cfg))
        model = replace(model, scaler=scaler, class_names=y.class_names, feature_names=m.feature_names)
        train_pred, _ = baselines.baseline_predict(model, tr_m.values)
        test_pred, _ = baselines.baseline_predict(model, te_m.values)
        rows.append(ComparisonRow(kind, compute_metrics(te_y.indices, test_pred, L),
                                  TimingReport(kind, dt, cfg.epochs, float(np.mean(train_pred == tr_y.indices)))))
    _check_speed_claim(rows)
    return rows


def _check_speed_claim(rows: Sequence[ComparisonRow]) -> bool | None:
    """Soft check that RBF trains faster than the MLP; warns instead of failing."""
    by_kind = {r.model_kind: r.timing for r in rows}
    rbf, mlp = by_kind.get("rbf"), by_kind.get("mlp")
    if rbf is None or mlp is None:
        return None
    if rbf.final_train_accuracy < 0.95 or mlp.final_train_accuracy < 0.95:
        return None
    if rbf.train_wall_time >= mlp.train_wall_time:
        warnings.warn(
            f"RBF training ({rbf.train_wall_time:.4f}s) was not faster than MLP "
            f"({mlp.train_wall_time:.4f}s)"
        )
        return False
    return True


def metrics_table(rows: Sequence[ComparisonRow], class_names: Sequence[str], timing: bool = True) -> list[list[str]]:
    header = ["model", "test_accuracy"]
    for c in class_names:
        header += [f"sensitivity[{c}]", f"specificity[{c}]"]
    header += ["final_train_accuracy", "epochs_or_iterations"]
    if timing:
        header.append("train_wall_time")
    out = [header]
    for r in rows:
        line = [r.model_kind, repr(r.metrics.accuracy)]
        for rates in r.metrics.per_class:
            line += [repr(rates.sensitivity), repr(rates.specificity)]
        line += [repr(r.timing.final_train_accuracy), str(r.timing.epochs_or_iterations)]
        if timing:
            line.append(f"{r.timing.train_wall_time:.6f}")
        out.append(line)
    return out


def to_csv(table: Sequence[Sequence[str]]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(table)
    return buf.getvalue()


def to_text(table: Sequence[Sequence[str]]) -> str:
    cells = [[_short(c) for c in row] for row in table]
    widths = [max(len(row[i]) for row in cells) for i in range(len(cells[0]))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells) + "\n"


def _short(cell: str) -> str:
    try:
        value = float(cell)
    except ValueError:
        return cell
    return cell if cell.isdigit() else f"{value:.4f}"
