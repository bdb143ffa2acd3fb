"""Lloyd K-means and random-subset center selection."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_MAX_ITER = 100
DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class Clustering:
    centers: np.ndarray
    assignments: np.ndarray
    inertia: float
    iterations: int
    # inertia after each assignment step; non-increasing
    history: tuple[float, ...] = ()


def _as_points(points) -> np.ndarray:
    x = np.asarray(getattr(points, "values", points), dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    return x


def _check_k(k: int, n: int) -> None:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > n:
        raise ValueError(f"k={k} exceeds number of points {n}")


def sq_distances(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """(N, k) matrix of squared Euclidean distances."""
    diff = x[:, None, :] - centers[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def assign(x: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest center per point (argmin picks the lowest index on ties)."""
    d2 = sq_distances(x, centers)
    labels = np.argmin(d2, axis=1)
    return labels, d2[np.arange(len(x)), labels]


def random_subset_centers(points, k: int, seed: int | None = None) -> np.ndarray:
    """k distinct training rows chosen without replacement."""
    x = _as_points(points)
    _check_k(k, x.shape[0])
    rng = np.random.default_rng(seed)
    idx = rng.choice(x.shape[0], size=k, replace=False)
    return x[idx].copy()


def _lloyd(x: np.ndarray, k: int, rng: np.random.Generator, max_iter: int, tol: float) -> Clustering:
    centers = x[rng.choice(x.shape[0], size=k, replace=False)].copy()
    history = []
    labels, d2 = assign(x, centers)
    inertia = float(d2.sum())
    history.append(inertia)
    iterations = 0
    for iterations in range(1, max_iter + 1):
        for j in range(k):
            members = labels == j
            if members.any():
                centers[j] = x[members].mean(axis=0)
        labels, d2 = assign(x, centers)

        # empty cluster: move its center onto the point worst served by its own center
        for j in range(k):
            if not np.any(labels == j):
                far = int(np.argmax(d2))
                centers[j] = x[far]
                labels, d2 = assign(x, centers)

        new_inertia = float(d2.sum())
        history.append(new_inertia)
        improvement = inertia - new_inertia
        inertia = new_inertia
        if improvement < tol:
            break
    return Clustering(centers, labels, inertia, iterations, tuple(history))


def kmeans(
    points,
    k: int,
    seed: int | None = None,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
    n_init: int = 1,
) -> Clustering:
    """Lloyd's algorithm seeded from k distinct random input points.

    With ``n_init > 1`` the lowest-inertia run is returned; restarts share one
    generator so the result still depends only on ``seed``.
    """
    x = _as_points(points)
    _check_k(k, x.shape[0])
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if tol < 0:
        raise ValueError("tol must be >= 0")
    if n_init < 1:
        raise ValueError("n_init must be >= 1")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(n_init):
        run = _lloyd(x, k, rng, max_iter, tol)
        if best is None or run.inertia < best.inertia:
            best = run
    return best
