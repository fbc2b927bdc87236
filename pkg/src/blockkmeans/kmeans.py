"""Seeded k-means++ / Lloyd clustering kernel and cluster-map rendering."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .image import Dims, Image
from .rng import SplitMix64


class KMeansInputError(ValueError):
    pass


@dataclass(frozen=True)
class KMeansConfig:
    k: int
    max_iters: int = 100
    tol: float = 1e-4
    seed: int = 42

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.tol < 0:
            raise ValueError(f"tol must be >= 0, got {self.tol}")


@dataclass(frozen=True, eq=False)
class KMeansModel:
    centroids: np.ndarray  # (k, dim)
    labels: np.ndarray  # (n,)
    inertia: float
    iterations: int
    # inertia after each Lloyd step, oldest first
    inertia_history: tuple[float, ...] = field(default=())

    @property
    def k(self) -> int:
        return len(self.centroids)


def as_points(points) -> np.ndarray:
    """Coerce to a nonempty (n, dim) float64 array; 1-D input is one feature per point."""
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise KMeansInputError(f"expected a nonempty (n, dim) point set, got shape {arr.shape}")
    return arr


def image_points(img: Image) -> np.ndarray:
    """Pixels of ``img`` in row-major order as float64 feature vectors."""
    return img.samples.reshape(-1, img.channels).astype(np.float64)


def _sq_dist_to(cols: np.ndarray, center: np.ndarray) -> np.ndarray:
    # cols is (dim, n); accumulate per channel to avoid an (n, dim) temporary
    acc = (cols[0] - center[0]) ** 2
    for ch in range(1, cols.shape[0]):
        acc += (cols[ch] - center[ch]) ** 2
    return acc


def _distance_matrix(cols: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    return np.stack([_sq_dist_to(cols, c) for c in centroids], axis=1)


def init_kmeans_pp(points, k: int, seed: int) -> np.ndarray:
    """D^2-weighted seeding driven by SplitMix64.

    When every remaining weight is zero the lowest-index point not yet chosen
    is taken (point 0 once all are used); no random draw is consumed then.
    """
    X = as_points(points)
    if k < 1:
        raise KMeansInputError(f"k must be >= 1, got {k}")
    n = len(X)
    cols = np.ascontiguousarray(X.T)
    rng = SplitMix64(seed)

    chosen = [rng.next_u64() % n]
    d2 = _sq_dist_to(cols, X[chosen[0]])
    for _ in range(1, k):
        cum = np.cumsum(d2)
        total = cum[-1]
        if total > 0:
            target = rng.uniform() * total
            idx = int(np.searchsorted(cum, target, side="right"))
            positive = np.flatnonzero(d2 > 0)
            if idx >= n or d2[idx] == 0:
                # only reachable through rounding at the top of the CDF
                idx = int(positive[-1])
        else:
            taken = set(chosen)
            idx = next((i for i in range(n) if i not in taken), 0)
        chosen.append(idx)
        np.minimum(d2, _sq_dist_to(cols, X[idx]), out=d2)
    return X[chosen].copy()


def _assign(cols: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d = _distance_matrix(cols, centroids)
    labels = np.argmin(d, axis=1)  # first minimum wins ties
    return labels, d[np.arange(len(labels)), labels]


def lloyd_step(points, centroids) -> tuple[np.ndarray, np.ndarray, float]:
    """One assignment + mean update, with farthest-point repair of empty clusters.

    Returns the updated centroids, the labels in force and the inertia of those
    labels against the updated centroids.
    """
    X = as_points(points)
    C = np.asarray(centroids, dtype=np.float64)
    if C.ndim == 1:
        C = C[:, None]
    if C.ndim != 2 or len(C) == 0:
        raise KMeansInputError("centroids must be a nonempty (k, dim) array")
    if C.shape[1] != X.shape[1]:
        raise KMeansInputError(
            f"dimension mismatch: points have {X.shape[1]}, centroids have {C.shape[1]}"
        )
    k = len(C)
    cols = np.ascontiguousarray(X.T)

    labels, _ = _assign(cols, C)
    counts = np.bincount(labels, minlength=k)
    new = C.copy()
    nonempty = counts > 0
    for ch in range(X.shape[1]):
        sums = np.bincount(labels, weights=cols[ch], minlength=k)
        new[nonempty, ch] = sums[nonempty] / counts[nonempty]

    empty = np.flatnonzero(~nonempty)
    if len(empty):
        d_own = _sq_dist_to_labels(cols, new, labels)
        for j in empty:
            far = int(np.argmax(d_own))  # first maximum wins ties
            new[j] = X[far]
            d_own[far] = 0.0
        labels, d_final = _assign(cols, new)
    else:
        d_final = _sq_dist_to_labels(cols, new, labels)
    return new, labels, float(d_final.sum())


def _sq_dist_to_labels(cols, centroids, labels) -> np.ndarray:
    own = centroids[labels].T
    acc = (cols[0] - own[0]) ** 2
    for ch in range(1, cols.shape[0]):
        acc += (cols[ch] - own[ch]) ** 2
    return acc


def run_kmeans(points, cfg: KMeansConfig) -> KMeansModel:
    X = as_points(points)
    cols = np.ascontiguousarray(X.T)
    centroids = init_kmeans_pp(X, cfg.k, cfg.seed)

    history = []
    prev_labels = None
    iterations = 0
    while iterations < cfg.max_iters:
        new, labels, inertia = lloyd_step(X, centroids)
        iterations += 1
        history.append(inertia)
        shift = float(np.sqrt(((new - centroids) ** 2).sum(axis=1)).max())
        centroids = new
        if shift < cfg.tol:
            break
        if prev_labels is not None and np.array_equal(labels, prev_labels):
            break
        prev_labels = labels

    # final nearest-centroid pass so every label points at its closest centroid
    labels, d = _assign(cols, centroids)
    model = KMeansModel(centroids, labels, float(d.sum()), iterations, tuple(history))
    return canonicalize(model)


def canonicalize(model: KMeansModel) -> KMeansModel:
    """Sort centroids by (component mean, components) and relabel to match."""
    C = np.asarray(model.centroids, dtype=np.float64)
    order = sorted(range(len(C)), key=lambda j: (float(C[j].mean()), tuple(C[j].tolist())))
    remap = np.empty(len(C), dtype=np.intp)
    remap[order] = np.arange(len(C))
    return KMeansModel(
        C[order].copy(),
        remap[np.asarray(model.labels)],
        model.inertia,
        model.iterations,
        model.inertia_history,
    )


def render(dims: Dims, labels, centroids, maxval: int) -> Image:
    """Cluster map: every pixel takes its centroid's color, rounded half up."""
    labels = np.asarray(labels)
    C = np.asarray(centroids, dtype=np.float64)
    if C.ndim == 1:
        C = C[:, None]
    if labels.size != dims.area:
        raise ValueError(f"{labels.size} labels for a {dims} image")
    palette = np.clip(np.floor(C + 0.5), 0, maxval)
    pixels = palette[labels.reshape(dims.height, dims.width)]
    return Image(dims.width, dims.height, C.shape[1], maxval, pixels)
