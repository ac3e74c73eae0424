from typing import Tuple, Union

import numpy as np

from src.static_values import KMEANS_MAX_ITERATIONS


def _squared_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    sq_p = np.einsum("ij,ij->i", points, points)
    sq_c = np.einsum("ij,ij->i", centroids, centroids)
    d2 = sq_p[:, None] - 2.0 * (points @ centroids.T) + sq_c[None, :]
    return np.maximum(d2, 0.0)


def _plus_plus_seeds(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centroids = np.empty((k, points.shape[1]))
    centroids[0] = points[int(rng.integers(n))]
    closest = _squared_distances(points, centroids[:1])[:, 0]
    for c in range(1, k):
        total = float(closest.sum())
        if total <= 0.0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=closest / total))
        centroids[c] = points[idx]
        closest = np.minimum(closest, _squared_distances(points, centroids[c : c + 1])[:, 0])
    return centroids


def normalize_rows(points: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(points, axis=1, keepdims=True)
    return points / np.where(norms > 0.0, norms, 1.0)


def kmeans(
    points: np.ndarray,
    k: int,
    seed: Union[int, np.random.Generator],
    normalize: bool = False,
    max_iterations: int = KMEANS_MAX_ITERATIONS,
) -> Tuple[np.ndarray, np.ndarray]:
    """k-means++ seeding followed by Lloyd's iterations.

    ``normalize`` L2-normalizes the points first (spherical k-means, used for
    cosine descriptors). With fewer points than ``k`` every point is its own
    cluster and the remaining centroids are NaN.

    Returns ``(assignments, centroids)``.
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] == 0:
        raise ValueError("kmeans needs a non-empty 2-D point array")
    if normalize:
        points = normalize_rows(points)
    n = points.shape[0]

    if n <= k:
        centroids = np.full((k, points.shape[1]), np.nan)
        centroids[:n] = points
        return np.arange(n), centroids

    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    centroids = _plus_plus_seeds(points, k, rng)
    assignments = np.full(n, -1)
    for _ in range(max_iterations):
        d2 = _squared_distances(points, centroids)
        updated = np.argmin(d2, axis=1)
        if np.array_equal(updated, assignments):
            break
        assignments = updated
        own = d2[np.arange(n), assignments]
        for c in range(k):
            members = points[assignments == c]
            if members.shape[0]:
                centroids[c] = members.mean(axis=0)
                continue
            # empty cluster: reseed with the point farthest from its centroid
            far = int(np.argmax(own))
            if own[far] > 0.0:
                centroids[c] = points[far]
                own[far] = 0.0
    return assignments, centroids
