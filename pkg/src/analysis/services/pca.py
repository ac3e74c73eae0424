"""Two-component PCA by power iteration with deflation."""

from typing import Optional, Sequence, Union

import numpy as np

from src.analysis.schema import PcaProjection
from src.archive.schema import BehaviorVector
from src.static_values import PCA_MAX_ITERATIONS, PCA_TOLERANCE
from src.utils.errors import BehaviorError


def _as_matrix(behaviors: Union[np.ndarray, Sequence[BehaviorVector]]) -> np.ndarray:
    if isinstance(behaviors, np.ndarray):
        points = behaviors.astype(np.float64)
    else:
        dims = {len(b) for b in behaviors}
        if len(dims) > 1:
            raise BehaviorError(f"behaviors of mixed dimension {sorted(dims)}")
        points = np.stack([b.values for b in behaviors]) if behaviors else np.zeros((0, 0))
    if points.ndim != 2 or points.shape[0] < 3:
        raise BehaviorError(f"pca needs at least 3 behaviors, got {points.shape[0] if points.ndim else 0}")
    return points


def _orthonormal_to(basis: np.ndarray, start: np.ndarray) -> np.ndarray:
    v = start - basis.T @ (basis @ start) if basis.size else start.copy()
    norm = np.linalg.norm(v)
    if norm < 1e-12:
        # start lay in the span; fall back to the first axis outside it
        for axis in np.eye(start.shape[0]):
            v = axis - basis.T @ (basis @ axis) if basis.size else axis.copy()
            norm = np.linalg.norm(v)
            if norm > 1e-6:
                break
    return v / norm


def _power_iteration(cov: np.ndarray, start: np.ndarray, found: np.ndarray) -> np.ndarray:
    v = _orthonormal_to(found, start)
    for _ in range(PCA_MAX_ITERATIONS):
        w = cov @ v
        if found.size:
            w -= found.T @ (found @ w)
        norm = np.linalg.norm(w)
        if norm < 1e-300:
            return v
        w /= norm
        # sign is arbitrary; compare up to it
        if min(np.linalg.norm(w - v), np.linalg.norm(w + v)) < PCA_TOLERANCE:
            return w
        v = w
    return v


def pca2(
    behaviors: Union[np.ndarray, Sequence[BehaviorVector]], rng: Optional[np.random.Generator] = None
) -> PcaProjection:
    points = _as_matrix(behaviors)
    rng = rng if rng is not None else np.random.default_rng(0)
    mean = points.mean(axis=0)
    centered = points - mean
    cov = centered.T @ centered / points.shape[0]
    total = float(np.trace(cov))
    dim = points.shape[1]

    if total <= 0.0:
        components = np.zeros((2, dim))
        components[0, 0] = 1.0
        if dim > 1:
            components[1, 1] = 1.0
        return PcaProjection(mean, components, centered @ components.T, np.zeros(2), degenerate=True)

    found = np.zeros((0, dim))
    for _ in range(min(2, dim)):
        component = _power_iteration(cov, rng.standard_normal(dim), found)
        # orthonormal to machine precision
        component = _orthonormal_to(found, component)
        found = np.vstack([found, component])
    if dim == 1:
        found = np.vstack([found, np.zeros((1, 1))])

    variances = np.array([float(c @ cov @ c) for c in found])
    explained = np.clip(variances / total, 0.0, 1.0)
    if explained[1] > explained[0]:
        found, explained = found[::-1].copy(), explained[::-1].copy()
    return PcaProjection(mean, found, centered @ found.T, explained)
