import numpy as np

from src.archive.schema import BehaviorVector, DistanceKind
from src.utils.errors import ArchiveError


def raw_distance(x: np.ndarray, y: np.ndarray, kind: DistanceKind) -> float:
    """Distance between two validated float64 vectors of equal length.

    Symmetric bit-for-bit: dist(x, y) == dist(y, x).
    """
    if np.array_equal(x, y):
        return 0.0
    if kind is DistanceKind.COSINE:
        similarity = float(np.dot(x, y)) / (float(np.linalg.norm(x)) * float(np.linalg.norm(y)))
        return min(2.0, max(0.0, 1.0 - similarity))
    return float(np.linalg.norm(x - y))


def distance(a: BehaviorVector, b: BehaviorVector) -> float:
    if len(a) != len(b):
        raise ArchiveError(f"behavior length mismatch: {len(a)} != {len(b)}")
    if a.distance_kind is not b.distance_kind:
        raise ArchiveError(f"distance kind mismatch: {a.distance_kind.value} != {b.distance_kind.value}")
    return raw_distance(a.values, b.values, a.distance_kind)
