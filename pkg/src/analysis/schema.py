from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.archive.schema import DistanceKind
from src.domains.schema import Side


@dataclass
class TournamentMatrix:
    """Every row solution against every column solution, once.

    ``fitness_rows[i, j]`` is row i's fitness in that duel, ``fitness_cols``
    the column solution's. Behaviors are (rows, cols, D) when kept.
    """

    row_side: Side
    row_ids: List[int]
    col_ids: List[int]
    fitness_rows: np.ndarray
    fitness_cols: np.ndarray
    keys: np.ndarray
    behaviors_rows: Optional[np.ndarray] = None
    behaviors_cols: Optional[np.ndarray] = None
    distance_kind: DistanceKind = DistanceKind.COSINE

    @property
    def col_side(self) -> Side:
        return self.row_side.opposite

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.row_ids), len(self.col_ids)


@dataclass
class EloTable:
    ratings: Dict[int, float] = field(default_factory=dict)
    matches: Dict[int, int] = field(default_factory=dict)

    def ranking(self) -> List[int]:
        """Ids from best to worst rating, ties by id."""
        return sorted(self.ratings, key=lambda sid: (-self.ratings[sid], sid))


@dataclass
class PcaProjection:
    mean: np.ndarray
    # (2, D), rows orthonormal
    components: np.ndarray
    coordinates: np.ndarray
    explained_variance: np.ndarray
    # no variance to explain: components are an arbitrary orthonormal pair
    degenerate: bool = False

    def project(self, points: np.ndarray) -> np.ndarray:
        return (np.asarray(points, dtype=np.float64) - self.mean) @ self.components.T
