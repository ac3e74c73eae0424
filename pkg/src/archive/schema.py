from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Protocol, Sequence, Union

import numpy as np

from src.utils.errors import BehaviorError


class DistanceKind(str, Enum):
    COSINE = "cosine"
    EUCLIDEAN = "euclidean"


@dataclass(frozen=True, eq=False)
class BehaviorVector:
    """Fixed-length finite vector describing what one evaluation did.

    Stored read-only as float64; cosine vectors must be non-zero.
    """

    values: np.ndarray
    distance_kind: DistanceKind = DistanceKind.EUCLIDEAN

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise BehaviorError(f"behavior must be a non-empty 1-D vector, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise BehaviorError("behavior has non-finite entries")
        if self.distance_kind is DistanceKind.COSINE and not np.any(arr):
            raise BehaviorError("zero behavior vector has no cosine distance")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "distance_kind", DistanceKind(self.distance_kind))

    def __len__(self) -> int:
        return int(self.values.shape[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BehaviorVector):
            return NotImplemented
        return self.distance_kind == other.distance_kind and np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash((self.distance_kind, self.values.tobytes()))

    def __repr__(self) -> str:
        return f"BehaviorVector({self.values.tolist()!r}, {self.distance_kind.value})"


@dataclass(frozen=True)
class Elite:
    solution_id: int
    fitness: float
    behavior: BehaviorVector
    # solution size, only consulted under lexicographic fitness
    size: int = 0


@dataclass
class Cell:
    centroid: BehaviorVector
    elite: Elite
    # the solution whose behavior created the centroid
    backup_elite: Elite


@dataclass
class CvtCell:
    centroid: BehaviorVector
    elite: Optional[Elite] = None


class UpdateKind(str, Enum):
    ADDED_NEW_CELL = "added_new_cell"
    GREW_REPLACED_CELL = "grew_replaced_cell"
    REPLACED_ELITE = "replaced_elite"
    REJECTED = "rejected"


@dataclass(frozen=True)
class UpdateResult:
    kind: UpdateKind
    # added cell, replaced slot, or cell whose elite changed
    cell: Optional[int] = None


class TaskArchive(Protocol):
    """What MTMB-ME needs from one task's archive (growing or fixed CVT)."""

    n_cell: int
    distance_kind: DistanceKind
    cells: Sequence[Union[Cell, CvtCell]]

    def update(self, solution_id: int, fitness: float, behavior: BehaviorVector, size: int = 0) -> UpdateResult: ...

    def find_cell(self, behavior: BehaviorVector) -> int: ...

    def elites(self) -> List[Elite]: ...


@dataclass
class ArchiveStats:
    additions: int = 0
    growths: int = 0
    replacements: int = 0
    rejections: int = 0

    def record(self, kind: UpdateKind) -> None:
        if kind is UpdateKind.ADDED_NEW_CELL:
            self.additions += 1
        elif kind is UpdateKind.GREW_REPLACED_CELL:
            self.growths += 1
        elif kind is UpdateKind.REPLACED_ELITE:
            self.replacements += 1
        else:
            self.rejections += 1
