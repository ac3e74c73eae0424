import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.archive.schema import ArchiveStats, BehaviorVector, Cell, DistanceKind, Elite, UpdateKind, UpdateResult
from src.archive.services.distance import raw_distance
from src.evolve.services.fitness import FitnessMode, FitnessValue, compare_fitness
from src.utils.errors import ArchiveError


class GrowingArchive:
    """Unstructured archive of at most ``n_cell`` cells whose centroids relocate
    when a behavior farther than the closest centroid pair arrives.

    Each cell keeps a backup elite (the solution that created its centroid);
    hole repair reinstates it when a relocated centroid steals the cell's elite.

    With ``cached=True`` the pairwise centroid distances are kept between
    updates; the uncached path recomputes them on every full-archive update and
    produces bit-identical states.

    Single writer. ``find_cell`` is pure apart from the distance counter.
    """

    def __init__(
        self,
        n_cell: int,
        distance_kind: DistanceKind,
        fitness_mode: FitnessMode = FitnessMode.SINGLE_OBJECTIVE,
        cached: bool = True,
        dimension: Optional[int] = None,
    ):
        if n_cell < 1:
            raise ArchiveError(f"n_cell must be positive, got {n_cell}")
        self.n_cell = n_cell
        self.distance_kind = DistanceKind(distance_kind)
        self.fitness_mode = fitness_mode
        self.cached = cached
        self.dimension = dimension
        self.cells: List[Cell] = []
        self.distance_calls = 0
        self.stats = ArchiveStats()
        self._pairwise: Optional[np.ndarray] = np.zeros((0, 0)) if cached else None

    @classmethod
    def from_cells(
        cls,
        cells: Sequence[Cell],
        n_cell: int,
        distance_kind: DistanceKind,
        fitness_mode: FitnessMode = FitnessMode.SINGLE_OBJECTIVE,
        cached: bool = True,
    ) -> "GrowingArchive":
        """Rebuild an archive from stored cells. No invariant checks here."""
        archive = cls(n_cell, distance_kind, fitness_mode, cached)
        archive.cells = list(cells)
        archive.dimension = len(cells[0].centroid) if cells else None
        archive._pairwise = None
        return archive

    def __len__(self) -> int:
        return len(self.cells)

    def elites(self) -> List[Elite]:
        return [cell.elite for cell in self.cells]

    def centroids(self) -> np.ndarray:
        return np.stack([cell.centroid.values for cell in self.cells])

    def find_cell(self, behavior: BehaviorVector) -> int:
        if not self.cells:
            raise ArchiveError("find_cell on an empty archive")
        self._check_behavior(behavior)
        return self._nearest(behavior.values)[0]

    def min_centroid_distance(self) -> float:
        if len(self.cells) < 2:
            return math.inf
        return self._closest_pair(self._pairwise_distances())[2]

    def update(self, solution_id: int, fitness: float, behavior: BehaviorVector, size: int = 0) -> UpdateResult:
        self._check_behavior(behavior)
        if not math.isfinite(fitness):
            raise ArchiveError(f"non-finite fitness {fitness!r}")
        candidate = Elite(solution_id, float(fitness), behavior, size)

        if not self.cells:
            result = self._append(candidate, [])
        else:
            c_id, d, dists = self._nearest(behavior.values)
            n = len(self.cells)
            full = n >= self.n_cell and n >= 2
            # at most one pairwise pass per update: n_cell² + 2·n_cell distance calls in total
            pairwise = self._pairwise_distances() if full else np.zeros((0, 0))
            j, k, d_min = self._closest_pair(pairwise) if full else (0, 0, math.inf)
            if n < self.n_cell and d > 0.0:
                # exact duplicates of a centroid fall through to the fitness rule
                result = self._append(candidate, dists)
            elif full and d > d_min:
                result = self._grow(candidate, dists, pairwise, j, k)
            elif self._better(candidate, self.cells[c_id].elite):
                self.cells[c_id].elite = candidate
                result = UpdateResult(UpdateKind.REPLACED_ELITE, c_id)
            else:
                result = UpdateResult(UpdateKind.REJECTED)
        self.stats.record(result.kind)
        return result

    def _better(self, candidate: Elite, incumbent: Elite) -> bool:
        # strict: the incumbent keeps ties
        return (
            compare_fitness(
                FitnessValue(candidate.fitness, candidate.size),
                FitnessValue(incumbent.fitness, incumbent.size),
                self.fitness_mode,
            )
            > 0
        )

    def _append(self, candidate: Elite, dists: List[float]) -> UpdateResult:
        index = len(self.cells)
        self.cells.append(Cell(candidate.behavior, candidate, candidate))
        if self.cached and self._pairwise is not None:
            grown = np.zeros((index + 1, index + 1))
            grown[:index, :index] = self._pairwise
            grown[index, :index] = dists
            grown[:index, index] = dists
            self._pairwise = grown
        self._repair_holes(index)
        return UpdateResult(UpdateKind.ADDED_NEW_CELL, index)

    def _grow(self, candidate: Elite, dists: List[float], pairwise: np.ndarray, j: int, k: int) -> UpdateResult:
        d_j = float(np.min(np.delete(pairwise[j], j)))
        d_k = float(np.min(np.delete(pairwise[k], k)))
        # remove the member of the pair closest to the others; on a tie slot k is overwritten
        slot = j if d_j < d_k else k
        self.cells[slot] = Cell(candidate.behavior, candidate, candidate)
        if self.cached and self._pairwise is not None:
            row = np.array(dists, dtype=np.float64)
            row[slot] = 0.0
            self._pairwise[slot, :] = row
            self._pairwise[:, slot] = row
        self._repair_holes(slot)
        return UpdateResult(UpdateKind.GREW_REPLACED_CELL, slot)

    def _repair_holes(self, new_index: int) -> int:
        # only the centroid at new_index moved, so an elite can only have been
        # captured by it; backups sit on their own centroid and cannot be
        repaired = 0
        x = self.cells[new_index].centroid.values
        for i, cell in enumerate(self.cells):
            if i == new_index or cell.elite == cell.backup_elite:
                continue
            e = cell.elite.behavior.values
            d_new = self._dist(e, x)
            d_own = self._dist(e, cell.centroid.values)
            if d_new < d_own or (d_new == d_own and new_index < i):
                cell.elite = cell.backup_elite
                repaired += 1
        return repaired

    def _closest_pair(self, pairwise: np.ndarray) -> Tuple[int, int, float]:
        rows, cols = np.triu_indices(len(self.cells), 1)
        # argmin returns the first minimum: lowest (i, j) lexicographically
        p = int(np.argmin(pairwise[rows, cols]))
        return int(rows[p]), int(cols[p]), float(pairwise[rows[p], cols[p]])

    def _pairwise_distances(self) -> np.ndarray:
        n = len(self.cells)
        if self.cached and self._pairwise is not None and self._pairwise.shape[0] == n:
            return self._pairwise
        matrix = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                matrix[i, j] = matrix[j, i] = self._dist(self.cells[i].centroid.values, self.cells[j].centroid.values)
        if self.cached:
            self._pairwise = matrix
        return matrix

    def _nearest(self, x: np.ndarray) -> Tuple[int, float, List[float]]:
        dists = [self._dist(x, cell.centroid.values) for cell in self.cells]
        best = 0
        for i in range(1, len(dists)):
            if dists[i] < dists[best]:
                best = i
        return best, dists[best], dists

    def _dist(self, x: np.ndarray, y: np.ndarray) -> float:
        self.distance_calls += 1
        return raw_distance(x, y, self.distance_kind)

    def _check_behavior(self, behavior: BehaviorVector) -> None:
        if behavior.distance_kind is not self.distance_kind:
            raise ArchiveError(
                f"behavior uses {behavior.distance_kind.value} distance, archive uses {self.distance_kind.value}"
            )
        if self.dimension is None:
            self.dimension = len(behavior)
        elif len(behavior) != self.dimension:
            raise ArchiveError(f"behavior length {len(behavior)} does not match archive dimension {self.dimension}")
