import math
from typing import List, Sequence, Union

import numpy as np

from src.archive.schema import ArchiveStats, BehaviorVector, CvtCell, DistanceKind, Elite, UpdateKind, UpdateResult
from src.archive.services.distance import raw_distance
from src.evolve.services.fitness import FitnessMode, FitnessValue, compare_fitness
from src.evolve.services.kmeans import kmeans
from src.utils.errors import ArchiveError


class FixedCvtArchive:
    """Classic CVT MAP-Elites archive: centroids frozen at construction."""

    def __init__(
        self,
        centroids: Sequence[BehaviorVector],
        fitness_mode: FitnessMode = FitnessMode.SINGLE_OBJECTIVE,
    ):
        if not centroids:
            raise ArchiveError("a CVT archive needs at least one centroid")
        self.distance_kind = centroids[0].distance_kind
        self.dimension = len(centroids[0])
        self.fitness_mode = fitness_mode
        self.cells: List[CvtCell] = [CvtCell(c) for c in centroids]
        self.n_cell = len(self.cells)
        self.distance_calls = 0
        self.stats = ArchiveStats()

    def __len__(self) -> int:
        return len(self.cells)

    def elites(self) -> List[Elite]:
        return [cell.elite for cell in self.cells if cell.elite is not None]

    def find_cell(self, behavior: BehaviorVector) -> int:
        if behavior.distance_kind is not self.distance_kind or len(behavior) != self.dimension:
            raise ArchiveError(f"behavior {behavior!r} does not fit this archive")
        best, best_d = 0, math.inf
        for i, cell in enumerate(self.cells):
            self.distance_calls += 1
            d = raw_distance(behavior.values, cell.centroid.values, self.distance_kind)
            if d < best_d:
                best, best_d = i, d
        return best

    def update(self, solution_id: int, fitness: float, behavior: BehaviorVector, size: int = 0) -> UpdateResult:
        if not math.isfinite(fitness):
            raise ArchiveError(f"non-finite fitness {fitness!r}")
        c = self.find_cell(behavior)
        cell = self.cells[c]
        candidate = Elite(solution_id, float(fitness), behavior, size)
        if cell.elite is None:
            cell.elite = candidate
            result = UpdateResult(UpdateKind.ADDED_NEW_CELL, c)
        elif (
            compare_fitness(
                FitnessValue(candidate.fitness, size),
                FitnessValue(cell.elite.fitness, cell.elite.size),
                self.fitness_mode,
            )
            > 0
        ):
            cell.elite = candidate
            result = UpdateResult(UpdateKind.REPLACED_ELITE, c)
        else:
            result = UpdateResult(UpdateKind.REJECTED)
        self.stats.record(result.kind)
        return result


def make_fixed_cvt(
    samples: Sequence[BehaviorVector],
    n_cell: int,
    seed: Union[int, np.random.Generator],
    fitness_mode: FitnessMode = FitnessMode.SINGLE_OBJECTIVE,
) -> FixedCvtArchive:
    if n_cell < 1:
        raise ArchiveError(f"n_cell must be positive, got {n_cell}")
    if len(samples) < n_cell:
        raise ArchiveError(f"need at least {n_cell} samples to build the CVT, got {len(samples)}")
    kind = samples[0].distance_kind
    points = np.stack([s.values for s in samples])
    _, centers = kmeans(points, n_cell, seed, normalize=kind is DistanceKind.COSINE)
    centroids = []
    for i, center in enumerate(centers):
        # a spherical mean can cancel out; fall back to a sample
        if kind is DistanceKind.COSINE and not np.any(center):
            center = points[i]
        centroids.append(BehaviorVector(center, kind))
    return FixedCvtArchive(centroids, fitness_mode)


def sample_uniform_behaviors(
    low: np.ndarray, high: np.ndarray, count: int, kind: DistanceKind, rng: np.random.Generator
) -> List[BehaviorVector]:
    """Uniform draws from the box [low, high], used to lay out the CVT."""
    samples = []
    while len(samples) < count:
        values = rng.uniform(low, high)
        if kind is DistanceKind.COSINE and not np.any(values):
            continue
        samples.append(BehaviorVector(values, kind))
    return samples
