from typing import List, Union

import numpy as np

from src.archive.schema import DistanceKind
from src.archive.services.cvt import FixedCvtArchive
from src.archive.services.distance import raw_distance
from src.archive.services.growing import GrowingArchive


def _nearest(values: np.ndarray, centroids: List[np.ndarray], kind: DistanceKind) -> int:
    best, best_d = 0, float("inf")
    for i, c in enumerate(centroids):
        d = raw_distance(values, c, kind)
        if d < best_d:
            best, best_d = i, d
    return best


def archive_violations(archive: Union[GrowingArchive, FixedCvtArchive], where: str = "archive") -> List[str]:
    """Human-readable list of broken archive invariants; empty when clean.

    Does not touch the archive's distance counter.
    """
    problems: List[str] = []
    if len(archive.cells) > archive.n_cell:
        problems.append(f"{where}: {len(archive.cells)} cells exceed capacity {archive.n_cell}")
    if not archive.cells:
        return problems

    dims = {len(cell.centroid) for cell in archive.cells}
    if len(dims) > 1:
        problems.append(f"{where}: mixed behavior dimensions {sorted(dims)}")
        return problems
    kinds = {cell.centroid.distance_kind for cell in archive.cells}
    if len(kinds) > 1:
        problems.append(f"{where}: mixed distance kinds")
        return problems

    centroids = [cell.centroid.values for cell in archive.cells]
    for i, cell in enumerate(archive.cells):
        if cell.elite is None:
            continue
        if len(cell.elite.behavior) != len(cell.centroid):
            problems.append(f"{where}: cell {i} elite has the wrong dimension")
            continue
        home = _nearest(cell.elite.behavior.values, centroids, archive.distance_kind)
        if home != i:
            problems.append(f"{where}: cell {i} elite {cell.elite.solution_id} maps to cell {home} (hole)")
        backup = getattr(cell, "backup_elite", None)
        if backup is None:
            continue
        if backup.behavior != cell.centroid:
            problems.append(f"{where}: cell {i} backup elite is not anchored on its centroid")
        if cell.elite != backup and cell.elite.fitness < backup.fitness:
            problems.append(f"{where}: cell {i} elite is worse than its backup")
    return problems
