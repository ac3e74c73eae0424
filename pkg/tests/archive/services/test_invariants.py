import numpy as np

from src.archive.schema import BehaviorVector, Cell, DistanceKind, Elite
from src.archive.services.growing import GrowingArchive
from src.archive.services.invariants import archive_violations


def elite(sid: int, fitness: float, *values: float) -> Elite:
    return Elite(sid, fitness, BehaviorVector(np.array(values, dtype=np.float64)))


def anchored(sid: int, *values: float) -> Cell:
    e = elite(sid, 0.0, *values)
    return Cell(e.behavior, e, e)


def test_clean_archive():
    archive = GrowingArchive.from_cells([anchored(0, 0, 0), anchored(1, 5, 0)], 2, DistanceKind.EUCLIDEAN)
    assert archive_violations(archive) == []


def test_reports_hole():
    cells = [anchored(0, 0, 0), anchored(1, 5, 0)]
    cells[0].elite = elite(2, 1.0, 4, 0)
    problems = archive_violations(GrowingArchive.from_cells(cells, 2, DistanceKind.EUCLIDEAN))
    assert len(problems) == 1
    assert "hole" in problems[0]


def test_reports_overflow_and_unanchored_backup():
    cells = [anchored(0, 0, 0), anchored(1, 5, 0), anchored(2, 0, 5)]
    cells[1].backup_elite = elite(3, 0.0, 5, 1)
    problems = archive_violations(GrowingArchive.from_cells(cells, 2, DistanceKind.EUCLIDEAN), "task 4")
    assert any("exceed capacity" in p for p in problems)
    assert any("not anchored" in p for p in problems)
    assert all(p.startswith("task 4") for p in problems)


def test_reports_elite_worse_than_backup():
    cells = [anchored(0, 0, 0)]
    cells[0].backup_elite = Elite(0, 2.0, cells[0].centroid)
    cells[0].elite = elite(1, 1.0, 0.1, 0)
    problems = archive_violations(GrowingArchive.from_cells(cells, 1, DistanceKind.EUCLIDEAN))
    assert problems == ["archive: cell 0 elite is worse than its backup"]
