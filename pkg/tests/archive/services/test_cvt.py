import numpy as np
import pytest

from src.archive.schema import BehaviorVector, DistanceKind, UpdateKind
from src.archive.services.cvt import FixedCvtArchive, make_fixed_cvt, sample_uniform_behaviors
from src.archive.services.invariants import archive_violations
from src.utils.errors import ArchiveError


def vec(*values: float) -> BehaviorVector:
    return BehaviorVector(np.array(values, dtype=np.float64))


def test_cells_fill_then_compete():
    archive = FixedCvtArchive([vec(0, 0), vec(10, 0)])
    assert archive.elites() == []
    assert archive.update(0, 1.0, vec(1, 0)).kind is UpdateKind.ADDED_NEW_CELL
    assert archive.update(1, 0.5, vec(2, 0)).kind is UpdateKind.REJECTED
    result = archive.update(2, 3.0, vec(9, 1))
    assert (result.kind, result.cell) == (UpdateKind.ADDED_NEW_CELL, 1)
    assert archive.update(3, 3.0, vec(10, 0)).kind is UpdateKind.REJECTED
    assert [e.solution_id for e in archive.elites()] == [0, 2]
    assert archive_violations(archive) == []


def test_centroids_never_move():
    archive = FixedCvtArchive([vec(0, 0), vec(10, 0)])
    for sid in range(20):
        archive.update(sid, float(sid), vec(100.0 + sid, -50.0))
    assert [c.centroid.values.tolist() for c in archive.cells] == [[0.0, 0.0], [10.0, 0.0]]
    assert archive.cells[1].elite.solution_id == 19


def test_make_fixed_cvt_is_seeded():
    rng = np.random.default_rng(3)
    samples = sample_uniform_behaviors(np.zeros(2), np.ones(2), 200, DistanceKind.EUCLIDEAN, rng)
    a = make_fixed_cvt(samples, 6, 11)
    b = make_fixed_cvt(samples, 6, 11)
    assert len(a) == 6
    assert all(np.array_equal(x.centroid.values, y.centroid.values) for x, y in zip(a.cells, b.cells))
    for cell in a.cells:
        assert np.all((cell.centroid.values >= 0.0) & (cell.centroid.values <= 1.0))


def test_uniform_samples_stay_in_the_box():
    rng = np.random.default_rng(0)
    low, high = np.array([-1.0, 2.0]), np.array([1.0, 3.0])
    for b in sample_uniform_behaviors(low, high, 50, DistanceKind.COSINE, rng):
        assert np.all((b.values >= low) & (b.values <= high))
        assert b.distance_kind is DistanceKind.COSINE


def test_too_few_samples():
    samples = [vec(0, 0), vec(1, 1)]
    with pytest.raises(ArchiveError):
        make_fixed_cvt(samples, 3, 0)
    with pytest.raises(ArchiveError):
        FixedCvtArchive([])


def test_wrong_dimension_is_rejected():
    archive = FixedCvtArchive([vec(0, 0)])
    with pytest.raises(ArchiveError):
        archive.update(0, 0.0, vec(0, 0, 0))
