"""Per-generation snapshots (GSNP): archives, task sets, tournament,
bootstrap set, referenced solutions and the lineage issued that generation.

Loading validates the archives, so a snapshot that decodes never breaks the
archive invariants. Writes go through a temporary file and a rename.
"""

import os
from pathlib import Path
from typing import Dict, List, Union

import numpy as np

from src.analysis.schema import TournamentMatrix
from src.archive.schema import Cell, CvtCell, DistanceKind
from src.archive.services.cvt import FixedCvtArchive
from src.archive.services.growing import GrowingArchive
from src.archive.services.invariants import archive_violations
from src.domains.schema import Domain, Side
from src.evolve.schema import (
    Archive,
    BootstrapRecord,
    BootstrapSet,
    GenerationRecord,
    LineageRecord,
    Operator,
    Solution,
    TaskSet,
)
from src.evolve.services.fitness import FitnessMode
from src.static_values import SNAPSHOT_MAGIC, SNAPSHOT_VERSION
from src.storage.services.codec import Reader, Writer
from src.utils.errors import DomainError, SnapshotError
from src.utils.logger import logger

log = logger(__name__)

_SIDES = (Side.RED, Side.BLUE)
_KINDS = (DistanceKind.COSINE, DistanceKind.EUCLIDEAN)
_MODES = (FitnessMode.SINGLE_OBJECTIVE, FitnessMode.LEXICOGRAPHIC)
_OPERATORS = (Operator.RANDOM, Operator.MUTATION, Operator.CROSSOVER)
_GROWING, _CVT = 0, 1


def snapshot_path(run_dir: Union[str, Path], generation: int) -> Path:
    return Path(run_dir) / f"gen_{generation:04d}.gsnp"


def list_snapshots(run_dir: Union[str, Path]) -> List[Path]:
    return sorted(Path(run_dir).glob("gen_*.gsnp"))


# --- encoding ---


def _write_archive(w: Writer, archive: Archive) -> None:
    w.u8(_GROWING if isinstance(archive, GrowingArchive) else _CVT)
    w.u32(archive.n_cell)
    w.u8(_KINDS.index(archive.distance_kind))
    w.u8(_MODES.index(archive.fitness_mode))
    w.u32(len(archive.cells))
    for cell in archive.cells:
        w.behavior(cell.centroid)
        if isinstance(cell, Cell):
            w.elite(cell.elite)
            w.elite(cell.backup_elite)
        else:
            w.optional_elite(cell.elite)


def _write_tasks(w: Writer, tasks: TaskSet) -> None:
    w.u8(_SIDES.index(tasks.side))
    w.ids([s.solution_id for s in tasks.solutions])


def _write_tournament(w: Writer, matrix: TournamentMatrix) -> None:
    w.u8(_SIDES.index(matrix.row_side))
    w.u8(_KINDS.index(matrix.distance_kind))
    w.ids(matrix.row_ids)
    w.ids(matrix.col_ids)
    w.array(matrix.fitness_rows)
    w.array(matrix.fitness_cols)
    w.array(matrix.keys, "<u8")
    has_behaviors = matrix.behaviors_rows is not None and matrix.behaviors_cols is not None
    w.flag(has_behaviors)
    if has_behaviors:
        w.array(matrix.behaviors_rows)
        w.array(matrix.behaviors_cols)


def encode_snapshot(record: GenerationRecord, domain: Domain) -> bytes:
    w = Writer(SNAPSHOT_MAGIC, SNAPSHOT_VERSION)
    w.text(domain.name)
    w.u64(record.generation)
    w.u8(_SIDES.index(record.side))
    w.u64(record.evaluations)
    w.u64(record.next_id)

    w.u32(len(record.solutions))
    for sid in sorted(record.solutions):
        solution = record.solutions[sid]
        w.u64(sid)
        w.ids(list(solution.parents))
        w.text(domain.encode(solution.genome))

    _write_tasks(w, record.tasks)
    _write_tasks(w, record.new_tasks)
    w.u32(len(record.archives))
    for archive in record.archives:
        _write_archive(w, archive)
    _write_tournament(w, record.tournament)

    w.u32(len(record.bootstrap.records))
    for b in record.bootstrap.records:
        w.u32(b.task_index)
        w.u64(b.solution.solution_id)
        w.f64(b.fitness)
        w.i64(b.size)
        w.behavior(b.behavior)

    lineage = sorted(record.lineage, key=lambda r: r.solution_id)
    w.u32(len(lineage))
    for r in lineage:
        w.u64(r.solution_id)
        w.ids(list(r.parent_ids))
        w.u64(r.generation)
        w.u8(_OPERATORS.index(r.operator))
        w.text(r.payload)
    return w.finish()


# --- decoding ---


def _pick(options: tuple, index: int, what: str):
    if index >= len(options):
        raise SnapshotError(f"snapshot: unknown {what} code {index}")
    return options[index]


def _read_archive(r: Reader) -> Archive:
    archive_type = r.u8()
    n_cell = r.u32()
    kind = _pick(_KINDS, r.u8(), "distance kind")
    mode = _pick(_MODES, r.u8(), "fitness mode")
    count = r.u32()
    if archive_type == _GROWING:
        cells = []
        for _ in range(count):
            centroid = r.behavior()
            cells.append(Cell(centroid, r.elite(), r.elite()))
        return GrowingArchive.from_cells(cells, n_cell, kind, mode)
    if archive_type == _CVT:
        cvt_cells = []
        for _ in range(count):
            centroid = r.behavior()
            cvt_cells.append(CvtCell(centroid, r.optional_elite()))
        if not cvt_cells:
            raise SnapshotError("snapshot: CVT archive without centroids")
        archive = FixedCvtArchive([c.centroid for c in cvt_cells], mode)
        archive.cells = cvt_cells
        return archive
    raise SnapshotError(f"snapshot: unknown archive type {archive_type}")


def _read_tasks(r: Reader, solutions: Dict[int, Solution]) -> TaskSet:
    side = _pick(_SIDES, r.u8(), "side")
    return TaskSet(side, [_solution(solutions, sid) for sid in r.ids()])


def _solution(solutions: Dict[int, Solution], sid: int) -> Solution:
    if sid not in solutions:
        raise SnapshotError(f"snapshot references unknown solution {sid}")
    return solutions[sid]


def _read_tournament(r: Reader) -> TournamentMatrix:
    row_side = _pick(_SIDES, r.u8(), "side")
    kind = _pick(_KINDS, r.u8(), "distance kind")
    row_ids, col_ids = r.ids(), r.ids()
    matrix = TournamentMatrix(
        row_side=row_side,
        row_ids=row_ids,
        col_ids=col_ids,
        fitness_rows=r.array(),
        fitness_cols=r.array(),
        keys=r.array("<u8"),
        distance_kind=kind,
    )
    if r.flag():
        matrix.behaviors_rows = r.array()
        matrix.behaviors_cols = r.array()
    shape = (len(row_ids), len(col_ids))
    for name in ("fitness_rows", "fitness_cols", "keys"):
        if getattr(matrix, name).shape != shape:
            raise SnapshotError(f"snapshot: tournament {name} has shape {getattr(matrix, name).shape}, expected {shape}")
    return matrix


def snapshot_domain_name(data: bytes) -> str:
    """Domain recorded in a snapshot; verifies the checksum on the way."""
    return Reader(data, SNAPSHOT_MAGIC, SNAPSHOT_VERSION, "snapshot").text()


def decode_snapshot(data: bytes, domain: Domain, check: bool = True) -> GenerationRecord:
    r = Reader(data, SNAPSHOT_MAGIC, SNAPSHOT_VERSION, "snapshot")
    name = r.text()
    if name != domain.name:
        raise SnapshotError(f"snapshot belongs to domain {name!r}, not {domain.name!r}")
    generation = r.u64()
    side = _pick(_SIDES, r.u8(), "side")
    evaluations = r.u64()
    next_id = r.u64()

    solutions: Dict[int, Solution] = {}
    for _ in range(r.u32()):
        sid = r.u64()
        parents = tuple(r.ids())
        payload = r.text()
        try:
            solutions[sid] = Solution(sid, domain.decode(payload), parents)
        except DomainError as exc:
            raise SnapshotError(f"snapshot: solution {sid}: {exc}") from exc

    tasks = _read_tasks(r, solutions)
    new_tasks = _read_tasks(r, solutions)
    archives = [_read_archive(r) for _ in range(r.u32())]
    tournament = _read_tournament(r)

    bootstrap = BootstrapSet()
    for _ in range(r.u32()):
        task_index = r.u32()
        solution = _solution(solutions, r.u64())
        fitness, size = r.f64(), r.i64()
        bootstrap.records.append(BootstrapRecord(task_index, solution, fitness, r.behavior(), size))

    lineage: List[LineageRecord] = []
    for _ in range(r.u32()):
        sid = r.u64()
        parents = tuple(r.ids())
        lineage_generation = r.u64()
        operator = _pick(_OPERATORS, r.u8(), "operator")
        lineage.append(LineageRecord(sid, parents, lineage_generation, operator, r.text()))
    r.done()

    record = GenerationRecord(
        generation=generation,
        side=side,
        tasks=tasks,
        archives=archives,
        new_tasks=new_tasks,
        tournament=tournament,
        bootstrap=bootstrap,
        evaluations=evaluations,
        solutions=solutions,
        lineage=lineage,
        next_id=next_id,
    )
    if check:
        problems = snapshot_violations(record)
        if problems:
            raise SnapshotError("snapshot breaks archive invariants: " + "; ".join(problems))
    return record


def snapshot_violations(record: GenerationRecord) -> List[str]:
    problems: List[str] = []
    for t, archive in enumerate(record.archives):
        problems.extend(archive_violations(archive, f"generation {record.generation} task {t}"))
        for elite in archive.elites():
            if elite.solution_id not in record.solutions:
                problems.append(f"generation {record.generation} task {t}: elite {elite.solution_id} has no solution")
    for b in record.bootstrap.records:
        if b.task_index >= len(record.new_tasks):
            problems.append(f"generation {record.generation}: bootstrap task index {b.task_index} out of range")
    return problems


# --- files ---


def write_atomic(path: Union[str, Path], data: bytes) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def save_snapshot(run_dir: Union[str, Path], record: GenerationRecord, domain: Domain) -> Path:
    path = snapshot_path(run_dir, record.generation)
    write_atomic(path, encode_snapshot(record, domain))
    log.debug("wrote %s", path)
    return path


def load_snapshot(path: Union[str, Path], domain: Domain, check: bool = True) -> GenerationRecord:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise SnapshotError(f"cannot read snapshot {path}: {exc}") from exc
    return decode_snapshot(data, domain, check)


def snapshot_checksum(path: Union[str, Path]) -> int:
    data = Path(path).read_bytes()
    return int(np.frombuffer(data[-8:], dtype="<u8")[0])
