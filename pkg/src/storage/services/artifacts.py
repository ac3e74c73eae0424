"""Replay traces (GTRC), standalone tournament files (GTRN) and the CSV
dumps that sit next to them."""

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from src.analysis.schema import EloTable, PcaProjection, TournamentMatrix
from src.archive.schema import DistanceKind
from src.behavior.schema import Frame
from src.domains.schema import DuelOutcome, Side
from src.static_values import TOURNAMENT_MAGIC, TOURNAMENT_VERSION, TRACE_MAGIC, TRACE_VERSION
from src.storage.services.codec import Reader, Writer
from src.storage.services.snapshot import write_atomic
from src.utils.errors import SnapshotError

_SIDES = (Side.RED, Side.BLUE)
_KINDS = (DistanceKind.COSINE, DistanceKind.EUCLIDEAN)


def fmt(value: float) -> str:
    """17 significant digits, so every float64 survives a round trip."""
    return f"{float(value):.17g}"


# --- traces ---


@dataclass
class DuelTrace:
    domain: str
    red: str
    blue: str
    outcome: DuelOutcome


def encode_trace(trace: DuelTrace) -> bytes:
    o = trace.outcome
    w = Writer(TRACE_MAGIC, TRACE_VERSION)
    w.text(trace.domain)
    w.text(trace.red)
    w.text(trace.blue)
    w.f64(o.fitness_red)
    w.f64(o.fitness_blue)
    w.u64(o.completion_time)
    w.u64(o.max_steps)
    w.u8(2 if o.winner is None else _SIDES.index(o.winner))
    w.u64(o.key)
    w.ids(list(o.arena_size))
    w.array(np.stack([f.pixels for f in o.frames]))
    for side in _SIDES:
        w.array(o.positions[side])
        steps = o.actions.get(side, [])
        w.u32(len(steps))
        for step in steps:
            w.u32(len(step))
            for action in step:
                w.text(action)
    return w.finish()


def decode_trace(data: bytes) -> DuelTrace:
    r = Reader(data, TRACE_MAGIC, TRACE_VERSION, "trace")
    domain, red, blue = r.text(), r.text(), r.text()
    fitness_red, fitness_blue = r.f64(), r.f64()
    completion, max_steps = r.u64(), r.u64()
    winner_code = r.u8()
    if winner_code > 2:
        raise SnapshotError(f"trace: bad winner code {winner_code}")
    key = r.u64()
    arena = tuple(r.ids())
    frames = [Frame(p) for p in r.array()]
    positions: Dict[Side, np.ndarray] = {}
    actions: Dict[Side, List[List[str]]] = {}
    for side in _SIDES:
        positions[side] = r.array()
        steps = [[r.text() for _ in range(r.u32())] for _ in range(r.u32())]
        if steps:
            actions[side] = steps
    r.done()
    outcome = DuelOutcome(
        fitness_red=fitness_red,
        fitness_blue=fitness_blue,
        frames=frames,
        completion_time=completion,
        max_steps=max_steps,
        winner=None if winner_code == 2 else _SIDES[winner_code],
        positions=positions,
        arena_size=arena,
        key=key,
        actions=actions,
    )
    return DuelTrace(domain, red, blue, outcome)


def save_trace(path: Union[str, Path], trace: DuelTrace) -> None:
    write_atomic(path, encode_trace(trace))


def load_trace(path: Union[str, Path]) -> DuelTrace:
    return decode_trace(Path(path).read_bytes())


# --- tournaments ---


@dataclass
class TournamentFile:
    domain: str
    matrix: TournamentMatrix
    # human-readable name per row and column (run, generation, solution)
    row_labels: List[str]
    col_labels: List[str]


def encode_tournament(t: TournamentFile) -> bytes:
    m = t.matrix
    w = Writer(TOURNAMENT_MAGIC, TOURNAMENT_VERSION)
    w.text(t.domain)
    w.u8(_SIDES.index(m.row_side))
    w.u8(_KINDS.index(m.distance_kind))
    w.ids(m.row_ids)
    w.ids(m.col_ids)
    for labels in (t.row_labels, t.col_labels):
        w.u32(len(labels))
        for label in labels:
            w.text(label)
    w.array(m.fitness_rows)
    w.array(m.fitness_cols)
    w.array(m.keys, "<u8")
    return w.finish()


def decode_tournament(data: bytes) -> TournamentFile:
    r = Reader(data, TOURNAMENT_MAGIC, TOURNAMENT_VERSION, "tournament")
    domain = r.text()
    side_code, kind_code = r.u8(), r.u8()
    if side_code > 1 or kind_code > 1:
        raise SnapshotError("tournament: bad side or distance kind code")
    row_ids, col_ids = r.ids(), r.ids()
    row_labels = [r.text() for _ in range(r.u32())]
    col_labels = [r.text() for _ in range(r.u32())]
    matrix = TournamentMatrix(
        row_side=_SIDES[side_code],
        row_ids=row_ids,
        col_ids=col_ids,
        fitness_rows=r.array(),
        fitness_cols=r.array(),
        keys=r.array("<u8"),
        distance_kind=_KINDS[kind_code],
    )
    r.done()
    if matrix.fitness_rows.shape != matrix.shape or len(row_labels) != len(row_ids) or len(col_labels) != len(col_ids):
        raise SnapshotError("tournament: sizes do not agree")
    return TournamentFile(domain, matrix, row_labels, col_labels)


def save_tournament(path: Union[str, Path], t: TournamentFile) -> None:
    write_atomic(path, encode_tournament(t))


def load_tournament(path: Union[str, Path]) -> TournamentFile:
    return decode_tournament(Path(path).read_bytes())


# --- csv dumps ---


def write_matrix_csv(path: Union[str, Path], t: TournamentFile) -> None:
    m = t.matrix
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["row", "col", f"fitness_{m.row_side.value}", f"fitness_{m.col_side.value}", "key"])
        for i, row in enumerate(t.row_labels):
            for j, col in enumerate(t.col_labels):
                out.writerow([row, col, fmt(m.fitness_rows[i, j]), fmt(m.fitness_cols[i, j]), int(m.keys[i, j])])


def write_elo_csv(path: Union[str, Path], table: EloTable, labels: Dict[int, str], sides: Dict[int, Side]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["rank", "label", "side", "rating", "matches"])
        for rank, sid in enumerate(table.ranking(), start=1):
            out.writerow([rank, labels[sid], sides[sid].value, fmt(table.ratings[sid]), table.matches[sid]])


def write_projection_csv(
    path: Union[str, Path],
    projection: PcaProjection,
    keys: Sequence[str],
    fitnesses: Sequence[float],
    coordinates: Optional[np.ndarray] = None,
) -> None:
    coords = projection.coordinates if coordinates is None else coordinates
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["behavior_key", "pc1", "pc2", "fitness"])
        for key, (x, y), f in zip(keys, coords.tolist(), fitnesses):
            out.writerow([key, fmt(x), fmt(y), fmt(f)])
