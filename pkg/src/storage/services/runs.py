"""Run directories: ``manifest.json``, ``gen_NNNN.gsnp`` per generation,
``metrics.csv`` and a ``COMPLETE`` marker once the last generation is written."""

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Union

from src.domains.schema import Domain
from src.domains.services.registry import build_domain
from src.evolve.schema import GenerationsLog, LineageRecord
from src.static_values import COMPLETE_MARKER
from src.storage.schema import RunManifest
from src.storage.services.manifest import dump_manifest, load_manifest, stamp
from src.storage.services.snapshot import list_snapshots, load_snapshot, write_atomic
from src.utils.errors import SnapshotError

MANIFEST_FILE = "manifest.json"
METRICS_FILE = "metrics.csv"


@dataclass
class LoadedRun:
    run_dir: Path
    manifest: RunManifest
    domain: Domain
    log: GenerationsLog

    @property
    def run_id(self) -> str:
        return self.run_dir.name


def create_run(run_dir: Union[str, Path], manifest: RunManifest) -> Path:
    run_dir = Path(run_dir)
    if run_dir.exists() and any(run_dir.iterdir()):
        raise SnapshotError(f"run directory {run_dir} is not empty")
    run_dir.mkdir(parents=True, exist_ok=True)
    write_atomic(run_dir / MANIFEST_FILE, dump_manifest(stamp(manifest)).encode("utf-8"))
    return run_dir


def read_run_manifest(run_dir: Union[str, Path]) -> RunManifest:
    path = Path(run_dir) / MANIFEST_FILE
    if not path.exists():
        raise SnapshotError(f"{run_dir} is not a run directory (no {MANIFEST_FILE})")
    return load_manifest(path)


def load_run(run_dir: Union[str, Path], check: bool = True) -> LoadedRun:
    run_dir = Path(run_dir)
    manifest = read_run_manifest(run_dir)
    domain = build_domain(manifest.domain)
    book = GenerationsLog()
    lineage: Dict[int, LineageRecord] = {}
    for expected, path in enumerate(list_snapshots(run_dir), start=1):
        record = load_snapshot(path, domain, check)
        if record.generation != expected:
            raise SnapshotError(f"{path}: expected generation {expected}, found {record.generation}")
        book.generations.append(record)
        lineage.update((r.solution_id, r) for r in record.lineage)
    book.lineage = lineage
    return LoadedRun(run_dir, manifest, domain, book)


def lineage_records(book: GenerationsLog) -> List[LineageRecord]:
    return [book.lineage[sid] for sid in sorted(book.lineage)]


def mark_complete(run_dir: Union[str, Path]) -> None:
    (Path(run_dir) / COMPLETE_MARKER).write_text("", encoding="utf-8")


def is_complete(run_dir: Union[str, Path]) -> bool:
    return (Path(run_dir) / COMPLETE_MARKER).exists()
