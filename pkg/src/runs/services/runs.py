from pathlib import Path
from typing import List

from fastapi import HTTPException, status

from src.config import settings
from src.domains.services.registry import build_domain
from src.evolve.schema import GenerationRecord
from src.evolve.services.mtmb import elite_pool
from src.runs.schema import (
    GenerationSummary,
    MetricRowOut,
    RunDetail,
    RunSummary,
    SnapshotSummary,
    TaskArchiveSummary,
)
from src.storage.services.metrics import read_metrics
from src.storage.services.runs import MANIFEST_FILE, METRICS_FILE, is_complete, load_run, read_run_manifest
from src.storage.services.snapshot import list_snapshots, load_snapshot, snapshot_path
from src.utils.errors import GameError


def _run_dir(run_id: str) -> Path:
    path = settings.runs_dir / run_id
    # run ids are single path components
    if Path(run_id).name != run_id or not (path / MANIFEST_FILE).is_file():
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail="Run not found")
    return path


def _unprocessable(exc: GameError) -> HTTPException:
    return HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(exc))


def _summary(record: GenerationRecord) -> GenerationSummary:
    fitness = [e.fitness for e in elite_pool(record.archives)]
    return GenerationSummary(
        generation=record.generation,
        side=record.side.value,
        evaluations=record.evaluations,
        elites=len(fitness),
        mean_elite_fitness=sum(fitness) / len(fitness) if fitness else 0.0,
        max_elite_fitness=max(fitness) if fitness else 0.0,
    )


def list_runs_service() -> List[RunSummary]:
    root = settings.runs_dir
    if not root.is_dir():
        return []
    return [
        RunSummary(run_id=d.name, complete=is_complete(d), generations=len(list_snapshots(d)))
        for d in sorted(root.iterdir())
        if (d / MANIFEST_FILE).is_file()
    ]


def get_run_service(run_id: str) -> RunDetail:
    path = _run_dir(run_id)
    try:
        loaded = load_run(path)
    except GameError as exc:
        raise _unprocessable(exc) from exc
    return RunDetail(
        run_id=run_id,
        complete=is_complete(path),
        manifest=loaded.manifest,
        generations=[_summary(r) for r in loaded.log.generations],
    )


def get_generation_service(run_id: str, generation: int) -> SnapshotSummary:
    path = _run_dir(run_id)
    snapshot = snapshot_path(path, generation)
    if not snapshot.is_file():
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail="Generation not found")
    try:
        domain = build_domain(read_run_manifest(path).domain)
        record = load_snapshot(snapshot, domain)
    except GameError as exc:
        raise _unprocessable(exc) from exc
    archives = []
    for t, archive in enumerate(record.archives):
        elites = archive.elites()
        archives.append(
            TaskArchiveSummary(
                task_index=t,
                task_solution_id=record.tasks.solutions[t].solution_id,
                elites=len(elites),
                best_fitness=max((e.fitness for e in elites), default=0.0),
            )
        )
    return SnapshotSummary(
        generation=record.generation,
        side=record.side.value,
        tasks=[domain.encode(s.genome) for s in record.new_tasks.solutions],
        archives=archives,
    )


def get_metrics_service(run_id: str) -> List[MetricRowOut]:
    path = _run_dir(run_id) / METRICS_FILE
    if not path.is_file():
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail="Metrics not found")
    try:
        return [MetricRowOut(**row) for row in read_metrics(path)]
    except GameError as exc:
        raise _unprocessable(exc) from exc
