from typing import List

from pydantic import BaseModel

from src.storage.schema import RunManifest


class RunSummary(BaseModel):
    run_id: str
    complete: bool
    generations: int


class GenerationSummary(BaseModel):
    generation: int
    side: str
    evaluations: int
    elites: int
    mean_elite_fitness: float
    max_elite_fitness: float


class RunDetail(BaseModel):
    run_id: str
    complete: bool
    manifest: RunManifest
    generations: List[GenerationSummary]


class TaskArchiveSummary(BaseModel):
    task_index: int
    task_solution_id: int
    elites: int
    best_fitness: float


class SnapshotSummary(BaseModel):
    generation: int
    side: str
    tasks: List[str]
    archives: List[TaskArchiveSummary]


class MetricRowOut(BaseModel):
    run_id: str
    generation: int
    metric: str
    value: float
