from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.archive.schema import BehaviorVector
from src.archive.services.cvt import FixedCvtArchive
from src.archive.services.growing import GrowingArchive
from src.behavior.schema import DescriptorSpec
from src.domains.schema import Side
from src.evolve.services.fitness import FitnessMode

Archive = Union[GrowingArchive, FixedCvtArchive]


class ArchiveMode(str, Enum):
    GROWING = "growing"
    FIXED_CVT = "fixed_cvt"


class GameConfig(BaseModel):
    """Parameters of one run. Every ablation is a combination of these."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    n_gen: int = Field(6, ge=1)
    n_task: int = Field(10, ge=1)
    n_cell: int = Field(8, ge=1)
    n_budget: int = Field(1500, ge=0)
    n_init: int = Field(100, ge=0)
    fitness_mode: FitnessMode = FitnessMode.SINGLE_OBJECTIVE
    archive_mode: ArchiveMode = ArchiveMode.GROWING
    bootstrap_enabled: bool = True
    descriptor: DescriptorSpec = DescriptorSpec()
    master_seed: int = Field(0, ge=0, lt=2**64)
    # every candidate is stored with fitness 0 (Diversity-only)
    ignore_fitness: bool = False
    # False keeps sampling random solutions after initialization (Random baseline)
    variation_enabled: bool = True
    batch_size: int = Field(1, ge=1)
    cvt_samples: int = Field(1000, ge=1)
    cached_distances: bool = True

    @model_validator(mode="after")
    def _check_sizes(self) -> "GameConfig":
        if self.n_init > self.n_budget:
            raise ValueError(f"n_init ({self.n_init}) must not exceed n_budget ({self.n_budget})")
        if self.archive_mode is ArchiveMode.FIXED_CVT and self.cvt_samples < self.n_cell:
            raise ValueError(f"cvt_samples ({self.cvt_samples}) must be at least n_cell ({self.n_cell})")
        return self


@dataclass(frozen=True)
class Solution:
    solution_id: int
    genome: Any
    parents: Tuple[int, ...] = ()


@dataclass
class TaskSet:
    side: Side
    solutions: List[Solution]

    def __len__(self) -> int:
        return len(self.solutions)


@dataclass(frozen=True)
class BootstrapRecord:
    task_index: int
    solution: Solution
    fitness: float
    behavior: BehaviorVector
    size: int = 0


@dataclass
class BootstrapSet:
    records: List[BootstrapRecord] = field(default_factory=list)


class Operator(str, Enum):
    RANDOM = "random"
    MUTATION = "mutation"
    CROSSOVER = "crossover"


@dataclass(frozen=True)
class LineageRecord:
    solution_id: int
    parent_ids: Tuple[int, ...]
    generation: int
    operator: Operator
    # encoded genome, so chains can be inspected without the archives
    payload: str


@dataclass
class GenerationRecord:
    generation: int
    side: Side
    # opponents this generation evolved against
    tasks: TaskSet
    archives: List[Archive]
    # elites of this generation, clustered down to the next task set
    new_tasks: TaskSet
    # rows: new_tasks, columns: tasks
    tournament: Any
    # candidates for the next generation's archives
    bootstrap: BootstrapSet
    evaluations: int
    # genome of every solution referenced by the archives, tasks or bootstrap
    solutions: Dict[int, Solution] = field(default_factory=dict)
    # lineage records issued in this generation that survived pruning
    lineage: List[LineageRecord] = field(default_factory=list)
    next_id: int = 0


@dataclass
class GenerationsLog:
    generations: List[GenerationRecord] = field(default_factory=list)
    lineage: Dict[int, LineageRecord] = field(default_factory=dict)

    def sides(self) -> List[Side]:
        return [g.side for g in self.generations]

    def last(self) -> Optional[GenerationRecord]:
        return self.generations[-1] if self.generations else None
