"""Duel evaluation, in-process or across a process pool.

Workers receive the domain and descriptor once (pool initializer) and return
compact results: fitnesses, the requested behavior vectors and sizes. Results
come back in submission order, so the worker count never changes a run.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.archive.schema import BehaviorVector
from src.behavior.schema import DescriptorSpec
from src.behavior.services.descriptors import describe
from src.domains.schema import Domain, DuelOutcome, Side
from src.utils.logger import logger

log = logger(__name__)


@dataclass(frozen=True)
class DuelJob:
    red: Any
    blue: Any
    # sides whose behavior is needed
    describe: Tuple[Side, ...] = (Side.RED, Side.BLUE)


@dataclass(frozen=True)
class DuelResult:
    fitness_red: float
    fitness_blue: float
    key: int
    behaviors: Dict[Side, BehaviorVector] = field(default_factory=dict)
    sizes: Dict[Side, int] = field(default_factory=dict)
    mean_speed: Dict[Side, float] = field(default_factory=dict)

    def fitness(self, side: Side) -> float:
        return self.fitness_red if side is Side.RED else self.fitness_blue


def run_duel(domain: Domain, spec: DescriptorSpec, job: DuelJob) -> DuelResult:
    outcome: DuelOutcome = domain.evaluate(job.red, job.blue)
    genomes = {Side.RED: job.red, Side.BLUE: job.blue}
    return DuelResult(
        fitness_red=outcome.fitness_red,
        fitness_blue=outcome.fitness_blue,
        key=outcome.key,
        behaviors={side: describe(outcome, spec, side) for side in job.describe},
        sizes={side: domain.solution_size(genomes[side]) for side in (Side.RED, Side.BLUE)},
        mean_speed=dict(outcome.mean_speed),
    )


_worker_domain: Optional[Domain] = None
_worker_spec: Optional[DescriptorSpec] = None


def _init_worker(domain: Domain, spec: DescriptorSpec) -> None:
    global _worker_domain, _worker_spec
    _worker_domain, _worker_spec = domain, spec


def _run_in_worker(job: DuelJob) -> DuelResult:
    assert _worker_domain is not None and _worker_spec is not None
    return run_duel(_worker_domain, _worker_spec, job)


class Evaluator:
    """Counts every duel it runs. Use as a context manager when ``jobs > 1``."""

    def __init__(self, domain: Domain, spec: DescriptorSpec, jobs: int = 1):
        self.domain = domain
        self.spec = spec
        self.jobs = max(1, jobs)
        self.calls = 0
        self._pool: Optional[ProcessPoolExecutor] = None

    def __enter__(self) -> "Evaluator":
        if self.jobs > 1:
            log.debug("starting %d evaluation workers", self.jobs)
            self._pool = ProcessPoolExecutor(
                max_workers=self.jobs, initializer=_init_worker, initargs=(self.domain, self.spec)
            )
        return self

    def __exit__(self, *exc: object) -> None:
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def map(self, jobs: Sequence[DuelJob]) -> List[DuelResult]:
        self.calls += len(jobs)
        if self._pool is None or len(jobs) < 2:
            return [run_duel(self.domain, self.spec, job) for job in jobs]
        chunk = max(1, len(jobs) // (4 * self.jobs))
        return list(self._pool.map(_run_in_worker, jobs, chunksize=chunk))
