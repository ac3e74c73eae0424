"""Multi-task multi-behavior MAP-Elites: one archive per task, shared
variation, candidates evaluated against a uniformly drawn task."""

from dataclasses import dataclass
from typing import Dict, List, Tuple

from src.archive.schema import Elite
from src.archive.services.cvt import FixedCvtArchive, make_fixed_cvt, sample_uniform_behaviors
from src.archive.services.growing import GrowingArchive
from src.behavior.services.descriptors import descriptor_bounds
from src.domains.schema import Domain, Side
from src.evolve.schema import Archive, ArchiveMode, BootstrapSet, GameConfig, Operator, Solution, TaskSet
from src.evolve.services.evaluator import DuelJob, Evaluator
from src.evolve.services.lineage import LineageRegistry
from src.utils import rng as streams
from src.utils.errors import EvaluationError, GameError
from src.utils.logger import logger

log = logger(__name__)


@dataclass
class MtmbResult:
    archives: List[Archive]
    # genome of every candidate that was ever stored in an archive
    solutions: Dict[int, Solution]
    evaluations: int


def make_archives(config: GameConfig, domain: Domain, generation: int) -> List[Archive]:
    kind = config.descriptor.distance_kind
    if config.archive_mode is ArchiveMode.GROWING:
        return [
            GrowingArchive(config.n_cell, kind, config.fitness_mode, cached=config.cached_distances)
            for _ in range(config.n_task)
        ]
    # one tessellation per generation, shared by every task; costs no evaluation
    low, high = descriptor_bounds(config.descriptor, domain)
    rng = streams.derive_rng(config.master_seed, streams.CVT, generation)
    samples = sample_uniform_behaviors(low, high, config.cvt_samples, kind, rng)
    template = make_fixed_cvt(samples, config.n_cell, rng, config.fitness_mode)
    centroids = [cell.centroid for cell in template.cells]
    return [FixedCvtArchive(centroids, config.fitness_mode) for _ in range(config.n_task)]


def elite_pool(archives: List[Archive]) -> List[Elite]:
    """Union of all elites, by task then cell."""
    return [elite for archive in archives for elite in archive.elites()]


def _candidate(
    config: GameConfig,
    domain: Domain,
    side: Side,
    generation: int,
    index: int,
    pool: List[Elite],
    solutions: Dict[int, Solution],
    registry: LineageRegistry,
) -> Tuple[int, Solution]:
    rng = streams.derive_rng(config.master_seed, streams.MTMB, generation, index)
    task = int(rng.integers(config.n_task))
    if len(pool) < config.n_init or not config.variation_enabled or not pool:
        genome = domain.random_solution(side, rng)
        operator, parents = Operator.RANDOM, ()
    else:
        first = pool[int(rng.integers(len(pool)))]
        second = pool[int(rng.integers(len(pool)))]
        genome, tag = domain.variation(solutions[first.solution_id].genome, solutions[second.solution_id].genome, rng)
        operator = Operator(tag)
        parents = (first.solution_id,) if operator is Operator.MUTATION else (first.solution_id, second.solution_id)
    solution_id = registry.issue(parents, generation, operator, domain.encode(genome))
    return task, Solution(solution_id, genome, parents)


def run_mtmb(
    tasks: TaskSet,
    side: Side,
    bootstrap: BootstrapSet,
    config: GameConfig,
    domain: Domain,
    evaluator: Evaluator,
    registry: LineageRegistry,
    generation: int = 1,
) -> MtmbResult:
    if len(tasks) != config.n_task:
        raise GameError(f"expected {config.n_task} tasks, got {len(tasks)}")
    archives = make_archives(config, domain, generation)
    solutions: Dict[int, Solution] = {}

    for record in bootstrap.records:
        fitness = 0.0 if config.ignore_fitness else record.fitness
        archives[record.task_index].update(record.solution.solution_id, fitness, record.behavior, record.size)
        solutions[record.solution.solution_id] = record.solution

    evaluations = 0
    for start in range(0, config.n_budget, config.batch_size):
        stop = min(config.n_budget, start + config.batch_size)
        # candidates of one batch all see the archives as they were at its start
        pool = elite_pool(archives)
        batch: List[Tuple[int, Solution]] = []
        for index in range(start, stop):
            batch.append(_candidate(config, domain, side, generation, index, pool, solutions, registry))
        jobs = []
        for task, candidate in batch:
            opponent = tasks.solutions[task].genome
            red, blue = (candidate.genome, opponent) if side is Side.RED else (opponent, candidate.genome)
            jobs.append(DuelJob(red, blue, (side,)))
        try:
            results = evaluator.map(jobs)
        except GameError as exc:
            raise EvaluationError(f"evaluation failed: {exc}", generation, start) from exc
        evaluations += len(jobs)

        for (task, candidate), result in zip(batch, results):
            fitness = 0.0 if config.ignore_fitness else result.fitness(side)
            try:
                archives[task].update(candidate.solution_id, fitness, result.behaviors[side], result.sizes[side])
            except GameError as exc:
                raise EvaluationError(f"archive rejected a behavior: {exc}", generation, start) from exc
            solutions[candidate.solution_id] = candidate

    referenced = {e.solution_id for e in elite_pool(archives)}
    log.debug("generation %d: %d evaluations, %d elites", generation, evaluations, len(referenced))
    return MtmbResult(archives, {sid: s for sid, s in solutions.items() if sid in referenced}, evaluations)

