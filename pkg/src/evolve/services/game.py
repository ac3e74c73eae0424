"""The generational loop: alternate sides, illuminate each side against the
other's frozen task set, cluster the elites down to the next task set and
bootstrap the next generation from a tournament between the two sets."""

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from src.analysis.schema import TournamentMatrix
from src.analysis.services.tournament import round_robin
from src.archive.schema import BehaviorVector, DistanceKind, Elite
from src.domains.schema import Domain, Side
from src.evolve.schema import (
    Archive,
    BootstrapRecord,
    BootstrapSet,
    GameConfig,
    GenerationRecord,
    GenerationsLog,
    LineageRecord,
    Operator,
    Solution,
    TaskSet,
)
from src.evolve.services.evaluator import Evaluator
from src.evolve.services.kmeans import kmeans
from src.evolve.services.lineage import LineageRegistry
from src.evolve.services.mtmb import elite_pool, run_mtmb
from src.utils import rng as streams
from src.utils.errors import GameError
from src.utils.logger import log_context, logger

log = logger(__name__)


def side_for(generation: int) -> Side:
    """Red on odd generations (the first included), Blue on even ones."""
    return Side.RED if generation % 2 == 1 else Side.BLUE


def select_tasks(
    archives: List[Archive],
    n_task: int,
    rng: np.random.Generator,
    side: Side,
    solutions: Dict[int, Solution],
) -> TaskSet:
    """One elite per k-means cluster of all elite behaviors.

    Each cluster contributes its fittest member not already chosen (ties to the
    lowest id). A deficit is filled with random elites whose behavior differs
    from every chosen one, then by repeating the chosen ones.
    """
    elites = elite_pool(archives)
    if not elites:
        raise GameError("cannot select tasks from empty archives")
    kind = elites[0].behavior.distance_kind
    points = np.stack([e.behavior.values for e in elites])
    assignments, _ = kmeans(points, n_task, rng, normalize=kind is DistanceKind.COSINE)

    chosen: List[Elite] = []
    chosen_ids = set()
    for cluster in range(n_task):
        members = [e for e, a in zip(elites, assignments) if a == cluster and e.solution_id not in chosen_ids]
        if not members:
            continue
        best = min(members, key=lambda e: (-e.fitness, e.solution_id))
        chosen.append(best)
        chosen_ids.add(best.solution_id)

    if len(chosen) < n_task:
        log.warning("only %d distinct clusters for %d tasks, filling the deficit", len(chosen), n_task)
        seen_behaviors = {e.behavior for e in chosen}
        spare: List[Elite] = []
        for e in elites:
            if e.solution_id in chosen_ids or e.behavior in seen_behaviors:
                continue
            spare.append(e)
            chosen_ids.add(e.solution_id)
            seen_behaviors.add(e.behavior)
        for i in rng.permutation(len(spare))[: n_task - len(chosen)]:
            chosen.append(spare[int(i)])
        base = len(chosen)
        while len(chosen) < n_task:
            chosen.append(chosen[(len(chosen) - base) % base])

    return TaskSet(side, [solutions[e.solution_id] for e in chosen])


def bootstrap_tournament(
    new_tasks: TaskSet,
    old_tasks: TaskSet,
    evaluator: Evaluator,
    enabled: bool = True,
    generation: int = 0,
) -> Tuple[TournamentMatrix, BootstrapSet]:
    """All new tasks against all old tasks.

    Each old task becomes a candidate elite, with its own fitness and behavior,
    in the next generation's archive of every new task.
    """
    if new_tasks.side is old_tasks.side:
        raise GameError("bootstrap tournament needs opposing task sets")
    matrix = round_robin(new_tasks.solutions, old_tasks.solutions, new_tasks.side, evaluator, True, generation)
    bootstrap = BootstrapSet()
    if not enabled:
        return matrix, bootstrap
    assert matrix.behaviors_cols is not None
    kind = evaluator.spec.distance_kind
    for j, _ in enumerate(new_tasks.solutions):
        for i, old in enumerate(old_tasks.solutions):
            bootstrap.records.append(
                BootstrapRecord(
                    task_index=j,
                    solution=old,
                    fitness=float(matrix.fitness_cols[j, i]),
                    behavior=BehaviorVector(matrix.behaviors_cols[j, i], kind),
                    size=evaluator.domain.solution_size(old.genome),
                )
            )
    return matrix, bootstrap


def initial_tasks(config: GameConfig, domain: Domain, registry: LineageRegistry) -> TaskSet:
    """N_task random Blue solutions, issued as generation 0."""
    solutions = []
    for index in range(config.n_task):
        rng = streams.derive_rng(config.master_seed, streams.TASKS, index)
        genome = domain.random_solution(Side.BLUE, rng)
        sid = registry.issue((), 0, Operator.RANDOM, domain.encode(genome))
        solutions.append(Solution(sid, genome))
    return TaskSet(Side.BLUE, solutions)


@dataclass
class GameState:
    """What the next generation needs; rebuilt from the last snapshot on resume."""

    generation: int
    tasks: TaskSet
    bootstrap: BootstrapSet
    registry: LineageRegistry


def fresh_state(config: GameConfig, domain: Domain) -> GameState:
    registry = LineageRegistry()
    return GameState(0, initial_tasks(config, domain, registry), BootstrapSet(), registry)


def resume_state(record: GenerationRecord, lineage: List[LineageRecord]) -> GameState:
    registry = LineageRegistry(record.next_id, lineage)
    return GameState(record.generation, record.new_tasks, record.bootstrap, registry)


def run_generation(
    state: GameState, config: GameConfig, domain: Domain, evaluator: Evaluator
) -> Tuple[GenerationRecord, GameState]:
    generation = state.generation + 1
    side = side_for(generation)
    if state.tasks.side is side:
        raise GameError(f"generation {generation} evolves {side.value} but its tasks are {side.value}")
    before = evaluator.calls
    result = run_mtmb(state.tasks, side, state.bootstrap, config, domain, evaluator, state.registry, generation)

    select_rng = streams.derive_rng(config.master_seed, streams.SELECT, generation)
    new_tasks = select_tasks(result.archives, config.n_task, select_rng, side, result.solutions)
    matrix, bootstrap = bootstrap_tournament(new_tasks, state.tasks, evaluator, config.bootstrap_enabled, generation)

    solutions = dict(result.solutions)
    for task in state.tasks.solutions + new_tasks.solutions:
        solutions[task.solution_id] = task
    referenced = set(solutions)
    state.registry.prune(referenced)

    record = GenerationRecord(
        generation=generation,
        side=side,
        tasks=state.tasks,
        archives=result.archives,
        new_tasks=new_tasks,
        tournament=matrix,
        bootstrap=bootstrap,
        evaluations=evaluator.calls - before,
        solutions=solutions,
        lineage=state.registry.take_fresh(),
        next_id=state.registry.next_id,
    )
    log.info(
        "generation %d (%s): %d evaluations, %d elites",
        generation,
        side.value,
        record.evaluations,
        len(elite_pool(result.archives)),
    )
    return record, GameState(generation, new_tasks, bootstrap, state.registry)


def run_game(
    config: GameConfig,
    domain: Domain,
    jobs: int = 1,
    state: Optional[GameState] = None,
    stop_after: Optional[int] = None,
    on_generation: Optional[Callable[[GenerationRecord], None]] = None,
    log_book: Optional[GenerationsLog] = None,
) -> GenerationsLog:
    """Run (or continue) a game until ``n_gen`` generations, or ``stop_after``."""
    state = state or fresh_state(config, domain)
    book = log_book or GenerationsLog()
    last = config.n_gen if stop_after is None else min(config.n_gen, stop_after)
    with Evaluator(domain, config.descriptor, jobs) as evaluator:
        while state.generation < last:
            generation = state.generation + 1
            with log_context(generation=generation, side=side_for(generation).value):
                record, state = run_generation(state, config, domain, evaluator)
            book.generations.append(record)
            book.lineage = dict(state.registry.records)
            if on_generation is not None:
                on_generation(record)
    return book
