"""Per-generation metric rows for one or more runs.

All runs handed in together share one PCA projection and one grid box, so
their coverages are comparable.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.analysis.schema import PcaProjection
from src.analysis.services.measures import (
    action_entropy,
    atomic_usage,
    coverage_in_box,
    ranking_novelty,
    ranking_vector,
)
from src.analysis.services.pca import pca2
from src.analysis.services.tournament import Tournament, intergenerational
from src.domains.schema import Domain, Side
from src.evolve.schema import GenerationRecord, GenerationsLog
from src.evolve.services.evaluator import Evaluator
from src.evolve.services.mtmb import elite_pool
from src.static_values import GOTO_THRESHOLDS, GRID_SIZE, TARGETS
from src.utils import rng as streams
from src.utils.errors import BehaviorError, TournamentError
from src.utils.logger import logger

log = logger(__name__)

COMMON_METRICS = (
    "evaluations",
    "elites",
    "mean_elite_fitness",
    "max_elite_fitness",
    "mean_solution_size",
    "coverage",
    "qd_score",
    "ranking_novelty",
)
SKIRMISH_METRICS = (
    ("action_entropy",)
    + tuple(f"atomic_usage:attack:{t}" for t in TARGETS)
    + tuple(f"atomic_usage:goto:{t}" for t in GOTO_THRESHOLDS)
)
PUSHER_METRICS = ("mean_speed",)


def metric_names(domain: Domain) -> Tuple[str, ...]:
    return COMMON_METRICS + (SKIRMISH_METRICS if domain.name == "skirmish" else PUSHER_METRICS)


@dataclass
class MetricRow:
    run_id: str
    generation: int
    metric: str
    value: float


@dataclass
class PooledGrid:
    projection: PcaProjection
    low: np.ndarray
    high: np.ndarray


def generation_points(record: GenerationRecord) -> Tuple[np.ndarray, np.ndarray]:
    elites = elite_pool(record.archives)
    return np.stack([e.behavior.values for e in elites]), np.array([e.fitness for e in elites])


def _require_behaviors(tournament: Tournament) -> Tuple[np.ndarray, np.ndarray]:
    matrix = tournament.matrix
    if matrix.behaviors_rows is None or matrix.behaviors_cols is None:
        raise TournamentError("tournament was played without behaviors")
    return matrix.behaviors_rows, matrix.behaviors_cols


def tournament_points(tournament: Tournament, run: int, generation: int) -> Tuple[np.ndarray, np.ndarray, List[str]]:
    """Behaviors, fitnesses and keys of one generation's task set over all its tournament duels."""
    behaviors_rows, behaviors_cols = _require_behaviors(tournament)
    matrix = tournament.matrix
    dimension = behaviors_rows.shape[-1]
    rows = [i for i, e in enumerate(tournament.rows) if e.run == run and e.generation == generation]
    if rows:
        keys = [
            f"g{generation}:s{tournament.rows[i].solution.solution_id}:vs:{c.label}"
            for i in rows
            for c in tournament.cols
        ]
        return behaviors_rows[rows].reshape(-1, dimension), matrix.fitness_rows[rows].reshape(-1), keys
    cols = [j for j, e in enumerate(tournament.cols) if e.run == run and e.generation == generation]
    if not cols:
        raise TournamentError(f"generation {generation} of run {run} has no tournament entrants")
    keys = [
        f"g{generation}:s{tournament.cols[j].solution.solution_id}:vs:{r.label}" for r in tournament.rows for j in cols
    ]
    return behaviors_cols[:, cols].reshape(-1, dimension), matrix.fitness_cols[:, cols].reshape(-1), keys


def generation_samples(
    record: GenerationRecord, run: int, tournament: Optional[Tournament]
) -> Tuple[np.ndarray, np.ndarray, List[str]]:
    """Points a generation contributes to the grid: its tournament duels when a
    two-sided tournament exists, its archive elites otherwise."""
    if tournament is not None:
        return tournament_points(tournament, run, record.generation)
    points, fitness = generation_points(record)
    keys = [f"g{record.generation}:s{e.solution_id}" for e in elite_pool(record.archives)]
    return points, fitness, keys


def pooled_grid(logs: Sequence[GenerationsLog], tournament: Optional[Tournament] = None, seed: int = 0) -> PooledGrid:
    """One PCA over every behavior of the intergenerational tournament of all
    runs. One-sided runs have no such tournament and fall back to the final
    elites of every generation."""
    if tournament is not None:
        behaviors_rows, behaviors_cols = _require_behaviors(tournament)
        dimension = behaviors_rows.shape[-1]
        points = np.concatenate([behaviors_rows.reshape(-1, dimension), behaviors_cols.reshape(-1, dimension)])
    else:
        blocks = [generation_points(r)[0] for book in logs for r in book.generations]
        if len({b.shape[1] for b in blocks}) > 1:
            raise BehaviorError("runs with different behavior dimensions cannot share a projection")
        points = np.concatenate(blocks)
    if points.shape[0] < 3:
        # repeated rows keep mean and covariance
        points = np.concatenate([points] * 3)
    projection = pca2(points, streams.derive_rng(seed, streams.PCA))
    coords = projection.coordinates
    return PooledGrid(projection, coords.min(axis=0), coords.max(axis=0))


def grid_tournament(logs: Sequence[GenerationsLog], evaluator: Evaluator) -> Optional[Tournament]:
    """The intergenerational tournament with behaviors, or None for one-sided runs."""
    return intergenerational(logs, evaluator, keep_behaviors=True) if _both_sides(logs) else None


def novelty_by_generation(tournament: Tournament, run: int) -> Dict[int, float]:
    """Ranking novelty of each generation's tasks of one run, against the
    previous generation of the same side; the full opposing set is the reference."""
    fractions: Dict[int, float] = {}
    for entrants, fitness in (
        (tournament.rows, tournament.matrix.fitness_rows),
        (tournament.cols, tournament.matrix.fitness_cols.T),
    ):
        generations = sorted({e.generation for e in entrants if e.run == run})
        rankings = [
            [ranking_vector(fitness[i].tolist()) for i, e in enumerate(entrants) if e.run == run and e.generation == g]
            for g in generations
        ]
        fractions.update(zip(generations, ranking_novelty(rankings)))
    return fractions


def _diagonal_duels(record: GenerationRecord, domain: Domain):
    """Each selected task against the opponent it shares an index with."""
    tasks = record.tasks.solutions
    for j, solution in enumerate(record.new_tasks.solutions):
        opponent = tasks[j % len(tasks)].genome
        red, blue = (solution.genome, opponent) if record.side is Side.RED else (opponent, solution.genome)
        yield domain.evaluate(red, blue)


def _domain_rows(record: GenerationRecord, domain: Domain) -> Dict[str, float]:
    outcomes = list(_diagonal_duels(record, domain))
    if domain.name != "skirmish":
        return {"mean_speed": float(np.mean([o.mean_speed[record.side] for o in outcomes]))}
    values = {"action_entropy": float(np.mean([action_entropy(o.actions[record.side]) for o in outcomes]))}
    trees = [record.solutions[e.solution_id].genome for e in elite_pool(record.archives)]
    usage = atomic_usage(trees)
    for t in TARGETS:
        values[f"atomic_usage:attack:{t}"] = usage.get(("attack", t), 0.0)
    for t in GOTO_THRESHOLDS:
        values[f"atomic_usage:goto:{t}"] = usage.get(("goto", t), 0.0)
    return values


def metric_rows(
    logs: Sequence[GenerationsLog],
    run_ids: Sequence[str],
    domain: Domain,
    evaluator: Evaluator,
    grid_n: int = GRID_SIZE,
) -> List[MetricRow]:
    if not any(book.generations for book in logs):
        return []
    tournament = grid_tournament(logs, evaluator)
    grid = pooled_grid(logs, tournament)
    names = metric_names(domain)
    rows: List[MetricRow] = []
    for run, (run_id, book) in enumerate(zip(run_ids, logs)):
        novelty = novelty_by_generation(tournament, run) if tournament is not None else {}
        for record in book.generations:
            _, fitness = generation_points(record)
            sizes = [e.size for e in elite_pool(record.archives)]
            points, duel_fitness, _ = generation_samples(record, run, tournament)
            coverage, qd_score = coverage_in_box(
                grid.projection.project(points), duel_fitness, grid.low, grid.high, grid_n
            )
            values = {
                "evaluations": float(record.evaluations),
                "elites": float(len(fitness)),
                "mean_elite_fitness": float(fitness.mean()),
                "max_elite_fitness": float(fitness.max()),
                "mean_solution_size": float(np.mean(sizes)),
                "coverage": coverage,
                "qd_score": qd_score,
                "ranking_novelty": novelty.get(record.generation, 0.0),
            }
            values.update(_domain_rows(record, domain))
            rows.extend(MetricRow(run_id, record.generation, name, values[name]) for name in names)
        log.info("metrics for run %s: %d generations", run_id, len(book.generations))
    return rows


def _both_sides(logs: Sequence[GenerationsLog]) -> bool:
    sides = {r.side for book in logs for r in book.generations}
    return sides == {Side.RED, Side.BLUE}
