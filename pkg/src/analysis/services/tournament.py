from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from src.analysis.schema import TournamentMatrix
from src.domains.schema import Side
from src.evolve.schema import GenerationsLog, Solution
from src.evolve.services.evaluator import DuelJob, Evaluator
from src.utils.errors import EvaluationError, GameError, TournamentError
from src.utils.logger import logger

log = logger(__name__)


def round_robin(
    rows: Sequence[Solution],
    cols: Sequence[Solution],
    row_side: Side,
    evaluator: Evaluator,
    keep_behaviors: bool = True,
    generation: int = 0,
) -> TournamentMatrix:
    """Evaluate every (row, column) pair once, rows playing ``row_side``."""
    if not rows or not cols:
        raise TournamentError("round robin needs two non-empty sets")
    sides = (Side.RED, Side.BLUE) if keep_behaviors else ()
    jobs = []
    for a in rows:
        for b in cols:
            red, blue = (a.genome, b.genome) if row_side is Side.RED else (b.genome, a.genome)
            jobs.append(DuelJob(red, blue, sides))
    try:
        results = evaluator.map(jobs)
    except GameError as exc:
        raise EvaluationError(f"tournament duel failed: {exc}", generation) from exc

    n, m = len(rows), len(cols)
    fitness_rows = np.array([r.fitness(row_side) for r in results]).reshape(n, m)
    fitness_cols = np.array([r.fitness(row_side.opposite) for r in results]).reshape(n, m)
    keys = np.array([r.key for r in results], dtype=np.uint64).reshape(n, m)
    matrix = TournamentMatrix(
        row_side=row_side,
        row_ids=[s.solution_id for s in rows],
        col_ids=[s.solution_id for s in cols],
        fitness_rows=fitness_rows,
        fitness_cols=fitness_cols,
        keys=keys,
        distance_kind=evaluator.spec.distance_kind,
    )
    if keep_behaviors:
        matrix.behaviors_rows = np.stack([r.behaviors[row_side].values for r in results]).reshape(n, m, -1)
        matrix.behaviors_cols = np.stack([r.behaviors[row_side.opposite].values for r in results]).reshape(n, m, -1)
    log.debug("round robin %dx%d done", n, m)
    return matrix


@dataclass
class Entrant:
    """One tournament participant, traced back to its run and generation."""

    run: int
    generation: int
    solution: Solution
    side: Side

    @property
    def label(self) -> str:
        return f"r{self.run}:g{self.generation}:s{self.solution.solution_id}"


@dataclass
class Tournament:
    matrix: TournamentMatrix
    rows: List[Entrant]
    cols: List[Entrant]

    def index_matrix(self) -> TournamentMatrix:
        """The matrix with entrant positions as ids, unique across runs."""
        n, m = self.matrix.shape
        return TournamentMatrix(
            row_side=self.matrix.row_side,
            row_ids=list(range(n)),
            col_ids=list(range(n, n + m)),
            fitness_rows=self.matrix.fitness_rows,
            fitness_cols=self.matrix.fitness_cols,
            keys=self.matrix.keys,
            distance_kind=self.matrix.distance_kind,
        )

    def by_index(self) -> Tuple[Dict[int, str], Dict[int, Side]]:
        everyone = self.rows + self.cols
        return {i: e.label for i, e in enumerate(everyone)}, {i: e.side for i, e in enumerate(everyone)}


def generation_entrants(logs: Sequence[GenerationsLog], side: Side) -> List[Entrant]:
    """Task sets selected on ``side``, every generation of every run, in order."""
    entrants = []
    for run, book in enumerate(logs):
        for record in book.generations:
            if record.side is side:
                entrants.extend(Entrant(run, record.generation, s, side) for s in record.new_tasks.solutions)
    return entrants


def play(rows: List[Entrant], cols: List[Entrant], evaluator: Evaluator, keep_behaviors: bool = False) -> Tournament:
    if not rows or not cols:
        raise TournamentError("tournament needs entrants on both sides")
    matrix = round_robin(
        [e.solution for e in rows], [e.solution for e in cols], rows[0].side, evaluator, keep_behaviors
    )
    return Tournament(matrix, rows, cols)


def intergenerational(
    logs: Sequence[GenerationsLog], evaluator: Evaluator, keep_behaviors: bool = False
) -> Tournament:
    """Every Red task of every generation against every Blue task."""
    return play(generation_entrants(logs, Side.RED), generation_entrants(logs, Side.BLUE), evaluator, keep_behaviors)


def top_k(tournament: Tournament, k: int) -> Tuple[List[Entrant], List[Entrant]]:
    """Best ``k`` entrants per side per run by mean fitness across the tournament."""
    picks: List[List[Entrant]] = []
    for entrants, fitness in (
        (tournament.rows, tournament.matrix.fitness_rows.mean(axis=1)),
        (tournament.cols, tournament.matrix.fitness_cols.mean(axis=0)),
    ):
        chosen: List[Entrant] = []
        for run in sorted({e.run for e in entrants}):
            members = [i for i, e in enumerate(entrants) if e.run == run]
            if k > len(members):
                log.warning("run %d has only %d %s entrants, clipping top-%d", run, len(members), entrants[0].side.value, k)
            members.sort(key=lambda i: (-fitness[i], i))
            chosen.extend(entrants[i] for i in members[:k])
        picks.append(chosen)
    return picks[0], picks[1]
