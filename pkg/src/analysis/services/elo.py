from typing import Iterable, List, Tuple

import numpy as np

from src.analysis.schema import EloTable, TournamentMatrix
from src.static_values import ELO_EPOCHS, ELO_INITIAL, ELO_K

# (first id, second id, score of the first: 1, 0.5 or 0)
Match = Tuple[int, int, float]


def expected_score(rating: float, opponent: float) -> float:
    return 1.0 / (1.0 + 10.0 ** ((opponent - rating) / 400.0))


def matches_from(matrix: TournamentMatrix) -> List[Match]:
    """One match per cell; the higher fitness wins, exact ties draw."""
    matches = []
    for i, row_id in enumerate(matrix.row_ids):
        for j, col_id in enumerate(matrix.col_ids):
            a, b = matrix.fitness_rows[i, j], matrix.fitness_cols[i, j]
            score = 1.0 if a > b else 0.0 if a < b else 0.5
            matches.append((row_id, col_id, score))
    return matches


def elo_from_matches(
    matches: Iterable[Match],
    initial: float = ELO_INITIAL,
    k: float = ELO_K,
    epochs: int = ELO_EPOCHS,
    rng: np.random.Generator = None,
) -> EloTable:
    """Sequential Elo updates over ``epochs`` shuffled passes of all matches.

    Updates are zero-sum, so the mean rating stays at ``initial``.
    """
    matches = list(matches)
    rng = rng if rng is not None else np.random.default_rng(0)
    table = EloTable()
    for a, b, _ in matches:
        for sid in (a, b):
            table.ratings.setdefault(sid, float(initial))
            table.matches.setdefault(sid, 0)
    for _ in range(epochs):
        for index in rng.permutation(len(matches)):
            a, b, score = matches[int(index)]
            ra, rb = table.ratings[a], table.ratings[b]
            delta = k * (score - expected_score(ra, rb))
            table.ratings[a] = ra + delta
            table.ratings[b] = rb - delta
            table.matches[a] += 1
            table.matches[b] += 1
    return table


def elo(
    matrix: TournamentMatrix,
    initial: float = ELO_INITIAL,
    k: float = ELO_K,
    epochs: int = ELO_EPOCHS,
    rng: np.random.Generator = None,
) -> EloTable:
    return elo_from_matches(matches_from(matrix), initial, k, epochs, rng)
