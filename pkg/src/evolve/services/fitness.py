from dataclasses import dataclass
from enum import Enum


class FitnessMode(str, Enum):
    SINGLE_OBJECTIVE = "single_objective"
    # primary fitness first, smaller solution on exact ties
    LEXICOGRAPHIC = "lexicographic"


@dataclass(frozen=True)
class FitnessValue:
    primary: float
    size: int = 0


def compare_fitness(a: FitnessValue, b: FitnessValue, mode: FitnessMode) -> int:
    """Return 1 if a is better than b, -1 if worse, 0 if equal under mode."""
    if a.primary > b.primary:
        return 1
    if a.primary < b.primary:
        return -1
    if mode is FitnessMode.LEXICOGRAPHIC:
        if a.size < b.size:
            return 1
        if a.size > b.size:
            return -1
    return 0
