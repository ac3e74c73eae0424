"""Per-generation measures: grid coverage, QD-score, ranking novelty,
rank correlation, action entropy and atomic usage."""

from collections import Counter
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np
from scipy.stats import rankdata

from src.domains.services.behavior_tree import Leaf, Node, iter_paths
from src.static_values import ACTION_CATEGORIES, GRID_SIZE
from src.utils.errors import GameError


def coverage_qdscore(coordinates: np.ndarray, fitnesses: Sequence[float], grid_n: int = GRID_SIZE) -> Tuple[float, float]:
    """Occupied fraction of a ``grid_n``² grid over the points' bounding box,
    and the mean of the best fitness in each occupied bin."""
    points = np.asarray(coordinates, dtype=np.float64).reshape(-1, 2)
    values = np.asarray(fitnesses, dtype=np.float64)
    if points.shape[0] == 0:
        raise GameError("coverage of an empty point set")
    if points.shape[0] != values.shape[0]:
        raise GameError(f"{points.shape[0]} points but {values.shape[0]} fitnesses")
    return coverage_in_box(points, values, points.min(axis=0), points.max(axis=0), grid_n)


def coverage_in_box(
    points: np.ndarray, fitnesses: np.ndarray, low: np.ndarray, high: np.ndarray, grid_n: int = GRID_SIZE
) -> Tuple[float, float]:
    """Same as ``coverage_qdscore`` but on a given box, so several point sets
    share one grid."""
    span = np.where(high > low, high - low, 1.0)
    bins = np.floor((points - low) / span * grid_n).astype(np.int64)
    bins = np.clip(bins, 0, grid_n - 1)
    best: Dict[Tuple[int, int], float] = {}
    for (bx, by), f in zip(bins.tolist(), fitnesses.tolist()):
        key = (bx, by)
        if key not in best or f > best[key]:
            best[key] = f
    coverage = len(best) / float(grid_n * grid_n)
    qd_score = float(np.mean(sorted(best.values())))
    return coverage, qd_score


def ranking_vector(fitness_row: Sequence[float]) -> Tuple[int, ...]:
    """Reference indices from best to worst for one solution, ties by index."""
    return tuple(sorted(range(len(fitness_row)), key=lambda j: (-fitness_row[j], j)))


def ranking_novelty(per_generation: Sequence[Sequence[Tuple[int, ...]]]) -> List[float]:
    """Fraction of each generation's ranking vectors unseen in the previous one.

    The first generation is compared with itself, so it scores 0.
    """
    fractions: List[float] = []
    for index, rankings in enumerate(per_generation):
        previous = per_generation[index - 1] if index > 0 else rankings
        if rankings and previous and len(rankings[0]) != len(previous[0]):
            raise GameError("ranking vectors over different reference sets")
        seen = set(map(tuple, previous))
        new = sum(1 for r in rankings if tuple(r) not in seen)
        fractions.append(new / len(rankings) if rankings else 0.0)
    return fractions


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    if len(x) != len(y) or len(x) < 2:
        raise GameError(f"spearman needs two equal-length lists of at least 2, got {len(x)} and {len(y)}")
    rx, ry = rankdata(x), rankdata(y)
    rx, ry = rx - rx.mean(), ry - ry.mean()
    denom = float(np.sqrt((rx * rx).sum() * (ry * ry).sum()))
    if denom == 0.0:
        raise GameError("spearman of a constant list")
    return float((rx * ry).sum() / denom)


def action_entropy(trace: Iterable[Iterable[str]]) -> float:
    """Shannon entropy in bits of the action categories over all steps and units."""
    counts = Counter(action for step in trace for action in step)
    total = sum(counts.values())
    if total == 0:
        return 0.0
    p = np.array([counts[c] for c in sorted(counts)], dtype=np.float64) / total
    return float(-(p * np.log2(p)).sum() + 0.0)


def action_distribution(trace: Iterable[Iterable[str]]) -> Dict[str, float]:
    counts = Counter(action for step in trace for action in step)
    total = sum(counts.values()) or 1
    return {c: counts[c] / total for c in ACTION_CATEGORIES}


def _qualifiers(leaf: Leaf) -> Iterable[Tuple[str, str]]:
    if leaf.name == "attack" and leaf.params:
        yield "attack", leaf.params[0]
    elif leaf.name == "goto" and leaf.params:
        yield "goto", leaf.params[0]


def atomic_usage(trees: Sequence[Node]) -> Dict[Tuple[str, str], float]:
    """Fraction of trees containing each (atomic, qualifier) combination,
    for the attack target and the goto threshold."""
    if not trees:
        return {}
    counts: Counter = Counter()
    for tree in trees:
        present = set()
        for _, node in iter_paths(tree):
            if isinstance(node, Leaf):
                present.update(_qualifiers(node))
        counts.update(present)
    return {key: counts[key] / len(trees) for key in sorted(counts)}


def selection_overlap(selected_a: Sequence[int], selected_b: Sequence[int]) -> float:
    """|A ∩ B| / |A| over distinct solution ids."""
    a, b = set(selected_a), set(selected_b)
    if not a:
        raise GameError("overlap of an empty selection")
    return len(a & b) / len(a)
