from typing import Any, List, Optional, Tuple

import numpy as np

from src.domains.services.behavior_tree import (
    COMPOSITES,
    Composite,
    Leaf,
    Node,
    Path,
    insert_at,
    is_valid_tree,
    iter_paths,
    random_leaf,
    replace_at,
)
from src.static_values import ACTION_CATALOG, BT_MAX_LEAVES, BT_OPERATOR_PROBABILITIES, BT_REDRAWS, CONDITION_CATALOG

OPERATORS = tuple(BT_OPERATOR_PROBABILITIES)
_PROBABILITIES = np.array([BT_OPERATOR_PROBABILITIES[o] for o in OPERATORS])


def draw_operator(rng: np.random.Generator) -> str:
    return OPERATORS[int(rng.choice(len(OPERATORS), p=_PROBABILITIES))]


def _pick(rng: np.random.Generator, items: List[Any]) -> Any:
    return items[int(rng.integers(len(items)))]


def _delete(tree: Node, rng: np.random.Generator) -> Optional[Node]:
    paths = [p for p, _ in iter_paths(tree) if p]
    if not paths:
        return None
    return replace_at(tree, _pick(rng, paths), None)


def _add(tree: Node, rng: np.random.Generator) -> Optional[Node]:
    path, node = _pick(rng, list(iter_paths(tree)))
    leaf = random_leaf(rng)
    if isinstance(node, Composite):
        return insert_at(tree, path, int(rng.integers(len(node.children) + 1)), leaf)
    pair = (node, leaf) if rng.random() < 0.5 else (leaf, node)
    return replace_at(tree, path, Composite(COMPOSITES[int(rng.integers(2))], pair))


def _mutate(tree: Node, rng: np.random.Generator) -> Optional[Node]:
    path, node = _pick(rng, list(iter_paths(tree)))
    if isinstance(node, Composite):
        flipped = COMPOSITES[1] if node.kind == COMPOSITES[0] else COMPOSITES[0]
        return replace_at(tree, path, Composite(flipped, node.children))
    catalog = ACTION_CATALOG if node.is_action else CONDITION_CATALOG
    domains = catalog[node.name]
    if not domains:
        return None
    slot = int(rng.integers(len(domains)))
    choices = [v for v in domains[slot] if v != node.params[slot]]
    params = list(node.params)
    params[slot] = _pick(rng, choices)
    return replace_at(tree, path, Leaf(node.name, tuple(params)))


def _replace(tree: Node, rng: np.random.Generator) -> Optional[Node]:
    path, _ = _pick(rng, list(iter_paths(tree)))
    return replace_at(tree, path, random_leaf(rng))


def _crossover(tree: Node, donor: Node, rng: np.random.Generator) -> Optional[Node]:
    path, _ = _pick(rng, list(iter_paths(tree)))
    _, subtree = _pick(rng, list(iter_paths(donor)))
    return replace_at(tree, path, subtree)


def apply_operator(
    operator: str, tree: Node, donor: Node, rng: np.random.Generator, max_leaves: int = BT_MAX_LEAVES
) -> Optional[Node]:
    """One attempt of ``operator``; None when the attempt is infeasible."""
    if operator == "delete":
        child = _delete(tree, rng)
    elif operator == "add":
        child = _add(tree, rng)
    elif operator == "mutate":
        child = _mutate(tree, rng)
    elif operator == "replace":
        child = _replace(tree, rng)
    elif operator == "crossover":
        child = _crossover(tree, donor, rng)
    else:
        raise ValueError(f"unknown operator {operator!r}")
    if child is None or not is_valid_tree(child, max_leaves):
        return None
    return child


def safe_deletion(tree: Node, rng: np.random.Generator) -> Node:
    """Delete a random leaf; a lone leaf gets a parameter mutation instead."""
    if isinstance(tree, Leaf):
        for _ in range(BT_REDRAWS):
            mutated = _mutate(tree, rng)
            if mutated is not None:
                return mutated
        return tree
    leaves: List[Path] = [p for p, n in iter_paths(tree) if isinstance(n, Leaf)]
    child = replace_at(tree, _pick(rng, leaves), None)
    return child if child is not None else tree


def bt_variation(
    first: Node, second: Node, rng: np.random.Generator, max_leaves: int = BT_MAX_LEAVES
) -> Tuple[Node, str]:
    """Child of ``first`` (``second`` only feeds crossover) and its lineage tag."""
    operator = draw_operator(rng)
    tag = "crossover" if operator == "crossover" else "mutation"
    if operator == "delete" and isinstance(first, Leaf):
        # the only leaf cannot go
        operator = "mutate"
    for _ in range(BT_REDRAWS):
        child = apply_operator(operator, first, second, rng, max_leaves)
        if child is not None:
            return child, tag
    return safe_deletion(first, rng), "mutation"
