"""Behavior trees shared by every unit of one skirmish side.

Trees are immutable; variation builds new trees through path-based edits.
Text form is an s-expression, for example::

    (failwith (attack closest any) (move toward enemy closest any))
"""

import re
from dataclasses import dataclass
from typing import Iterator, List, Optional, Protocol, Tuple, Union

import numpy as np

from src.static_values import (
    ACTION_CATALOG,
    BT_MAX_LEAVES,
    BT_RANDOM_MAX_DEPTH,
    BT_RANDOM_MAX_LEAVES,
    CONDITION_CATALOG,
)
from src.utils.errors import DomainError

SEQUENCE = "sequence"
FAILWITH = "failwith"
COMPOSITES = (SEQUENCE, FAILWITH)


@dataclass(frozen=True)
class Leaf:
    name: str
    params: Tuple[str, ...] = ()

    @property
    def is_action(self) -> bool:
        return self.name in ACTION_CATALOG


@dataclass(frozen=True)
class Composite:
    kind: str
    children: Tuple["Node", ...]


Node = Union[Leaf, Composite]
Path = Tuple[int, ...]


@dataclass(frozen=True)
class Action:
    """What a unit does this step. ``category`` is the atomic's name."""

    category: str
    # opposing or allied unit (side-local index) for attack/move/set_target
    unit: Optional[int] = None
    # grid step for move/goto
    step: Tuple[int, int] = (0, 0)
    # marked position for set_target
    position: Optional[Tuple[int, int]] = None


STAND = Action("stand")


class Observation(Protocol):
    """The acting unit's local view, as needed by the tree walk."""

    def check(self, leaf: Leaf) -> bool: ...

    def resolve(self, leaf: Leaf) -> Optional[Action]:
        """The action if applicable, else None."""
        ...


# --- structure ---


def iter_paths(node: Node, path: Path = ()) -> Iterator[Tuple[Path, Node]]:
    """Preorder walk."""
    yield path, node
    if isinstance(node, Composite):
        for i, child in enumerate(node.children):
            yield from iter_paths(child, path + (i,))


def leaf_count(node: Node) -> int:
    return sum(1 for _, n in iter_paths(node) if isinstance(n, Leaf))


def node_count(node: Node) -> int:
    return sum(1 for _ in iter_paths(node))


def depth(node: Node) -> int:
    if isinstance(node, Leaf):
        return 1
    return 1 + max(depth(c) for c in node.children)


def get_node(node: Node, path: Path) -> Node:
    for i in path:
        assert isinstance(node, Composite)
        node = node.children[i]
    return node


def replace_at(node: Node, path: Path, new: Optional[Node]) -> Optional[Node]:
    """Copy of ``node`` with the subtree at ``path`` replaced (or removed when
    ``new`` is None). Composites left without children are removed as well."""
    if not path:
        return new
    assert isinstance(node, Composite)
    head, rest = path[0], path[1:]
    child = replace_at(node.children[head], rest, new)
    children = list(node.children)
    if child is None:
        del children[head]
    else:
        children[head] = child
    if not children:
        return None
    return Composite(node.kind, tuple(children))


def insert_at(node: Node, path: Path, index: int, new: Node) -> Node:
    target = get_node(node, path)
    assert isinstance(target, Composite)
    children = list(target.children)
    children.insert(index, new)
    updated = replace_at(node, path, Composite(target.kind, tuple(children)))
    assert updated is not None
    return updated


def validate_tree(node: Node, max_leaves: int = BT_MAX_LEAVES) -> None:
    for _, n in iter_paths(node):
        if isinstance(n, Composite):
            if n.kind not in COMPOSITES:
                raise DomainError(f"unknown control node {n.kind!r}")
            if not n.children:
                raise DomainError(f"empty {n.kind} node")
            continue
        catalog = ACTION_CATALOG if n.name in ACTION_CATALOG else CONDITION_CATALOG
        if n.name not in catalog:
            raise DomainError(f"unknown atomic {n.name!r}")
        domains = catalog[n.name]
        if len(n.params) != len(domains):
            raise DomainError(f"{n.name} takes {len(domains)} qualifiers, got {len(n.params)}")
        for value, allowed in zip(n.params, domains):
            if value not in allowed:
                raise DomainError(f"{n.name}: qualifier {value!r} not in {allowed}")
    leaves = leaf_count(node)
    if leaves > max_leaves:
        raise DomainError(f"tree has {leaves} leaves, limit is {max_leaves}")


def is_valid_tree(node: Node, max_leaves: int = BT_MAX_LEAVES) -> bool:
    try:
        validate_tree(node, max_leaves)
    except DomainError:
        return False
    return True


# --- text form ---

_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def format_tree(node: Node) -> str:
    if isinstance(node, Leaf):
        return "(" + " ".join((node.name,) + node.params) + ")"
    return "(" + " ".join([node.kind] + [format_tree(c) for c in node.children]) + ")"


def parse_tree(text: str, max_leaves: int = BT_MAX_LEAVES) -> Node:
    tokens = _TOKEN.findall(text)
    if not tokens:
        raise DomainError("empty behavior tree text")
    pos = 0

    def parse() -> Node:
        nonlocal pos
        if pos >= len(tokens) or tokens[pos] != "(":
            raise DomainError(f"expected '(' at token {pos} of {text!r}")
        pos += 1
        if pos >= len(tokens) or tokens[pos] in "()":
            raise DomainError(f"expected a node name at token {pos} of {text!r}")
        name = tokens[pos]
        pos += 1
        if name in COMPOSITES:
            children: List[Node] = []
            while pos < len(tokens) and tokens[pos] == "(":
                children.append(parse())
            node: Node = Composite(name, tuple(children))
        else:
            params: List[str] = []
            while pos < len(tokens) and tokens[pos] not in "()":
                params.append(tokens[pos])
                pos += 1
            node = Leaf(name, tuple(params))
        if pos >= len(tokens) or tokens[pos] != ")":
            raise DomainError(f"unbalanced parentheses in {text!r}")
        pos += 1
        return node

    tree = parse()
    if pos != len(tokens):
        raise DomainError(f"trailing tokens after tree in {text!r}")
    validate_tree(tree, max_leaves)
    return tree


# --- evaluation ---


def _walk(node: Node, observation: Observation) -> Tuple[bool, Optional[Action]]:
    if isinstance(node, Leaf):
        if node.is_action:
            action = observation.resolve(node)
            return action is not None, action
        return observation.check(node), None
    for child in node.children:
        valid, action = _walk(child, observation)
        if action is not None:
            return True, action
        # sequence stops at the first invalid child, failwith at the first valid one
        if node.kind == SEQUENCE and not valid:
            return False, None
        if node.kind == FAILWITH and valid:
            return True, None
    return node.kind == SEQUENCE, None


def bt_tick(tree: Node, observation: Observation) -> Action:
    """Leftmost depth-first walk to the first valid action; Stand if none."""
    _, action = _walk(tree, observation)
    return action if action is not None else STAND


# --- random trees ---


def random_leaf(rng: np.random.Generator) -> Leaf:
    catalog = ACTION_CATALOG if rng.random() < 0.5 else CONDITION_CATALOG
    names = sorted(catalog)
    name = names[int(rng.integers(len(names)))]
    params = tuple(domain[int(rng.integers(len(domain)))] for domain in catalog[name])
    return Leaf(name, params)


def random_tree(
    rng: np.random.Generator,
    max_depth: int = BT_RANDOM_MAX_DEPTH,
    max_leaves: int = BT_RANDOM_MAX_LEAVES,
) -> Node:
    """Random tree with depth <= max_depth (a lone leaf has depth 1) and
    between 1 and max_leaves leaves."""

    def grow(level: int, budget: int) -> Node:
        if level >= max_depth or budget < 2 or rng.random() < 0.3:
            return random_leaf(rng)
        kind = COMPOSITES[int(rng.integers(2))]
        n_children = int(rng.integers(2, min(4, budget) + 1))
        children: List[Node] = []
        for i in range(n_children):
            # leave at least one leaf for each child still to come
            share = budget - (n_children - i - 1)
            child = grow(level + 1, share)
            budget -= leaf_count(child)
            children.append(child)
        return Composite(kind, tuple(children))

    return grow(1, max_leaves)
