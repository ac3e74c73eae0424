from typing import Optional, Set

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.domains.services.behavior_tree import (
    STAND,
    Action,
    Composite,
    Leaf,
    bt_tick,
    depth,
    format_tree,
    insert_at,
    is_valid_tree,
    leaf_count,
    node_count,
    parse_tree,
    random_tree,
    replace_at,
)
from src.utils.errors import DomainError

TEXT = "(failwith (sequence (is_type melee) (attack weakest any)) (move toward enemy closest any))"


class FakeView:
    """Conditions listed in ``true`` hold; actions listed in ``ready`` resolve."""

    def __init__(self, true: Set[str], ready: Set[str]):
        self.true = true
        self.ready = ready

    def check(self, leaf: Leaf) -> bool:
        return leaf.name in self.true

    def resolve(self, leaf: Leaf) -> Optional[Action]:
        return Action(leaf.name) if leaf.name in self.ready or leaf.name == "stand" else None


def test_text_form_round_trips():
    tree = parse_tree(TEXT)
    assert format_tree(tree) == TEXT
    assert isinstance(tree, Composite) and tree.kind == "failwith"
    assert leaf_count(tree) == 3
    assert node_count(tree) == 5
    assert depth(tree) == 3


def test_parse_tolerates_whitespace():
    assert parse_tree("  ( stand )\n") == Leaf("stand")


@pytest.mark.parametrize(
    "text",
    [
        "",
        "stand",
        "(stand",
        "(stand))",
        "(stand) (stand)",
        "(sequence)",
        "(jump)",
        "(attack closest)",
        "(attack nearest any)",
        "(goto 30)",
        "(sequence (stand) oops)",
    ],
)
def test_parse_rejects_malformed_trees(text):
    with pytest.raises(DomainError):
        parse_tree(text)


def test_leaf_limit():
    text = "(sequence " + " ".join(["(stand)"] * 5) + ")"
    assert is_valid_tree(parse_tree(text))
    with pytest.raises(DomainError):
        parse_tree(text, max_leaves=4)


def test_replace_removes_emptied_composites():
    tree = parse_tree("(sequence (failwith (stand)) (goto 50))")
    pruned = replace_at(tree, (0, 0), None)
    assert format_tree(pruned) == "(sequence (goto 50))"
    assert replace_at(parse_tree("(sequence (stand))"), (0,), None) is None


def test_insert_at():
    tree = parse_tree("(sequence (stand))")
    grown = insert_at(tree, (), 0, Leaf("is_set_target"))
    assert format_tree(grown) == "(sequence (is_set_target) (stand))"
    assert format_tree(tree) == "(sequence (stand))"


def test_tick_sequence_runs_while_conditions_hold():
    tree = parse_tree(TEXT)
    assert bt_tick(tree, FakeView({"is_type"}, {"attack", "move"})) == Action("attack")
    # melee check fails: sequence aborts, failwith tries the move
    assert bt_tick(tree, FakeView(set(), {"attack", "move"})) == Action("move")
    assert bt_tick(tree, FakeView(set(), set())) == STAND


def test_tick_failwith_stops_at_first_valid_condition():
    tree = parse_tree("(failwith (in_sight enemy any) (attack closest any))")
    assert bt_tick(tree, FakeView({"in_sight"}, {"attack"})) == STAND
    assert bt_tick(tree, FakeView(set(), {"attack"})) == Action("attack")


def test_tick_skips_inapplicable_actions_in_sequence():
    tree = parse_tree("(sequence (goto 0) (stand))")
    assert bt_tick(tree, FakeView(set(), set())) == STAND


@settings(max_examples=60)
@given(st.integers(0, 2**32 - 1))
def test_random_trees_respect_bounds(seed):
    tree = random_tree(np.random.default_rng(seed))
    assert is_valid_tree(tree)
    assert depth(tree) <= 3
    assert 1 <= leaf_count(tree) <= 8
    assert parse_tree(format_tree(tree)) == tree
