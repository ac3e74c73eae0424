from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.domains.services.behavior_tree import Leaf, format_tree, is_valid_tree, leaf_count, parse_tree, random_tree
from src.domains.services.bt_variation import apply_operator, bt_variation, draw_operator, safe_deletion
from src.static_values import BT_OPERATOR_PROBABILITIES


def test_operator_frequencies():
    rng = np.random.default_rng(0)
    draws = Counter(draw_operator(rng) for _ in range(100_000))
    for operator, p in BT_OPERATOR_PROBABILITIES.items():
        assert draws[operator] / 100_000 == pytest.approx(p, abs=0.01)


def test_mutate_changes_exactly_one_qualifier_or_flips_a_composite():
    rng = np.random.default_rng(5)
    tree = parse_tree("(attack closest any)")
    for _ in range(20):
        child = apply_operator("mutate", tree, tree, rng)
        assert child is not None
        assert child.name == "attack"
        assert sum(a != b for a, b in zip(child.params, tree.params)) == 1


def test_delete_cannot_remove_the_root():
    rng = np.random.default_rng(1)
    assert apply_operator("delete", Leaf("stand"), Leaf("stand"), rng) is None


def test_crossover_grafts_donor_material():
    rng = np.random.default_rng(2)
    tree = parse_tree("(sequence (stand) (stand))")
    donor = parse_tree("(goto 75)")
    child = apply_operator("crossover", tree, donor, rng)
    assert child is not None
    assert "(goto 75)" in format_tree(child)


def test_operators_reject_oversized_children():
    rng = np.random.default_rng(3)
    tree = parse_tree("(sequence (stand) (stand))")
    for _ in range(10):
        assert apply_operator("add", tree, tree, rng, max_leaves=2) is None


def test_unknown_operator():
    with pytest.raises(ValueError):
        apply_operator("swap", Leaf("stand"), Leaf("stand"), np.random.default_rng(0))


def test_safe_deletion():
    rng = np.random.default_rng(4)
    assert leaf_count(safe_deletion(parse_tree("(sequence (stand) (goto 0))"), rng)) == 1
    # nothing to mutate on a parameterless lone leaf
    assert safe_deletion(Leaf("stand"), rng) == Leaf("stand")


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 12))
def test_children_are_always_valid(seed, max_leaves):
    rng = np.random.default_rng(seed)
    first = random_tree(rng, max_leaves=min(8, max_leaves))
    second = random_tree(rng, max_leaves=min(8, max_leaves))
    for _ in range(5):
        child, tag = bt_variation(first, second, rng, max_leaves)
        assert tag in ("mutation", "crossover")
        assert is_valid_tree(child, max_leaves)
        first = child
