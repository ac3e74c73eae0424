import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.domains.schema import PusherParams, Side
from src.domains.services.pusher import (
    PusherDomain,
    apply_sub_operation,
    body_length,
    body_mass,
    decode_genome,
    encode_genome,
    is_valid_genome,
    pusher_evaluate,
    pusher_variation,
    random_genome,
)
from src.utils.errors import DomainError

BASE = (0, 0, 3, 1, 1, 0, 0, 0, 0)

genomes = st.integers(0, 2**32 - 1).map(lambda s: random_genome(np.random.default_rng(s)))


@pytest.mark.parametrize(
    "genome,valid",
    [
        (BASE, True),
        ((4, 0, 0, 0, 0, 0, 0, 0, 0), True),
        ((3, 0, 3, 0, 0, 0, 0, 0, 0), False),
        ((1, 1, 1, 0, 0, 0, 0, 0, 0), False),
        ((0,) * 9, False),
        ((3,) * 8, False),
        ((7, 0, 0, 0, 0, 0, 0, 0, 0), False),
    ],
)
def test_genome_constraints(genome, valid):
    assert is_valid_genome(genome) is valid


def test_body_mass_and_length():
    assert body_mass(BASE) == 5.0
    assert body_length(BASE) == 3


@pytest.mark.parametrize(
    "operation,position,value,expected",
    [
        ("add", 5, 2, (0, 0, 3, 1, 1, 2, 0, 0, 0)),
        ("add", 7, 2, None),
        ("add", 2, 2, None),
        ("delete", 2, 0, None),
        ("delete", 4, 0, (0, 0, 3, 1, 0, 0, 0, 0, 0)),
        ("mutate", 3, 1, None),
        ("mutate", 3, 5, (0, 0, 3, 5, 1, 0, 0, 0, 0)),
        ("mutate", 0, 5, None),
    ],
)
def test_sub_operations(operation, position, value, expected):
    assert apply_sub_operation(BASE, operation, position, value) == expected


def test_unknown_sub_operation():
    with pytest.raises(ValueError):
        apply_sub_operation(BASE, "swap", 0, 1)


def test_codec():
    assert encode_genome(BASE) == "0 0 3 1 1 0 0 0 0"
    assert decode_genome("0 0 3 1 1 0 0 0 0") == BASE
    for payload in ("0 0 x", "0 0 0 0 0 0 0 0 0", "3 3"):
        with pytest.raises(DomainError):
            decode_genome(payload)


@settings(max_examples=40, deadline=None)
@given(genomes, genomes)
def test_fitnesses_sum_to_one(red, blue):
    outcome = pusher_evaluate(red, blue, PusherParams(max_steps=30))
    assert outcome.fitness_red + outcome.fitness_blue == 1.0
    assert 0.0 <= outcome.fitness_red <= 1.0


@settings(max_examples=20, deadline=None)
@given(genomes)
def test_mirror_match_is_a_tie(genome):
    outcome = pusher_evaluate(genome, genome, PusherParams(max_steps=30))
    assert outcome.fitness_red == outcome.fitness_blue == 0.5
    assert outcome.winner is None
    assert outcome.mean_speed[Side.RED] == outcome.mean_speed[Side.BLUE]


def test_outcome_layout():
    params = PusherParams(max_steps=15)
    outcome = pusher_evaluate(BASE, (0, 0, 0, 0, 5, 5, 2, 0, 0), params)
    assert len(outcome.frames) == 16
    assert outcome.frames[0].width == params.arena_width
    assert outcome.frames[0].height == params.frame_height
    assert outcome.positions[Side.RED].shape == (16, 1, 1)
    assert outcome.genomes[Side.BLUE].tolist() == [0, 0, 0, 0, 5, 5, 2, 0, 0]
    assert outcome.completion_time == outcome.max_steps == 15
    for side in (Side.RED, Side.BLUE):
        track = outcome.positions[side].ravel()
        assert np.all((track >= 0.0) & (track <= params.arena_width))


@settings(max_examples=60, deadline=None)
@given(genomes, st.integers(0, 2**32 - 1), st.integers(0, 5))
def test_variation_stays_valid_and_local(genome, seed, mutations):
    child = pusher_variation(genome, np.random.default_rng(seed), mutations)
    assert is_valid_genome(child)
    assert sum(a != b for a, b in zip(child, genome)) <= mutations


def test_domain_surface():
    domain = PusherDomain()
    rng = np.random.default_rng(0)
    genome = domain.random_solution(Side.RED, rng)
    child, tag = domain.variation(genome, genome, rng)
    assert tag == "mutation"
    assert domain.is_valid(child)
    assert domain.decode(domain.encode(child)) == child
    assert domain.solution_size(BASE) == 3
