import numpy as np
import pytest

from src.archive.schema import DistanceKind
from src.behavior.schema import DescriptorKind, DescriptorSpec, Frame
from src.behavior.services.descriptors import (
    describe,
    descriptor_bounds,
    pool_embed,
    subsample_frames,
    subsample_indices,
)
from src.domains.schema import DuelOutcome, Side
from src.domains.services.pusher import PusherDomain
from src.storage.services.embeddings import write_external_embeddings
from src.utils.errors import BehaviorError


def outcome(**overrides) -> DuelOutcome:
    fields = dict(
        fitness_red=0.5,
        fitness_blue=0.5,
        frames=[Frame(np.full((4, 4), 0.3)), Frame(np.full((4, 4), 0.6))],
        completion_time=32,
        max_steps=64,
        winner=None,
        positions={},
        arena_size=(10, 20),
    )
    fields.update(overrides)
    return DuelOutcome(**fields)


@pytest.mark.parametrize(
    "length,count,expected",
    [
        (10, 4, [0, 3, 6, 9]),
        (6, 4, [0, 2, 3, 5]),
        (4, 3, [0, 2, 3]),
        (5, 1, [4]),
        (3, 3, [0, 1, 2]),
    ],
)
def test_subsample_indices(length, count, expected):
    assert subsample_indices(length, count) == expected


@pytest.mark.parametrize("length,count", [(0, 1), (3, 4), (3, 0)])
def test_subsample_rejects_impossible_requests(length, count):
    with pytest.raises(BehaviorError):
        subsample_indices(length, count)


def test_subsample_frames_keeps_order():
    frames = [Frame(np.full((2, 2), i / 10)) for i in range(7)]
    picked = subsample_frames(frames, 3)
    assert [f.pixels[0, 0] for f in picked] == [0.0, 0.3, 0.6]


def test_pool_embed_averages_blocks_and_normalizes():
    pixels = np.zeros((4, 4))
    pixels[:2, :2] = 1.0
    pixels[2:, 2:] = 0.5
    embedded = pool_embed(Frame(pixels), 2)
    expected = np.array([1.0, 0.0, 0.0, 0.5]) / np.linalg.norm([1.0, 0.0, 0.0, 0.5])
    assert np.allclose(embedded, expected)
    assert np.linalg.norm(embedded) == pytest.approx(1.0)


def test_pool_embed_uneven_blocks():
    # 3 columns into 2 buckets: [0, 1) and [1, 3)
    pixels = np.array([[0.9, 0.0, 0.0], [0.9, 0.0, 0.0]])
    embedded = pool_embed(Frame(pixels), 2)
    assert np.allclose(embedded, [2**-0.5, 0.0, 2**-0.5, 0.0])


def test_blank_frame_gets_sentinel():
    assert pool_embed(Frame(np.zeros((4, 4))), 2).tolist() == [1.0, 0.0, 0.0, 0.0]


def test_pool_larger_than_frame():
    with pytest.raises(BehaviorError):
        pool_embed(Frame(np.zeros((2, 8))), 3)


def test_uniform_frames_lose_their_intensity():
    spec = DescriptorSpec(pool_size=1, num_frames=2)
    b = describe(outcome(), spec, Side.RED)
    assert b.values.tolist() == [1.0, 1.0]
    assert b.distance_kind is DistanceKind.COSINE


def test_positions_are_normalized_by_arena():
    track = np.arange(10, dtype=np.float64).reshape(5, 1, 2)
    spec = DescriptorSpec(kind=DescriptorKind.POSITIONS, num_timesteps=3)
    b = describe(outcome(positions={Side.BLUE: track}), spec, Side.BLUE)
    # steps 0, 2 and 4; x over 10, y over 20
    assert np.allclose(b.values, [0.0, 0.05, 0.4, 0.25, 0.8, 0.45])
    with pytest.raises(BehaviorError):
        describe(outcome(), spec, Side.RED)


def test_handcrafted_skirmish_descriptor():
    spec = DescriptorSpec(kind=DescriptorKind.HANDCRAFTED_SKIRMISH)
    b = describe(outcome(remaining_health={Side.RED: 0.25}), spec, Side.RED)
    assert b.values.tolist() == [0.25, 0.5]
    assert b.distance_kind is DistanceKind.EUCLIDEAN


def test_genome_stats_descriptor():
    spec = DescriptorSpec(kind=DescriptorKind.GENOME_STATS)
    b = describe(outcome(genomes={Side.BLUE: np.array([1, 3, 1, 3])}), spec, Side.BLUE)
    assert b.values.tolist() == [2.0, 1.0]


def test_external_descriptor_looks_up_the_key(tmp_path):
    path = tmp_path / "table.gemb"
    write_external_embeddings(path, {7: np.array([0.5, 0.25]), 9: np.array([1.0, 0.0])})
    spec = DescriptorSpec(kind=DescriptorKind.EXTERNAL, path=path)
    assert describe(outcome(key=7), spec, Side.RED).values.tolist() == [0.5, 0.25]
    with pytest.raises(BehaviorError):
        describe(outcome(key=8), spec, Side.RED)
    low, high = descriptor_bounds(spec, PusherDomain())
    assert low.tolist() == [0.5, 0.0]
    assert high.tolist() == [1.0, 0.25]


def test_bounds():
    domain = PusherDomain()
    low, high = descriptor_bounds(DescriptorSpec(pool_size=2, num_frames=3), domain)
    assert low.shape == high.shape == (12,)
    low, high = descriptor_bounds(DescriptorSpec(kind=DescriptorKind.POSITIONS, num_timesteps=4), domain)
    assert high.shape == (4,)
    low, high = descriptor_bounds(DescriptorSpec(kind=DescriptorKind.GENOME_STATS), domain)
    assert low.tolist() == [0.0, 0.0]
    assert high.tolist() == [6.0, 3.0]


def test_pusher_frames_fit_the_default_embedder():
    domain = PusherDomain()
    rng = np.random.default_rng(1)
    red, blue = domain.random_solution(Side.RED, rng), domain.random_solution(Side.BLUE, rng)
    b = describe(domain.evaluate(red, blue), DescriptorSpec(), Side.RED)
    assert len(b) == 5 * 64
