"""Turn duel outcomes into behavior vectors.

The frame embedder average-pools each frame on a d x d grid and L2-normalizes
the result; ``describe`` concatenates f such blocks. Other descriptors read
positions, outcome statistics or the genome straight from the outcome.
"""

from typing import List, Sequence, Tuple

import numpy as np

from src.archive.schema import BehaviorVector
from src.behavior.schema import DescriptorKind, DescriptorSpec, Frame
from src.domains.schema import Domain, DuelOutcome, Side
from src.storage.services.embeddings import cached_embeddings
from src.utils.errors import BehaviorError


def subsample_indices(length: int, count: int) -> List[int]:
    """round(j * (length - 1) / (count - 1)), halves rounded away from zero.

    A single sample takes the last index.
    """
    if length < 1:
        raise BehaviorError("cannot subsample an empty sequence")
    if count < 1 or count > length:
        raise BehaviorError(f"cannot pick {count} of {length} items")
    if count == 1:
        return [length - 1]
    den = count - 1
    # integer form of floor(x + 0.5) for x = j * (length - 1) / den >= 0
    return [(2 * j * (length - 1) + den) // (2 * den) for j in range(count)]


def subsample_frames(video: Sequence[Frame], count: int) -> List[Frame]:
    return [video[i] for i in subsample_indices(len(video), count)]


def pool_embed(frame: Frame, d: int) -> np.ndarray:
    if d < 1:
        raise BehaviorError("pool size must be positive")
    if d > min(frame.width, frame.height):
        raise BehaviorError(f"pool size {d} exceeds frame size {frame.width}x{frame.height}")
    rows = [(i * frame.height) // d for i in range(d + 1)]
    cols = [(i * frame.width) // d for i in range(d + 1)]
    pooled = np.empty(d * d)
    for r in range(d):
        for c in range(d):
            pooled[r * d + c] = frame.pixels[rows[r] : rows[r + 1], cols[c] : cols[c + 1]].mean()
    norm = float(np.linalg.norm(pooled))
    if norm == 0.0:
        # blank frame sentinel
        sentinel = np.zeros(d * d)
        sentinel[0] = 1.0
        return sentinel
    return pooled / norm


def _positions(outcome: DuelOutcome, spec: DescriptorSpec, side: Side) -> np.ndarray:
    if side not in outcome.positions:
        raise BehaviorError(f"outcome has no positions for {side.value}")
    track = outcome.positions[side]
    scale = np.asarray(outcome.arena_size, dtype=np.float64)
    picked = [track[i] / scale for i in subsample_indices(track.shape[0], spec.num_timesteps)]
    return np.concatenate([p.ravel() for p in picked])


def describe(outcome: DuelOutcome, spec: DescriptorSpec, side: Side) -> BehaviorVector:
    """Behavior of ``side`` in one duel under the descriptor ``spec``."""
    kind = spec.kind
    if kind is DescriptorKind.FRAME_EMBEDDING:
        if not outcome.frames:
            raise BehaviorError("outcome has no frames")
        blocks = [pool_embed(f, spec.pool_size) for f in subsample_frames(outcome.frames, spec.num_frames)]
        values = np.concatenate(blocks)
    elif kind is DescriptorKind.POSITIONS:
        values = _positions(outcome, spec, side)
    elif kind is DescriptorKind.HANDCRAFTED_SKIRMISH:
        if side not in outcome.remaining_health:
            raise BehaviorError("outcome has no health statistics")
        values = np.array([outcome.remaining_health[side], outcome.completion_time / outcome.max_steps])
    elif kind is DescriptorKind.GENOME_STATS:
        if side not in outcome.genomes:
            raise BehaviorError("outcome carries no integer genome")
        genome = np.asarray(outcome.genomes[side], dtype=np.float64)
        values = np.array([genome.mean(), genome.std()])
    else:
        table = cached_embeddings(str(spec.path))
        if outcome.key not in table:
            raise BehaviorError(f"evaluation key {outcome.key} is missing from {spec.path}")
        values = table[outcome.key].astype(np.float64)
    return BehaviorVector(values, spec.distance_kind)


def descriptor_bounds(spec: DescriptorSpec, domain: Domain) -> Tuple[np.ndarray, np.ndarray]:
    """Per-entry box that every vector of this descriptor lies in."""
    kind = spec.kind
    if kind is DescriptorKind.FRAME_EMBEDDING:
        size = spec.num_frames * spec.pool_size**2
        return np.zeros(size), np.ones(size)
    if kind is DescriptorKind.POSITIONS:
        units, axes = domain.position_shape
        size = spec.num_timesteps * units * axes
        return np.zeros(size), np.ones(size)
    if kind is DescriptorKind.HANDCRAFTED_SKIRMISH:
        return np.zeros(2), np.ones(2)
    if kind is DescriptorKind.GENOME_STATS:
        if domain.genome_range is None:
            raise BehaviorError(f"domain {domain.name} has no integer genome")
        low, high = domain.genome_range
        return np.array([low, 0.0]), np.array([high, (high - low) / 2.0])
    table = cached_embeddings(str(spec.path))
    if not table:
        raise BehaviorError(f"{spec.path} holds no embeddings")
    stacked = np.stack(list(table.values())).astype(np.float64)
    return stacked.min(axis=0), stacked.max(axis=0)
