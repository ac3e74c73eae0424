"""Two voxel strips shoving each other on a line.

Each robot is a 1 x 9 genome; its body is the contiguous run of non-empty
cells. Positions are tracked as the distance travelled from the robot's own
wall, so both robots are simulated by the same formulas and mirrored
genomes tie exactly. The drive is passive: horizontal actuators push along
a sine wave, vertical actuators modulate grip.
"""

import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.behavior.schema import Frame
from src.domains.schema import DuelOutcome, PusherParams, Side
from src.static_values import (
    EMPTY,
    H_ANTI_PHASE,
    H_IN_PHASE,
    PUSHER_GENOME_LENGTH,
    PUSHER_REDRAWS,
    RIGID,
    RIGID_MASS,
    V_ANTI_PHASE,
    V_IN_PHASE,
    VOXEL_INTENSITY,
    VOXEL_TYPES,
)
from src.utils.checksum import fnv1a64
from src.utils.errors import DomainError

Genome = Tuple[int, ...]

SUB_OPERATIONS = ("add", "delete", "mutate")
HORIZONTAL = (H_IN_PHASE, H_ANTI_PHASE)
VERTICAL = (V_IN_PHASE, V_ANTI_PHASE)
ANTI_PHASE = (H_ANTI_PHASE, V_ANTI_PHASE)


def body_span(genome: Sequence[int]) -> Optional[Tuple[int, int]]:
    """[first, last) of the non-empty cells, None if they are not one run."""
    filled = [i for i, v in enumerate(genome) if v != EMPTY]
    if not filled:
        return None
    first, last = filled[0], filled[-1] + 1
    if last - first != len(filled):
        return None
    return first, last


def is_valid_genome(genome: Sequence[int]) -> bool:
    if len(genome) != PUSHER_GENOME_LENGTH:
        return False
    if any(not 0 <= v < VOXEL_TYPES for v in genome):
        return False
    if not any(v in HORIZONTAL or v in VERTICAL for v in genome):
        return False
    return body_span(genome) is not None


def body_mass(genome: Sequence[int]) -> float:
    return sum(RIGID_MASS if v == RIGID else 1.0 for v in genome if v != EMPTY)


def body_length(genome: Sequence[int]) -> int:
    return sum(1 for v in genome if v != EMPTY)


def _phase(value: int) -> float:
    return math.pi if value in ANTI_PHASE else 0.0


def drive_velocity(genome: Sequence[int], t: int, params: PusherParams) -> float:
    """Velocity toward the opponent at step ``t``, before walls and contact."""
    omega = 2.0 * math.pi * t / params.period
    push = sum(params.amplitude * math.sin(omega + _phase(v)) for v in genome if v in HORIZONTAL)
    vertical = [math.sin(omega + _phase(v)) for v in genome if v in VERTICAL]
    grip = 1.0 + (sum(vertical) / len(vertical) if vertical else 0.0)
    return push * grip / body_mass(genome)


def _render(genomes: Tuple[Genome, Genome], starts: Tuple[float, float], t: int, params: PusherParams) -> Frame:
    width, height = params.arena_width, params.frame_height
    pixels = np.zeros((height, width))
    omega = 2.0 * math.pi * t / params.period
    base = max(1, height // 2)
    for side_index, (genome, start) in enumerate(zip(genomes, starts)):
        span = body_span(genome)
        assert span is not None
        cells = genome[span[0] : span[1]]
        for j, v in enumerate(cells):
            col = min(width - 1, int(math.floor(start + j)))
            if side_index == 1:
                col = width - 1 - col
            h = base
            if v in VERTICAL:
                h = max(1, min(height, int(round(base * (1.0 + 0.5 * math.sin(omega + _phase(v)))))))
            column = pixels[height - h :, col]
            np.maximum(column, VOXEL_INTENSITY[v], out=column)
    return Frame(pixels)


def pusher_evaluate(red: Genome, blue: Genome, params: PusherParams) -> DuelOutcome:
    """Fitness is the share of steps spent strictly closer to the center, ties
    split evenly; the two fitnesses sum to exactly 1."""
    width = float(params.arena_width)
    genomes = (tuple(red), tuple(blue))
    lengths = [float(body_length(g)) for g in genomes]
    masses = [body_mass(g) for g in genomes]
    s = [0.0, 0.0]
    frames = [_render(genomes, (s[0], s[1]), 0, params)]
    tracks: List[List[float]] = [[s[0] + lengths[0] / 2.0], [width - s[1] - lengths[1] / 2.0]]
    speeds = [0.0, 0.0]
    closer = [0, 0]
    ties = 0

    for t in range(params.max_steps):
        v = [drive_velocity(g, t, params) for g in genomes]
        before = list(s)
        for i in range(2):
            s[i] = min(max(s[i] + v[i], 0.0), width - lengths[i])
        overlap = s[0] + lengths[0] + s[1] + lengths[1] - width
        if overlap > 0.0:
            momentum = [abs(masses[i] * v[i]) for i in range(2)]
            if momentum[0] == momentum[1]:
                back = [overlap / 2.0, overlap / 2.0]
            else:
                loser = 1 if momentum[0] > momentum[1] else 0
                back = [0.0, 0.0]
                back[loser] = overlap
            for i in range(2):
                moved = min(back[i], s[i])
                s[i] -= moved
                # a robot pinned at its wall passes the rest back to the pusher
                s[1 - i] -= back[i] - moved
        for i in range(2):
            speeds[i] += abs(s[i] - before[i])
        gaps = [abs(width / 2.0 - (s[i] + lengths[i] / 2.0)) for i in range(2)]
        if gaps[0] < gaps[1]:
            closer[0] += 1
        elif gaps[1] < gaps[0]:
            closer[1] += 1
        else:
            ties += 1
        tracks[0].append(s[0] + lengths[0] / 2.0)
        tracks[1].append(width - s[1] - lengths[1] / 2.0)
        frames.append(_render(genomes, (s[0], s[1]), t + 1, params))

    # divide for the larger share only; 1 - x is exact for x in [0.5, 1]
    denominator = 2 * params.max_steps
    scores = [2 * closer[i] + ties for i in range(2)]
    if scores[0] >= scores[1]:
        fitness_red = scores[0] / denominator
        fitness_blue = 1.0 - fitness_red
    else:
        fitness_blue = scores[1] / denominator
        fitness_red = 1.0 - fitness_blue

    winner = None
    if closer[0] != closer[1]:
        winner = Side.RED if closer[0] > closer[1] else Side.BLUE
    return DuelOutcome(
        fitness_red=fitness_red,
        fitness_blue=fitness_blue,
        frames=frames,
        completion_time=params.max_steps,
        max_steps=params.max_steps,
        winner=winner,
        positions={Side.RED: np.array(tracks[0]).reshape(-1, 1, 1), Side.BLUE: np.array(tracks[1]).reshape(-1, 1, 1)},
        arena_size=(params.arena_width,),
        key=fnv1a64(f"{encode_genome(red)}|{encode_genome(blue)}".encode()),
        genomes={Side.RED: np.array(red), Side.BLUE: np.array(blue)},
        mean_speed={Side.RED: speeds[0] / params.max_steps, Side.BLUE: speeds[1] / params.max_steps},
    )


def apply_sub_operation(genome: Genome, operation: str, position: int, value: int) -> Optional[Genome]:
    """One add/delete/mutate write; None if it breaks a genome constraint."""
    current = genome[position]
    if operation == "add":
        if current != EMPTY or value == EMPTY:
            return None
    elif operation == "delete":
        if current == EMPTY:
            return None
        value = EMPTY
    elif operation == "mutate":
        if current == EMPTY or value in (EMPTY, current):
            return None
    else:
        raise ValueError(f"unknown sub-operation {operation!r}")
    child = genome[:position] + (value,) + genome[position + 1 :]
    return child if is_valid_genome(child) else None


def pusher_variation(genome: Genome, rng: np.random.Generator, mutations: int) -> Genome:
    """``mutations`` sub-operations, each redrawn up to a fixed number of times
    and skipped when no feasible draw is found."""
    child = tuple(genome)
    for _ in range(mutations):
        operation = SUB_OPERATIONS[int(rng.integers(len(SUB_OPERATIONS)))]
        for _ in range(PUSHER_REDRAWS):
            position = int(rng.integers(len(child)))
            value = int(rng.integers(1, VOXEL_TYPES))
            candidate = apply_sub_operation(child, operation, position, value)
            if candidate is not None:
                child = candidate
                break
    return child


def random_genome(rng: np.random.Generator) -> Genome:
    while True:
        genome = tuple(int(v) for v in rng.integers(0, VOXEL_TYPES, size=PUSHER_GENOME_LENGTH))
        if is_valid_genome(genome):
            return genome


def encode_genome(genome: Sequence[int]) -> str:
    return " ".join(str(v) for v in genome)


def decode_genome(payload: str) -> Genome:
    try:
        genome = tuple(int(v) for v in payload.split())
    except ValueError as exc:
        raise DomainError(f"bad pusher genome {payload!r}") from exc
    if not is_valid_genome(genome):
        raise DomainError(f"invalid pusher genome {payload!r}")
    return genome


class PusherDomain:
    name = "pusher"
    genome_range = (0, VOXEL_TYPES - 1)
    position_shape = (1, 1)

    def __init__(self, params: Optional[PusherParams] = None):
        self.params = params or PusherParams()

    def random_solution(self, side: Side, rng: np.random.Generator) -> Genome:
        return random_genome(rng)

    def variation(self, first: Genome, second: Genome, rng: np.random.Generator) -> Tuple[Genome, str]:
        # no crossover in this domain
        return pusher_variation(first, rng, self.params.mutations), "mutation"

    def evaluate(self, red: Genome, blue: Genome) -> DuelOutcome:
        return pusher_evaluate(red, blue, self.params)

    def solution_size(self, solution: Genome) -> int:
        return body_length(solution)

    def encode(self, solution: Genome) -> str:
        return encode_genome(solution)

    def decode(self, payload: str) -> Genome:
        return decode_genome(payload)

    def is_valid(self, solution: Genome) -> bool:
        return is_valid_genome(solution)
