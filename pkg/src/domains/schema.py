from dataclasses import dataclass, field
from enum import Enum
from typing import Annotated, Any, Dict, List, Literal, Optional, Protocol, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.behavior.schema import Frame
from src.static_values import (
    BT_MAX_LEAVES,
    MELEE_DAMAGE,
    MELEE_HEALTH,
    MELEE_RANGE,
    PUSHER_AMPLITUDE,
    PUSHER_ARENA_WIDTH,
    PUSHER_FRAME_HEIGHT,
    PUSHER_GENOME_LENGTH,
    PUSHER_MAX_STEPS,
    PUSHER_MUTATIONS,
    PUSHER_PERIOD,
    RANGED_DAMAGE,
    RANGED_HEALTH,
    RANGED_RANGE,
    SKIRMISH_DUEL_SEED,
    SKIRMISH_HEIGHT,
    SKIRMISH_MAX_STEPS,
    SKIRMISH_SIGHT,
    SKIRMISH_UNITS_PER_SIDE,
    SKIRMISH_WIDTH,
)


class Side(str, Enum):
    RED = "red"
    BLUE = "blue"

    @property
    def opposite(self) -> "Side":
        return Side.BLUE if self is Side.RED else Side.RED


@dataclass
class DuelOutcome:
    """Everything one adversarial evaluation produced.

    ``positions[side]`` has shape (recorded steps, units, axes) in arena
    coordinates; ``arena_size`` gives the extent of each axis.
    """

    fitness_red: float
    fitness_blue: float
    frames: List[Frame]
    completion_time: int
    max_steps: int
    winner: Optional[Side]
    positions: Dict[Side, np.ndarray]
    arena_size: Tuple[int, ...]
    # content hash of the two solutions, keys the external embedding file
    key: int = 0
    # per side, per step: action category of every living unit (skirmish)
    actions: Dict[Side, List[List[str]]] = field(default_factory=dict)
    # mean remaining health fraction per side (skirmish)
    remaining_health: Dict[Side, float] = field(default_factory=dict)
    # integer genome per side (pusher)
    genomes: Dict[Side, np.ndarray] = field(default_factory=dict)
    # mean absolute speed per side (pusher)
    mean_speed: Dict[Side, float] = field(default_factory=dict)

    def fitness(self, side: Side) -> float:
        return self.fitness_red if side is Side.RED else self.fitness_blue


class Domain(Protocol):
    """An adversarial problem: two search spaces and a duel between them.

    Solutions are opaque to the engine; domains encode them as text payloads
    for snapshots and lineage.
    """

    name: str

    def random_solution(self, side: Side, rng: np.random.Generator) -> Any: ...

    def variation(self, first: Any, second: Any, rng: np.random.Generator) -> Tuple[Any, str]:
        """Child plus operator tag ("mutation" or "crossover")."""
        ...

    def evaluate(self, red: Any, blue: Any) -> DuelOutcome: ...

    def solution_size(self, solution: Any) -> int: ...

    def encode(self, solution: Any) -> str: ...

    def decode(self, payload: str) -> Any: ...

    def is_valid(self, solution: Any) -> bool: ...

    # (units, axes) of the recorded positions, per side
    position_shape: Tuple[int, int]
    # inclusive range of genome cell values, None when solutions are not integer vectors
    genome_range: Optional[Tuple[int, int]]


class SkirmishParams(BaseModel):
    """Frozen skirmish rules; part of the run manifest."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    name: Literal["skirmish"] = "skirmish"
    width: int = Field(SKIRMISH_WIDTH, ge=26)
    height: int = Field(SKIRMISH_HEIGHT, ge=16)
    units_per_side: int = Field(SKIRMISH_UNITS_PER_SIDE, ge=2, le=8)
    max_steps: int = Field(SKIRMISH_MAX_STEPS, ge=1)
    seed: int = SKIRMISH_DUEL_SEED
    sight: int = Field(SKIRMISH_SIGHT, ge=1)
    melee_damage: int = Field(MELEE_DAMAGE, ge=0)
    melee_range: int = Field(MELEE_RANGE, ge=1)
    melee_health: int = Field(MELEE_HEALTH, ge=1)
    ranged_damage: int = Field(RANGED_DAMAGE, ge=0)
    ranged_range: int = Field(RANGED_RANGE, ge=1)
    ranged_health: int = Field(RANGED_HEALTH, ge=1)
    max_leaves: int = Field(BT_MAX_LEAVES, ge=1)


class PusherParams(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    name: Literal["pusher"] = "pusher"
    arena_width: int = Field(PUSHER_ARENA_WIDTH, ge=2 * PUSHER_GENOME_LENGTH)
    max_steps: int = Field(PUSHER_MAX_STEPS, ge=1)
    period: int = Field(PUSHER_PERIOD, ge=1)
    amplitude: float = Field(PUSHER_AMPLITUDE, ge=0.0)
    frame_height: int = Field(PUSHER_FRAME_HEIGHT, ge=1)
    mutations: int = Field(PUSHER_MUTATIONS, ge=0)


DomainParams = Annotated[Union[SkirmishParams, PusherParams], Field(discriminator="name")]
