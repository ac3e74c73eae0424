from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.archive.schema import DistanceKind
from src.static_values import DEFAULT_NUM_FRAMES, DEFAULT_POOL_SIZE, DEFAULT_POSITION_TIMESTEPS
from src.utils.errors import BehaviorError


@dataclass(frozen=True, eq=False)
class Frame:
    """Grayscale image, intensities in [0, 1], indexed ``pixels[row, col]``."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.pixels, dtype=np.float64)
        if arr.ndim != 2 or arr.size == 0:
            raise BehaviorError(f"frame must be a non-empty 2-D image, got shape {arr.shape}")
        if not np.all((arr >= 0.0) & (arr <= 1.0)):
            raise BehaviorError("frame intensities must lie in [0, 1]")
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Frame):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)


class DescriptorKind(str, Enum):
    FRAME_EMBEDDING = "frame_embedding"
    POSITIONS = "positions"
    HANDCRAFTED_SKIRMISH = "handcrafted_skirmish"
    GENOME_STATS = "genome_stats"
    EXTERNAL = "external"


class DescriptorSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: DescriptorKind = DescriptorKind.FRAME_EMBEDDING
    pool_size: int = Field(DEFAULT_POOL_SIZE, ge=1, description="d: pooled grid is d x d")
    num_frames: int = Field(DEFAULT_NUM_FRAMES, ge=1, description="f: frames subsampled per duel")
    num_timesteps: int = Field(DEFAULT_POSITION_TIMESTEPS, ge=1)
    path: Optional[Path] = Field(None, description="embedding file for the external descriptor")

    @model_validator(mode="after")
    def _external_needs_path(self) -> "DescriptorSpec":
        if self.kind is DescriptorKind.EXTERNAL and self.path is None:
            raise ValueError("the external descriptor needs a path")
        return self

    @property
    def distance_kind(self) -> DistanceKind:
        if self.kind in (DescriptorKind.HANDCRAFTED_SKIRMISH, DescriptorKind.GENOME_STATS):
            return DistanceKind.EUCLIDEAN
        return DistanceKind.COSINE
