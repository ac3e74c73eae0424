from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.domains.schema import DomainParams, SkirmishParams
from src.evolve.schema import GameConfig
from src.static_values import MANIFEST_SCHEMA_VERSION


class RunManifest(BaseModel):
    """Everything needed to reproduce a run; hand-edited JSON."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    schema_version: int = MANIFEST_SCHEMA_VERSION
    evolve: GameConfig = GameConfig()
    domain: DomainParams = Field(default_factory=SkirmishParams)
    # metadata only, never read by the engine
    created_at: Optional[str] = None

    @field_validator("schema_version")
    @classmethod
    def _known_version(cls, v: int) -> int:
        if v != MANIFEST_SCHEMA_VERSION:
            raise ValueError(f"manifest schema version {v} is not supported, this build reads version {MANIFEST_SCHEMA_VERSION}")
        return v

    def canonical(self) -> "RunManifest":
        """Copy without metadata, for comparing runs."""
        return self.model_copy(update={"created_at": None})
