from pathlib import Path
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

BASE_DIR = Path(__file__).resolve().parent
ENV_PATH = BASE_DIR.parent / ".env"


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=ENV_PATH, env_file_encoding="utf-8", env_prefix="GAME_", extra="ignore"
    )

    logging_level: str = Field("INFO", description="GAME_LOGGING_LEVEL")
    runs_dir: Path = Field(Path("runs"), description="GAME_RUNS_DIR")
    presets_dir: Path = Field(BASE_DIR.parent / "manifests", description="GAME_PRESETS_DIR")
    # default --jobs for the cli
    jobs: int = Field(1, ge=1, description="GAME_JOBS")


settings = Settings()
