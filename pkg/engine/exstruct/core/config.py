from functools import lru_cache
from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="EXSTRUCT_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Input defaults
    default_prime: int = 101
    default_seed: int = 0
    default_samples: int = 100

    # Radical computation below the trace-form bound
    allow_small_characteristic: bool = False

    # Table cache
    cache_dir: Path = Path(".exstruct-cache")
    cache_enabled: bool = True

    # Oracle guard
    oracle_max_prime: int = 3
    oracle_max_ext_dim: int = 12

    # Verification
    spot_checks: int = 2
    negative_controls: int = 3

    # Logging
    log_level: str = "WARNING"

    @property
    def lancedb_path(self) -> Path:
        return self.cache_dir / "lancedb"


@lru_cache
def get_settings() -> Settings:
    return Settings()
