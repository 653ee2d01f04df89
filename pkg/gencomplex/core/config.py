from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseSettings, Field, validator


BASE_DIR = Path(__file__).resolve().parent.parent.parent
ENV_FILE = BASE_DIR / ".env"

_DEFAULT_EPS_SAMPLES = "1/2,1/4,1/8,1/16,1/32,1/64,1/128,1/256"


def _parse_rationals(value: str | list) -> list[Fraction]:
    if isinstance(value, str):
        value = [item.strip() for item in value.split(",") if item.strip()]
    samples = [Fraction(str(item)) for item in value]
    if any(sample <= 0 for sample in samples):
        raise ValueError("EPS_SAMPLES must be positive rationals")
    return samples


class Settings(BaseSettings):
    """Application configuration loaded from environment variables."""

    PROJECT_NAME: str = "gencomplex"
    ENVIRONMENT: str = Field(default="development", env="ENVIRONMENT")

    LOG_LEVEL: str = Field(default="WARNING", env="LOG_LEVEL")
    LOG_FILE_PATH: Optional[str] = Field(default=None, env="LOG_FILE_PATH")

    WORKER_CONCURRENCY: int = Field(default=4, ge=1, le=64, env="WORKER_CONCURRENCY")
    TABLE1_DIR: str = Field(default="data/table1", env="TABLE1_DIR")

    EPS_SAMPLES: list[Fraction] = Field(
        default_factory=lambda: _parse_rationals(_DEFAULT_EPS_SAMPLES), env="EPS_SAMPLES"
    )

    SYMPLECTIC_SEARCH_BOUND: int = Field(default=2, ge=1, le=5)
    SYMPLECTIC_SEARCH_LIMIT: int = Field(default=20000, ge=1)
    FORMALITY_SEARCH_LIMIT: int = Field(default=500, ge=1)

    OPERATOR_CACHE_SIZE: int = Field(default=256, ge=8)
    PROPERTY_SAMPLES: int = Field(default=1000, ge=1)
    RANDOM_SEED: int = Field(default=20240101, env="RANDOM_SEED")

    class Config:
        case_sensitive = True
        env_file = str(ENV_FILE)
        env_file_encoding = "utf-8"
        arbitrary_types_allowed = True

        @classmethod
        def parse_env_var(cls, field_name: str, raw_value: str):
            if field_name == "EPS_SAMPLES":
                # Comma-separated rationals, not JSON.
                return raw_value
            return super().parse_env_var(field_name, raw_value)

    @validator("EPS_SAMPLES", pre=True)
    def parse_eps_samples(cls, v: str | list | None) -> list[Fraction]:
        if not v:
            return []
        return _parse_rationals(v)

    def table1_path(self) -> Path:
        path = Path(self.TABLE1_DIR)
        if not path.is_absolute():
            path = BASE_DIR / path
        return path


load_dotenv(ENV_FILE)


@lru_cache
def get_settings() -> Settings:
    """Return cached application settings instance."""

    return Settings()
