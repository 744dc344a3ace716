import json
from pathlib import Path
from typing import Annotated

from pydantic import AnyHttpUrl, field_validator
from pydantic_settings import BaseSettings, NoDecode, SettingsConfigDict


class Settings(BaseSettings):
    # App Settings
    APP_ENV: str = 'development'
    LOG_LEVEL: str = 'INFO'
    API_V1_STR: str = '/api/v1'

    # CORS
    BACKEND_CORS_ORIGINS: Annotated[list[AnyHttpUrl], NoDecode] = []

    # Simulation defaults
    DEFAULT_SEED: int = 0
    DEFAULT_DECOYS: int = 8
    DEFAULT_TRIALS: int = 10_000
    TRIAL_CHUNK_SIZE: int = 5_000
    MAX_WORKERS: int = 4

    # Numerical tolerances
    NORM_TOL: float = 1e-9
    STEALTH_TOL: float = 1e-9
    FIDELITY_TOL: float = 1e-6

    # Limits
    MAX_DIMENSION: int = 64
    ENUMERATION_BUDGET: int = 50_000_000

    # Reports
    REPORT_ROOT: str = str(Path(__file__).parent.parent.parent / 'reports')

    @field_validator('BACKEND_CORS_ORIGINS', mode='before')
    @classmethod
    def parse_cors_origins(cls, v: str | list[str]) -> list[str]:
        if isinstance(v, str):
            if v.startswith('['):
                return json.loads(v)
            return [i.strip() for i in v.split(',') if i.strip()]
        elif isinstance(v, list):
            return v
        raise ValueError(v)

    model_config = SettingsConfigDict(
        case_sensitive=True, env_file='.env', extra='ignore'
    )


settings = Settings()
