from typing import Literal

from pydantic_settings import BaseSettings, SettingsConfigDict

InvariantMode = Literal["enforce", "record", "off"]


class Settings(BaseSettings):
    environment: str = "development"
    version: str = "0.1.0"
    log_level: str = "INFO"

    # Scenario fallback when a document omits invariant_mode
    default_invariant_mode: InvariantMode = "enforce"

    # HTTP surface limits
    api_max_boids: int = 500
    api_max_ticks: int = 2000
    api_rate_limit: str = "10/minute"
    rate_limit_enabled: bool = True
    cors_origins: list[str] = ["http://localhost:3000"]

    model_config = SettingsConfigDict(
        env_prefix="FABS_", env_file=".env", env_file_encoding="utf-8", extra="ignore"
    )


settings = Settings()
