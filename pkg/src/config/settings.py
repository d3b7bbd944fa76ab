import logging
import sys
from pathlib import Path
from typing import Optional

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.core.exceptions import ConfigurationError

APP_NAME = "cqnc-force-sensor"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
VALID_LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


class Settings(BaseSettings):
    """Runtime settings.

    Only the default output directory comes from the environment (CQNC_OUTPUT_DIR);
    everything else about a run lives in its YAML configuration.
    """

    model_config = SettingsConfigDict(
        env_prefix="CQNC_",
        case_sensitive=False,
        extra="ignore",
    )

    output_dir: Optional[Path] = None

    @field_validator("output_dir")
    @classmethod
    def validate_output_dir(cls, v: Optional[Path]) -> Optional[Path]:
        if v is not None and v.exists() and not v.is_dir():
            raise ValueError(f"output_dir '{v}' exists and is not a directory")
        return v

    def resolve_output_dir(self, explicit: Optional[Path] = None) -> Path:
        """Pick the directory results are written to: explicit path, env override, or cwd."""
        if explicit is not None:
            return explicit
        if self.output_dir is not None:
            return self.output_dir
        return Path.cwd()


def setup_logging(level: str = "INFO") -> None:
    """Setup logging configuration on stderr."""
    level = level.upper()
    if level not in VALID_LOG_LEVELS:
        raise ConfigurationError(f"Log level must be one of: {VALID_LOG_LEVELS}", field="log_level")

    logging.basicConfig(
        level=getattr(logging, level),
        format=LOG_FORMAT,
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True,
    )


# Global settings instance
settings = Settings()
