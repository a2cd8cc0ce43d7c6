"""
Runtime configuration.

Settings are read from config.json (or the file named by PHASEMCP_CONFIG) and
validated with pydantic. PHASEMCP_WORKERS caps the FFT thread count.
"""

import json
import logging
import os
from datetime import datetime
from functools import lru_cache
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, Field, ValidationError

from .errors import ConfigError

logger = logging.getLogger(__name__)

CONFIG_ENV = "PHASEMCP_CONFIG"
WORKERS_ENV = "PHASEMCP_WORKERS"
DEFAULT_CONFIG_PATH = Path("config.json")


class GridSettings(BaseModel):
    n: int = Field(256, ge=8)
    half_width: float = Field(10.0, gt=0)


class NumericsSettings(BaseModel):
    workers: int = Field(1, ge=1)
    boundary_tol: float = Field(1e-10, gt=0)
    support_tol: float = Field(1e-10, gt=0)


class OutputSettings(BaseModel):
    directory: str = "output"
    colormap: str = "RdBu_r"
    dpi: int = Field(100, ge=10)


class LoggingSettings(BaseModel):
    level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"
    file: bool = True
    directory: str = "."


class ServerSettings(BaseModel):
    host: str = "127.0.0.1"
    port: int = 8080
    transport: Literal["sse", "stdio", "http"] = "sse"


class Settings(BaseModel):
    grid: GridSettings = GridSettings()
    numerics: NumericsSettings = NumericsSettings()
    output: OutputSettings = OutputSettings()
    logging: LoggingSettings = LoggingSettings()
    server: ServerSettings = ServerSettings()


def load_settings(path: Optional[str | Path] = None) -> Settings:
    """Load settings from a JSON file, falling back to defaults when it is absent"""
    if path is None:
        path = os.environ.get(CONFIG_ENV, DEFAULT_CONFIG_PATH)
    path = Path(path)

    raw: dict = {}
    if path.exists():
        try:
            with open(path, "r") as f:
                raw = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"invalid JSON ({e.msg} at line {e.lineno})", field=str(path)) from e
    else:
        logger.info(f"No config file at {path}, using defaults")

    try:
        settings = Settings.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(part) for part in first["loc"])
        raise ConfigError(first["msg"], field=field) from e

    override = os.environ.get(WORKERS_ENV)
    if override:
        try:
            settings.numerics.workers = max(1, int(override))
        except ValueError as e:
            raise ConfigError(f"expected an integer, got {override!r}", field=WORKERS_ENV) from e
    return settings


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Process-wide settings, loaded once"""
    return load_settings()


def fft_workers() -> int:
    return get_settings().numerics.workers


LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def log_handlers(settings: Settings) -> list[logging.Handler]:
    """Console handler plus the dated log file when file logging is on"""
    handlers: list[logging.Handler] = [logging.StreamHandler()]
    if settings.logging.file:
        directory = Path(settings.logging.directory)
        directory.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(directory / f'phasemcp_{datetime.now().strftime("%Y%m%d")}.log'))
    return handlers
