"""
Runtime settings and shared parameter models.

Environment variables (optionally from a .env file):
    SENSORNET_MAX_SPINS   dense size cap (default 13)
    SENSORNET_LOG_LEVEL   logging level (default INFO)
    SENSORNET_WORKERS     process pool size for fitness evaluation (default 1)
    SENSORNET_OUTPUT_DIR  default output directory
"""
import logging
import os
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Optional

import psutil
from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

from .errors import ConfigurationError, SizeCapExceeded

load_dotenv()

logger = logging.getLogger(__name__)

DEFAULT_MAX_SPINS = 13


class CouplingScaling(str, Enum):
    """How the pairwise coupling depends on system size"""
    BARE = "bare"
    KAC = "kac"


class RuntimeSettings(BaseModel):
    """Process-wide settings read from the environment"""
    max_spins: int = DEFAULT_MAX_SPINS
    log_level: str = "INFO"
    workers: int = 1
    output_dir: Path = Path("sensornet_output")

    @field_validator("max_spins", "workers")
    @classmethod
    def _positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be a positive integer")
        return value


@lru_cache(maxsize=1)
def get_settings() -> RuntimeSettings:
    """Load settings from the environment once per process"""
    try:
        return RuntimeSettings(
            max_spins=int(os.environ.get("SENSORNET_MAX_SPINS", DEFAULT_MAX_SPINS)),
            log_level=os.environ.get("SENSORNET_LOG_LEVEL", "INFO"),
            workers=int(os.environ.get("SENSORNET_WORKERS", 1)),
            output_dir=Path(os.environ.get("SENSORNET_OUTPUT_DIR", "sensornet_output")),
        )
    except ValueError as e:
        raise ConfigurationError(f"Invalid SENSORNET_* environment setting: {e}") from e


class SpinSystemParams(BaseModel):
    """Physical configuration of a transverse-field Ising sensor"""
    model_config = {"frozen": True}

    J: float = -1.0
    h: float = 0.05
    T: float = 0.08
    scaling: CouplingScaling = CouplingScaling.BARE
    dn_levels: int = Field(default=2, ge=1)
    max_spins: Optional[int] = None

    @field_validator("T")
    @classmethod
    def _non_negative_temperature(cls, value: float) -> float:
        if value < 0:
            raise ValueError("temperature must be non-negative")
        return value

    @property
    def beta(self) -> float:
        if self.T <= 0:
            raise ConfigurationError(f"Gibbs quantities need T > 0, got T={self.T}")
        return 1.0 / self.T

    def with_field(self, h: float) -> "SpinSystemParams":
        return self.model_copy(update={"h": h})

    def with_temperature(self, T: float) -> "SpinSystemParams":
        return self.model_copy(update={"T": T})

    def size_cap(self) -> int:
        return self.max_spins if self.max_spins is not None else get_settings().max_spins


def check_size_cap(n_spins: int, cap: Optional[int] = None) -> None:
    """Reject spin counts whose dense matrices exceed the configured cap"""
    cap = get_settings().max_spins if cap is None else cap
    if n_spins > cap:
        raise SizeCapExceeded(n_spins, cap)

    if cap > DEFAULT_MAX_SPINS:
        needed = (2 ** n_spins) ** 2 * 8
        available = psutil.virtual_memory().available
        if needed * 3 > available:
            logger.warning(
                f"Dense {2 ** n_spins}x{2 ** n_spins} matrices need ~{needed / 1e9:.2f} GB each; "
                f"only {available / 1e9:.2f} GB available"
            )
