"""Run configuration for ainfdiag computations."""

import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .exceptions import AInfDiagError, ConfigurationError
from .scalars import check_prime
from .utils import check_config_path, load_config, save_config

logger = logging.getLogger(__name__)

ENV_PREFIX = "AINFDIAG_"
OUTPUT_FORMATS = ("text", "json", "dot")


class RunConfig(BaseModel):
    """Parameters shared by every command.

    Values come from defaults, then a YAML file, then ``AINFDIAG_*``
    environment variables, then command-line flags.
    """

    model_config = ConfigDict(extra="forbid", validate_assignment=True)

    # Field and factors
    p: int = Field(2, description="Prime characteristic")
    n: int = Field(4, ge=3, description="Order of the first cyclic factor")
    m: int = Field(4, ge=3, description="Order of the second cyclic factor")

    # Truncation and scan limits
    ycap: int = Field(6, ge=0, le=64, description="Largest y-exponent kept")
    max_arity: int = Field(7, ge=2, description="Largest arity evaluated")

    # Enumeration caps
    enumeration_cap: int = Field(
        8, ge=1, le=10, description="Largest N for derived matrix enumeration"
    )
    step_matrix_cap: int = Field(
        9, ge=1, le=11, description="Largest N for step matrix enumeration"
    )
    oracle_cap: int = Field(6, ge=1, le=7, description="Largest N for brute force")

    # Execution
    threads: int = Field(1, ge=1, le=64, description="Worker threads")
    output_format: str = Field("text", description="text, json or dot")

    @field_validator("p")
    @classmethod
    def _prime(cls, value: int) -> int:
        try:
            return check_prime(value)
        except AInfDiagError as e:
            raise ValueError(e.message)

    @field_validator("output_format")
    @classmethod
    def _format(cls, value: str) -> str:
        if value not in OUTPUT_FORMATS:
            choices = ", ".join(OUTPUT_FORMATS)
            raise ValueError(f"output_format must be one of {choices}")
        return value

    @property
    def delta_cap(self) -> int:
        """Largest arity whose diagonal can be enumerated."""
        return self.enumeration_cap + 1

    def validate_for_cyclic(self) -> None:
        """Check the factor parameters required by the C_n × C_m commands.

        Raises:
            ConfigurationError: Unless n >= m > 3
        """
        if self.m <= 3:
            raise ConfigurationError("m must be greater than 3", "m")
        if self.n < self.m:
            raise ConfigurationError(
                f"n must be at least m (got n={self.n}, m={self.m})", "n"
            )

    def with_overrides(self, **values: Any) -> "RunConfig":
        """Copy with every non-``None`` keyword applied."""
        updates = {key: value for key, value in values.items() if value is not None}
        return _build({**self.model_dump(), **updates})

    @classmethod
    def from_env(cls, base: Optional["RunConfig"] = None) -> "RunConfig":
        """Apply ``AINFDIAG_*`` variables (a ``.env`` file is loaded first)."""
        load_dotenv()
        data: Dict[str, Any] = base.model_dump() if base is not None else {}
        for name in cls.model_fields:
            raw = os.getenv(f"{ENV_PREFIX}{name.upper()}")
            if raw is not None:
                data[name] = raw
        return _build(data)

    @classmethod
    def from_file(cls, path: Path) -> "RunConfig":
        """Load a YAML configuration file.

        Raises:
            ConfigurationError: If the file is unreadable or has invalid values
        """
        check_config_path(path)
        return _build(load_config(path))

    def save(self, path: Path) -> None:
        check_config_path(path, must_exist=False)
        save_config(self.model_dump(), path)
        logger.info(f"configuration written to {path}")


def _build(data: Dict[str, Any]) -> RunConfig:
    try:
        return RunConfig(**data)
    except ValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(part) for part in first["loc"]) or None
        raise ConfigurationError(f"invalid configuration: {first['msg']}", key)


def load_run_config(path: Optional[Path] = None) -> RunConfig:
    """Defaults, then ``path`` if given, then the environment."""
    base = RunConfig.from_file(path) if path is not None else RunConfig()
    return RunConfig.from_env(base)
