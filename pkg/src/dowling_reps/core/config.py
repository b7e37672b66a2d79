"""Configuration loading and validation for dowling-reps."""

import os
from pathlib import Path
from typing import Any, ClassVar, override

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator
from sympy import isprime, prevprime

ENV_PREFIX = "DOWLING_"

# 2**61 - 1 is a Mersenne prime
DEFAULT_PRIME = 2**61 - 1
DEFAULT_CERTIFICATE_PRIME = int(prevprime(2**26))


def _env(name: str) -> str | None:
    """Read a prefixed environment variable, loading a .env file first."""
    load_dotenv()
    return os.environ.get(f"{ENV_PREFIX}{name}")


def _env_int(name: str, default: int) -> int:
    value = _env(name)
    if value is None or not value.strip():
        return default
    try:
        return int(value)
    except ValueError as exc:
        msg = f"{ENV_PREFIX}{name} must be an integer, got {value!r}"
        raise ValueError(msg) from exc


class FieldConfig(BaseModel):
    """Prime fields and randomness used by genericity checks."""

    prime: int = Field(default_factory=lambda: _env_int("PRIME", DEFAULT_PRIME))
    certificate_prime: int = DEFAULT_CERTIFICATE_PRIME
    trials: int = 8
    seed: int = Field(default_factory=lambda: _env_int("SEED", 0))
    resample_budget: int = 64

    @field_validator("prime", "certificate_prime")
    @classmethod
    def validate_prime(cls, v: int) -> int:
        """Ensure the configured field characteristic is prime."""
        if v < 2 or not isprime(v):  # noqa: PLR2004
            msg = f"Field characteristic must be prime, got {v}"
            raise ValueError(msg)
        return v

    @field_validator("trials", "resample_budget")
    @classmethod
    def validate_positive(cls, v: int) -> int:
        """Ensure counts are positive."""
        if v <= 0:
            msg = f"Trial and resample counts must be positive, got {v}"
            raise ValueError(msg)
        return v


class SearchConfig(BaseModel):
    """Bounds for the finite-quotient search."""

    n_max: int = Field(default_factory=lambda: _env_int("N_MAX", 8))
    image_group_bound: int = 5040

    N_MAX_LIMIT: ClassVar[int] = 12

    @field_validator("n_max")
    @classmethod
    def validate_n_max(cls, v: int) -> int:
        """Keep permutation degrees within an exhaustive-search range."""
        if v < 1 or v > cls.N_MAX_LIMIT:
            msg = f"n_max must be between 1 and {cls.N_MAX_LIMIT}, got {v}"
            raise ValueError(msg)
        return v

    @field_validator("image_group_bound")
    @classmethod
    def validate_bound(cls, v: int) -> int:
        """Ensure the image-group bound is positive."""
        if v <= 0:
            msg = f"image_group_bound must be positive, got {v}"
            raise ValueError(msg)
        return v


class ScanConfig(BaseModel):
    """Bounds for exhaustive subset scans."""

    scan_bound: int = 16

    SCAN_LIMIT: ClassVar[int] = 24

    @field_validator("scan_bound")
    @classmethod
    def validate_scan_bound(cls, v: int) -> int:
        """Keep 2**scan_bound tables allocatable."""
        if v < 1 or v > cls.SCAN_LIMIT:
            msg = f"scan_bound must be between 1 and {cls.SCAN_LIMIT}, got {v}"
            raise ValueError(msg)
        return v


class PipelineConfig(BaseModel):
    """Budgets and output location for the reduction pipelines."""

    family_budget: int = 4
    relation_budget: int = 2
    equivalence_budget: int = 32
    sofic_degrees: list[int] = Field(default_factory=lambda: [8, 16, 32])
    output_dir: str = Field(
        default_factory=lambda: _env("OUTPUT_DIR") or "runs/",
    )

    @field_validator("family_budget", "equivalence_budget")
    @classmethod
    def validate_budget(cls, v: int) -> int:
        """Ensure at least one family member is explored."""
        if v <= 0:
            msg = f"Budgets must be positive, got {v}"
            raise ValueError(msg)
        return v

    @field_validator("relation_budget")
    @classmethod
    def validate_relation_budget(cls, v: int) -> int:
        """Allow zero added relations but not negative ones."""
        if v < 0:
            msg = f"relation_budget must be non-negative, got {v}"
            raise ValueError(msg)
        return v

    @field_validator("sofic_degrees")
    @classmethod
    def validate_degrees(cls, v: list[int]) -> list[int]:
        """Sofic degrees are positive and sorted."""
        if any(n <= 0 for n in v):
            msg = f"Sofic degrees must be positive, got {v}"
            raise ValueError(msg)
        return sorted(v)


class Config(BaseModel):
    """Main configuration for dowling-reps."""

    field: FieldConfig = Field(default_factory=FieldConfig)
    search: SearchConfig = Field(default_factory=SearchConfig)
    scan: ScanConfig = Field(default_factory=ScanConfig)
    pipeline: PipelineConfig = Field(default_factory=PipelineConfig)

    @override
    def model_post_init(self, _context: object, /) -> None:
        """Cross-check field sizes against search degrees."""
        if self.field.certificate_prime <= self.search.n_max:
            msg = (
                f"certificate_prime {self.field.certificate_prime} must exceed "
                f"n_max {self.search.n_max}"
            )
            raise ValueError(msg)

    def warnings(self) -> list[str]:
        """Return advisory messages about weak settings."""
        warnings: list[str] = []
        if self.field.prime < 2**31:
            warnings.append(
                f"Genericity prime {self.field.prime} is small; randomized "
                "verdicts have a large failure bound"
            )
        if self.field.trials < 4:  # noqa: PLR2004
            warnings.append(f"Only {self.field.trials} genericity trials configured")
        return warnings


def load_config(config_path: Path | None = None, verbose: bool = True) -> Config:
    """Load configuration from a YAML file.

    Args:
        config_path: Path to YAML configuration file, or None for defaults
        verbose: Whether to print validation warnings

    Returns:
        Config object

    """
    config_data: dict[str, Any] = {}
    if config_path is not None:
        if config_path.exists():
            with config_path.open(encoding="utf-8") as f:
                config_data = yaml.safe_load(f) or {}
        elif verbose:
            print(f"WARN: {config_path} not found, using defaults")  # noqa: T201

    config = Config(**config_data)

    if verbose:
        warnings = config.warnings()
        for warning in warnings:
            print(f"WARN: {warning}")  # noqa: T201
        if warnings:
            print()  # noqa: T201

    return config
