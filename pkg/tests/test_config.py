"""Tests for configuration loading."""

from pathlib import Path

import pytest

from dowling_reps.core.config import (
    DEFAULT_CERTIFICATE_PRIME,
    DEFAULT_PRIME,
    Config,
    FieldConfig,
    PipelineConfig,
    SearchConfig,
    load_config,
)


def test_load_config(tmp_path: Path) -> None:
    """Test loading a valid configuration."""
    config_content = """
field:
  prime: 101
  trials: 5
  seed: 3
search:
  n_max: 6
scan:
  scan_bound: 12
pipeline:
  family_budget: 2
  sofic_degrees: [32, 8]
"""

    config_file = tmp_path / "config.yaml"
    config_file.write_text(config_content)

    config = load_config(config_file, verbose=False)

    assert config.field.prime == 101
    assert config.field.trials == 5
    assert config.field.seed == 3
    assert config.search.n_max == 6
    assert config.scan.scan_bound == 12
    assert config.pipeline.family_budget == 2
    assert config.pipeline.sofic_degrees == [8, 32]


def test_missing_config_uses_defaults(
    tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    """Test that a missing file warns and falls back to defaults."""
    config = load_config(tmp_path / "absent.yaml")

    assert config.field.certificate_prime == DEFAULT_CERTIFICATE_PRIME
    assert "not found" in capsys.readouterr().out


def test_empty_config_file(tmp_path: Path) -> None:
    """Test that an empty YAML file gives the defaults."""
    config_file = tmp_path / "config.yaml"
    config_file.write_text("")

    config = load_config(config_file, verbose=False)

    assert config.search.n_max == SearchConfig().n_max
    assert config.scan.scan_bound == 16


def test_config_validation() -> None:
    """Test configuration validation."""
    config = Config(field=FieldConfig(prime=7, trials=2))
    assert config.field.prime == 7

    with pytest.raises(ValueError, match="Field characteristic must be prime"):
        FieldConfig(prime=91)

    with pytest.raises(ValueError, match="must be positive"):
        FieldConfig(trials=0)

    with pytest.raises(ValueError, match="n_max must be between 1 and 12"):
        SearchConfig(n_max=13)

    with pytest.raises(ValueError, match="relation_budget must be non-negative"):
        PipelineConfig(relation_budget=-1)

    with pytest.raises(ValueError, match="Sofic degrees must be positive"):
        PipelineConfig(sofic_degrees=[8, 0])


def test_certificate_prime_must_exceed_degree() -> None:
    """Test the cross-check between certificate prime and n_max."""
    with pytest.raises(ValueError, match="must exceed n_max"):
        Config(field=FieldConfig(certificate_prime=5), search=SearchConfig(n_max=6))


def test_warnings_for_weak_settings() -> None:
    """Test that small primes and few trials are flagged."""
    assert Config(field=FieldConfig(prime=DEFAULT_PRIME, trials=8)).warnings() == []

    warnings = Config(field=FieldConfig(prime=101, trials=2)).warnings()

    assert len(warnings) == 2
    assert "small" in warnings[0]
    assert "2 genericity trials" in warnings[1]


def test_environment_overrides(monkeypatch: pytest.MonkeyPatch) -> None:
    """Test that DOWLING_ variables feed the defaults."""
    monkeypatch.setenv("DOWLING_PRIME", "13")
    monkeypatch.setenv("DOWLING_SEED", "42")
    monkeypatch.setenv("DOWLING_OUTPUT_DIR", "elsewhere/")

    config = Config()

    assert config.field.prime == 13
    assert config.field.seed == 42
    assert config.pipeline.output_dir == "elsewhere/"


def test_bad_environment_value(monkeypatch: pytest.MonkeyPatch) -> None:
    """Test that a non-integer environment value is rejected."""
    monkeypatch.setenv("DOWLING_SEED", "seven")

    with pytest.raises(ValueError, match="DOWLING_SEED must be an integer"):
        FieldConfig()
