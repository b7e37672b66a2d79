"""Tests for stage logging strategies."""

import json
from pathlib import Path

import pytest

from dowling_reps.core.logging import (
    InMemoryStageLogger,
    StageLogger,
    StreamingStageLogger,
)


def test_in_memory_logger_stores_stages() -> None:
    """Test that InMemoryStageLogger stores stage entries in memory."""
    logger = InMemoryStageLogger()

    result = logger.log_stage(
        stage="normalize",
        status="ok",
        summary="|S| = 3, |R| = 13",
        metadata={"generators": 3},
    )

    assert result["stage"] == "normalize"
    assert result["status"] == "ok"
    assert result["summary"] == "|S| = 3, |R| = 13"
    assert result["metadata"]["generators"] == 3
    assert "timestamp" in result

    assert len(logger.entries) == 1
    assert logger.entries[0] == result


def test_in_memory_logger_stage_order() -> None:
    """Test that stages() lists stage names in logging order."""
    logger = InMemoryStageLogger()

    logger.log_stage("normalize", "ok", "done")
    logger.log_stage("scramble", "ok", "done")
    logger.log_stage("search", "unknown", "no witness")

    assert logger.stages() == ["normalize", "scramble", "search"]
    assert logger.entries[2]["metadata"] == {}


def test_loggers_satisfy_protocol(tmp_path: Path) -> None:
    """Test that both loggers are StageLoggers."""
    assert isinstance(InMemoryStageLogger(), StageLogger)
    assert isinstance(StreamingStageLogger(tmp_path, quiet=True), StageLogger)


def test_streaming_logger_writes_files(tmp_path: Path) -> None:
    """Test that StreamingStageLogger writes files immediately."""
    output_dir = tmp_path / "stages"
    logger = StreamingStageLogger(output_dir=output_dir, quiet=True)

    logger.log_stage(
        stage="scramble",
        status="ok",
        summary="N = 120",
        metadata={"factors": 120},
    )

    stage_dir = output_dir / "01_scramble"
    assert stage_dir.exists()
    assert (stage_dir / "summary.txt").read_text() == "ok: N = 120\n"

    with (stage_dir / "metadata.json").open() as f:
        metadata = json.load(f)
    assert metadata["stage"] == "scramble"
    assert metadata["status"] == "ok"
    assert metadata["factors"] == 120


def test_streaming_logger_numbers_stages(tmp_path: Path) -> None:
    """Test that stage directories are numbered in logging order."""
    logger = StreamingStageLogger(output_dir=tmp_path, quiet=True)

    logger.log_stage("normalize", "ok", "done")
    logger.log_stage("search", "unknown", "no witness")

    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["01_normalize", "02_search"]


def test_streaming_logger_sanitizes_stage_names(tmp_path: Path) -> None:
    """Test that stage names with special characters are sanitized."""
    logger = StreamingStageLogger(output_dir=tmp_path, quiet=True)

    logger.log_stage("sofic n=16", "ok", "ε = 18/16")

    (stage_dir,) = tmp_path.iterdir()
    assert stage_dir.name == "01_sofic_n_16"


def test_streaming_logger_prints_unless_quiet(
    tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    """Test that the console line appears only without quiet."""
    StreamingStageLogger(tmp_path / "a", quiet=True).log_stage("x", "ok", "")
    assert capsys.readouterr().out == ""

    StreamingStageLogger(tmp_path / "b").log_stage("x", "ok", "")
    assert "Logged" in capsys.readouterr().out
