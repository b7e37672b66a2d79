"""Stage logging strategies for dowling-reps pipelines."""

import json
from datetime import UTC, datetime
from pathlib import Path
from typing import Any, Protocol, runtime_checkable


@runtime_checkable
class StageLogger(Protocol):
    """Protocol for logging pipeline stages."""

    def log_stage(
        self,
        stage: str,
        status: str,
        summary: str,
        metadata: dict[str, Any] | None = None,
    ) -> dict[str, Any] | None:
        """Log the outcome of one pipeline stage.

        Args:
            stage: Stage name (normalize, scramble, search, ...)
            status: Outcome label (ok, fail, unknown)
            summary: Human-readable one-line summary
            metadata: Optional structured data about the stage

        Returns:
            Optional dict for in-memory loggers to return the logged data

        """


class InMemoryStageLogger:
    """Stores stage entries in memory (default for testing)."""

    def __init__(self) -> None:
        """Initialize the in-memory logger."""
        self.entries: list[dict[str, Any]] = []

    def log_stage(
        self,
        stage: str,
        status: str,
        summary: str,
        metadata: dict[str, Any] | None = None,
    ) -> dict[str, Any]:
        """Store a stage entry in memory."""
        entry = {
            "timestamp": datetime.now(tz=UTC).isoformat(),
            "stage": stage,
            "status": status,
            "summary": summary,
            "metadata": metadata or {},
        }
        self.entries.append(entry)
        return entry

    def stages(self) -> list[str]:
        """Return logged stage names in order."""
        return [entry["stage"] for entry in self.entries]


class StreamingStageLogger:
    """Writes stage entries to disk as they happen."""

    def __init__(self, output_dir: str | Path, quiet: bool = False) -> None:
        """Initialize the streaming logger.

        Args:
            output_dir: Base directory for stage directories
            quiet: Suppress console output

        """
        self.output_dir: Path = Path(output_dir)
        self.quiet = quiet
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self._counter = 0

    def log_stage(
        self,
        stage: str,
        status: str,
        summary: str,
        metadata: dict[str, Any] | None = None,
    ) -> None:
        """Write a stage directory with its summary and metadata."""
        timestamp = datetime.now(tz=UTC)
        self._counter += 1

        safe_stage = "".join(c if c.isalnum() else "_" for c in stage)
        stage_dir = self.output_dir / f"{self._counter:02d}_{safe_stage}"
        stage_dir.mkdir(exist_ok=True)

        with (stage_dir / "summary.txt").open("w", encoding="utf-8") as f:
            f.write(f"{status}: {summary}\n")

        meta = {
            "timestamp": timestamp.isoformat(),
            "stage": stage,
            "status": status,
            **(metadata or {}),
        }
        with (stage_dir / "metadata.json").open("w", encoding="utf-8") as f:
            json.dump(meta, f, indent=2, default=str)

        if not self.quiet:
            print(f"  💾 Logged: {stage_dir}")  # noqa: T201
