"""Structured pass/fail evidence shared by every checker."""

from typing import Any

from pydantic import BaseModel, Field


class Finding(BaseModel):
    """Outcome of one named check, with a witness when it fails."""

    check: str
    passed: bool
    detail: str = ""
    witness: Any = None


class AuditReport(BaseModel):
    """A property suite evaluated against one subject."""

    subject: str
    findings: list[Finding] = Field(default_factory=list)
    notes: list[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        """A report passes iff every finding passes."""
        return all(finding.passed for finding in self.findings)

    def record(
        self,
        check: str,
        passed: bool,
        detail: str = "",
        witness: Any = None,
    ) -> Finding:
        """Append a finding and return it."""
        finding = Finding(check=check, passed=passed, detail=detail, witness=witness)
        self.findings.append(finding)
        return finding

    def note(self, text: str) -> None:
        """Attach a caveat that does not affect the verdict."""
        if text not in self.notes:
            self.notes.append(text)

    def failures(self) -> list[Finding]:
        """Return the failing findings in recording order."""
        return [finding for finding in self.findings if not finding.passed]

    def finding(self, check: str) -> Finding | None:
        """Return the first finding recorded under a check name."""
        return next((f for f in self.findings if f.check == check), None)

    def merge(self, other: "AuditReport", prefix: str = "") -> None:
        """Fold another report's findings and notes into this one."""
        for finding in other.findings:
            self.findings.append(
                finding.model_copy(update={"check": f"{prefix}{finding.check}"})
            )
        for note in other.notes:
            self.note(note)

    def summary(self) -> str:
        """One-line verdict with failure count."""
        failed = len(self.failures())
        verdict = "PASS" if failed == 0 else "FAIL"
        total = len(self.findings)
        return f"{verdict} {self.subject}: {total - failed}/{total} checks"

    def to_text(self) -> str:
        """Render the report for terminal output."""
        lines = [self.summary()]
        for finding in self.findings:
            mark = "✓" if finding.passed else "✗"
            line = f"  {mark} {finding.check}"
            if finding.detail:
                line += f": {finding.detail}"
            lines.append(line)
            if not finding.passed and finding.witness is not None:
                lines.append(f"      witness: {finding.witness}")
        lines.extend(f"  note: {note}" for note in self.notes)
        return "\n".join(lines)
