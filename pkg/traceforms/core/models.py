"""
Pydantic v2 models for traceforms reports.

All serializable objects use Pydantic BaseModel for validation,
serialization, and schema generation.
"""

from datetime import datetime, timezone
from enum import Enum
from typing import Any

from pydantic import BaseModel, Field

from traceforms.core.taxonomy import CertificationCheck

SCHEMA_VERSION = "1.0"


class Verdict(str, Enum):
    """Outcome of a single certification."""

    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


class Certification(BaseModel):
    """
    A single certified property.

    Each certification states one mathematical claim, whether the
    computation confirmed it, and the numbers that decided it.
    """

    check: CertificationCheck = Field(
        description="The check in the taxonomy this certification belongs to"
    )
    verdict: Verdict = Field(description="Outcome of the check")
    title: str = Field(description="Short, descriptive title")
    description: str = Field(description="What was checked and how it was decided")
    evidence: dict[str, Any] | None = Field(
        default=None,
        description="Numbers supporting the verdict (residuals, bounds, tolerances)",
    )
    experiment: str = Field(description="Name of the experiment that produced this")

    model_config = {
        "json_schema_extra": {
            "examples": [
                {
                    "check": "hardy_sandwich",
                    "verdict": "pass",
                    "title": "Hardy constant bounds are ordered",
                    "description": "largest eigenvalue of S <= sup of G^mu 1 on the grid",
                    "evidence": {"lower": 0.6839397, "upper": 0.6839397},
                    "experiment": "spectrum",
                }
            ]
        }
    }

    @classmethod
    def from_condition(
        cls,
        check: CertificationCheck,
        condition: bool,
        title: str,
        description: str,
        experiment: str,
        evidence: dict[str, Any] | None = None,
    ) -> "Certification":
        """Build a pass/fail certification from a boolean outcome."""
        return cls(
            check=check,
            verdict=Verdict.PASS if condition else Verdict.FAIL,
            title=title,
            description=description,
            evidence=evidence,
            experiment=experiment,
        )


class ExperimentOutput(BaseModel):
    """What a single experiment hands back to the runner."""

    certifications: list[Certification] = Field(default_factory=list)
    columns: list[str] = Field(
        default_factory=list, description="Column order of the CSV table"
    )
    rows: list[dict[str, Any]] = Field(
        default_factory=list, description="Table rows keyed by column name"
    )
    summary: dict[str, Any] = Field(
        default_factory=dict, description="Nested JSON summary of the experiment"
    )


class ExperimentReport(BaseModel):
    """
    Result of running one command.

    Aggregates certifications, the table and the summary, and carries the
    provenance needed to reproduce the run.
    """

    schema_version: str = Field(default=SCHEMA_VERSION)
    command: str = Field(description="Command that produced this report")
    certifications: list[Certification] = Field(default_factory=list)
    columns: list[str] = Field(default_factory=list)
    rows: list[dict[str, Any]] = Field(default_factory=list)
    summary: dict[str, Any] = Field(default_factory=dict)
    config_hash: str = Field(description="SHA-256 of the canonical effective config")
    timestamp: datetime = Field(
        default_factory=lambda: datetime.now(timezone.utc),
        description="When the run finished",
    )
    duration_ms: int | None = Field(default=None, description="Wall time of the run")
    metadata: dict[str, Any] | None = Field(default=None)

    @property
    def failed_checks(self) -> list[Certification]:
        """Certifications whose verdict is FAIL."""
        return [c for c in self.certifications if c.verdict == Verdict.FAIL]

    @property
    def passed(self) -> bool:
        """True when no certification failed."""
        return not self.failed_checks

    @property
    def counts_by_verdict(self) -> dict[str, int]:
        """Number of certifications per verdict."""
        counts = {v.value: 0 for v in Verdict}
        for cert in self.certifications:
            counts[cert.verdict.value] += 1
        return counts

    model_config = {
        "json_schema_extra": {
            "examples": [
                {
                    "schema_version": "1.0",
                    "command": "ball-eig",
                    "certifications": [],
                    "summary": {"value": 0.3130352855, "multiplicity": 1},
                    "config_hash": "9f2c...",
                    "timestamp": "2026-01-15T10:30:00Z",
                }
            ]
        }
    }
