"""
JSON report generator.

Produces the machine-readable summary of a run: summary, certifications,
config hash and schema version, optionally with the table.
"""

import json

from traceforms.core.models import ExperimentReport


def render_json(
    report: ExperimentReport,
    indent: int | None = 2,
    include_metadata: bool = True,
    include_table: bool = False,
) -> str:
    """
    Render an experiment report as JSON.

    Args:
        report: The report to render
        indent: JSON indentation (None for compact)
        include_metadata: Whether to include run metadata and wall time
        include_table: Whether to include the table rows

    Returns:
        JSON string representation of the report
    """
    data = report.model_dump(mode="json")
    data["passed"] = report.passed
    data["counts_by_verdict"] = report.counts_by_verdict

    if not include_metadata:
        data.pop("metadata", None)
        data.pop("duration_ms", None)
    if not include_table:
        data.pop("rows", None)
        data.pop("columns", None)

    return json.dumps(data, indent=indent, default=str)


def render_json_summary(report: ExperimentReport) -> str:
    """Compact one-line status for CI logs."""
    summary = {
        "command": report.command,
        "passed": report.passed,
        "certifications": len(report.certifications),
        "counts_by_verdict": report.counts_by_verdict,
        "failed_checks": [c.check.value for c in report.failed_checks],
        "config_hash": report.config_hash,
    }
    return json.dumps(summary, indent=None)
