"""
CSV report generator.

The body is deterministic for a given configuration; the timestamp and the
config hash sit in leading '#' comment lines so they can be stripped.
"""

import csv
import io
import math
from typing import Any

from traceforms.core.models import ExperimentReport


def _cell(value: Any) -> Any:
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return value


def render_csv_body(report: ExperimentReport) -> str:
    """The table only, columns in report order."""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=report.columns, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in report.rows:
        writer.writerow({key: _cell(row.get(key)) for key in report.columns})
    return buffer.getvalue()


def render_csv(report: ExperimentReport) -> str:
    """Provenance header comments followed by the table."""
    header = [
        f"# command: {report.command}",
        f"# timestamp: {report.timestamp.isoformat()}",
        f"# config_hash: {report.config_hash}",
        f"# schema_version: {report.schema_version}",
    ]
    return "\n".join(header) + "\n" + render_csv_body(report)
