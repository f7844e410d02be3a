"""
Markdown report generator.

Produces a human-readable summary of a run for notebooks, PR comments and
manual review.
"""

import json

from traceforms.core.models import Certification, ExperimentReport, Verdict
from traceforms.core.taxonomy import CHECK_DESCRIPTIONS

VERDICT_MARK = {
    Verdict.PASS: "✅",
    Verdict.FAIL: "❌",
    Verdict.INCONCLUSIVE: "❔",
}

MAX_TABLE_ROWS = 50


def render_markdown(report: ExperimentReport, verbose: bool = False) -> str:
    """
    Render an experiment report as Markdown.

    Args:
        report: The report to render
        verbose: Include evidence and the long check descriptions

    Returns:
        Markdown string representation
    """
    lines: list[str] = []

    lines.append(f"# traceforms: `{report.command}`")
    lines.append("")
    lines.append("## Summary")
    lines.append("")
    lines.append(f"**Result:** {'Passed ✅' if report.passed else 'Failed ❌'}")
    lines.append(f"**Run Time:** {report.timestamp.isoformat()}")
    if report.duration_ms is not None:
        lines.append(f"**Duration:** {report.duration_ms}ms")
    lines.append(f"**Config Hash:** `{report.config_hash}`")
    lines.append("")

    lines.append("### Certifications")
    lines.append("")
    lines.append("| Verdict | Check | Title |")
    lines.append("|---------|-------|-------|")
    for cert in report.certifications:
        name = CHECK_DESCRIPTIONS.get(cert.check, {}).get("name", cert.check.value)
        lines.append(f"| {VERDICT_MARK[cert.verdict]} {cert.verdict.value} | {name} | {cert.title} |")
    lines.append("")

    if verbose:
        lines.append("## Details")
        lines.append("")
        for i, cert in enumerate(report.certifications, 1):
            lines.extend(_render_certification(cert, i))
            lines.append("")

    if report.rows:
        lines.extend(_render_table(report))

    return "\n".join(lines)


def _render_certification(cert: Certification, index: int) -> list[str]:
    lines = [f"#### {index}. {cert.title}", ""]
    lines.append(f"- **Check:** `{cert.check.value}`")
    lines.append(f"- **Verdict:** {cert.verdict.value}")
    lines.append("")
    lines.append(cert.description)
    long = CHECK_DESCRIPTIONS.get(cert.check, {}).get("long_description")
    if long:
        lines.append("")
        lines.append(long.strip())
    if cert.evidence:
        lines.append("")
        lines.append("```json")
        lines.append(json.dumps(cert.evidence, indent=2, default=str))
        lines.append("```")
    return lines


def _render_table(report: ExperimentReport) -> list[str]:
    lines = ["## Table", ""]
    lines.append("| " + " | ".join(report.columns) + " |")
    lines.append("|" + "|".join("---" for _ in report.columns) + "|")
    for row in report.rows[:MAX_TABLE_ROWS]:
        cells = [_format(row.get(c)) for c in report.columns]
        lines.append("| " + " | ".join(cells) + " |")
    if len(report.rows) > MAX_TABLE_ROWS:
        lines.append("")
        lines.append(f"*{len(report.rows) - MAX_TABLE_ROWS} more rows in the CSV output*")
    lines.append("")
    return lines


def _format(value: object) -> str:
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)
