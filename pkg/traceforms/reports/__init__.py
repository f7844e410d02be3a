"""Report generators for traceforms."""

from traceforms.reports.csv_report import render_csv, render_csv_body
from traceforms.reports.json_report import render_json, render_json_summary
from traceforms.reports.markdown_report import render_markdown

__all__ = ["render_csv", "render_csv_body", "render_json", "render_json_summary", "render_markdown"]
