"""Tests for report generators."""

import json
import math

import pytest

from traceforms.core.models import Certification, ExperimentReport, Verdict
from traceforms.core.taxonomy import CertificationCheck
from traceforms.reports import (
    render_csv,
    render_csv_body,
    render_json,
    render_json_summary,
    render_markdown,
)
from traceforms.reports.markdown_report import MAX_TABLE_ROWS


@pytest.fixture
def report() -> ExperimentReport:
    return ExperimentReport(
        command="ball-eig",
        config_hash="0" * 64,
        certifications=[
            Certification(
                check=CertificationCheck.BALL_SERIES,
                verdict=Verdict.PASS,
                title="Series matches the closed form",
                description="closed form lies inside the certified truncation bracket",
                evidence={"errors": [1e-12]},
                experiment="ball-eig",
            ),
            Certification(
                check=CertificationCheck.BALL_SERIES,
                verdict=Verdict.FAIL,
                title="Energies increase with the harmonic degree",
                description="E_m for m = 0..1",
                experiment="ball-eig",
            ),
        ],
        columns=["m", "value", "tail_bound"],
        rows=[
            {"m": 0, "value": 0.3130352854993313, "tail_bound": 1e-9},
            {"m": 1, "value": 1.194528049465325, "tail_bound": math.inf},
        ],
        summary={"tol": 1e-8},
        duration_ms=12,
        metadata={"experiment_version": "0.1.0"},
    )


class TestJsonReport:
    def test_render_json(self, report):
        data = json.loads(render_json(report))
        assert data["command"] == "ball-eig"
        assert data["passed"] is False
        assert data["counts_by_verdict"] == {"pass": 1, "fail": 1, "inconclusive": 0}
        assert data["summary"] == {"tol": 1e-8}
        assert data["schema_version"] == "1.0"
        assert "rows" not in data
        assert data["duration_ms"] == 12

    def test_include_table(self, report):
        data = json.loads(render_json(report, include_table=True))
        assert data["columns"] == ["m", "value", "tail_bound"]
        assert data["rows"][0]["value"] == 0.3130352854993313

    def test_without_metadata(self, report):
        data = json.loads(render_json(report, include_metadata=False))
        assert "metadata" not in data
        assert "duration_ms" not in data

    def test_compact(self, report):
        assert "\n" not in render_json(report, indent=None)

    def test_summary_line(self, report):
        data = json.loads(render_json_summary(report))
        assert data["failed_checks"] == ["ball_series"]
        assert data["certifications"] == 2


class TestCsvReport:
    def test_body(self, report):
        lines = render_csv_body(report).splitlines()
        assert lines[0] == "m,value,tail_bound"
        assert lines[1] == "0,0.3130352854993313,1e-09"
        assert lines[2] == "1,1.194528049465325,inf"

    def test_floats_round_trip(self, report):
        value = render_csv_body(report).splitlines()[1].split(",")[1]
        assert float(value) == 0.3130352854993313

    def test_header_comments(self, report):
        text = render_csv(report)
        lines = text.splitlines()
        assert lines[0] == "# command: ball-eig"
        assert lines[2] == f"# config_hash: {'0' * 64}"
        body = "\n".join(line for line in lines if not line.startswith("#")) + "\n"
        assert body == render_csv_body(report)

    def test_missing_cells_are_blank(self, report):
        report.rows.append({"m": 2})
        assert render_csv_body(report).splitlines()[-1] == "2,,"


class TestMarkdownReport:
    def test_render_markdown(self, report):
        text = render_markdown(report)
        assert "# traceforms: `ball-eig`" in text
        assert "Failed" in text
        assert "| ✅ pass | Ball Eigenvalue Series | Series matches the closed form |" in text
        assert "## Table" in text
        assert "## Details" not in text

    def test_verbose(self, report):
        text = render_markdown(report, verbose=True)
        assert "## Details" in text
        assert '"errors"' in text

    def test_table_is_capped(self, report):
        report.rows = [{"m": m, "value": float(m), "tail_bound": 0.0} for m in range(MAX_TABLE_ROWS + 5)]
        text = render_markdown(report)
        assert "5 more rows in the CSV output" in text
