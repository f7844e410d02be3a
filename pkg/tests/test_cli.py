"""Tests for the command line interface."""

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from traceforms import __version__
from traceforms.cli import (
    EXIT_FAILED,
    EXIT_OK,
    EXIT_USAGE,
    _dict_to_toml,
    cli,
    parse_float_list,
    parse_int_list,
    section,
)


@pytest.fixture
def runner(monkeypatch) -> CliRunner:
    for key in ("TRACEFORMS_OUTPUT_FORMAT", "TRACEFORMS_OUTPUT_OUT_DIR"):
        monkeypatch.delenv(key, raising=False)
    return CliRunner()


def stdout_json(result) -> dict:
    return json.loads(result.stdout)


class TestCommands:
    def test_version(self, runner):
        result = runner.invoke(cli, ["--version"])
        assert result.exit_code == EXIT_OK
        assert __version__ in result.stdout

    def test_graph1d_validate(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(cli, ["graph1d-validate", "--n", "3"])
        assert result.exit_code == EXIT_OK, result.output
        data = stdout_json(result)
        assert data["command"] == "graph1d-validate"
        assert data["passed"] is True
        assert data["summary"]["n"] == 3

    def test_ball_eig(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(cli, ["ball-eig", "--m-max", "2"])
        assert result.exit_code == EXIT_OK, result.output
        data = stdout_json(result)
        assert data["summary"]["eigenvalues"]["0"] == pytest.approx(0.3130352854993313, abs=1e-8)

    def test_annulus_gap(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(cli, ["annulus-gap", "--n", "2,4,8,16,32"])
        assert result.exit_code == EXIT_OK, result.output
        assert stdout_json(result)["summary"]["ns"] == [2, 4, 8, 16, 32]

    def test_markdown_format(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(cli, ["--format", "markdown", "ball-eig"])
        assert result.exit_code == EXIT_OK, result.output
        assert "# traceforms: `ball-eig`" in result.stdout

    def test_out_writes_reports(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(cli, ["--out", "results", "ball-eig", "--m-max", "1"])
            assert result.exit_code == EXIT_OK, result.output
            csv_text = Path("results/ball-eig.csv").read_text()
            data = json.loads(Path("results/ball-eig.json").read_text())
        assert csv_text.startswith("# command: ball-eig\n")
        assert "m,value,closed_form" in csv_text
        assert [row["m"] for row in data["rows"]] == [0, 1]

    def test_failing_certification_exits_2(self, runner):
        with runner.isolated_filesystem():
            Path("atom.json").write_text(json.dumps({"points": [0.0], "weights": [1.0]}))
            result = runner.invoke(
                cli, ["kato-check", "--kernel", "riesz", "--d", "1", "--alpha", "0.5", "--measure", "atom.json"]
            )
        assert result.exit_code == EXIT_FAILED, result.output
        assert stdout_json(result)["passed"] is False

    def test_inconclusive_exits_0(self, runner):
        with runner.isolated_filesystem():
            Path("interval.json").write_text(json.dumps({"family": "interval", "interval": [0.0, 1.0]}))
            Path("kato.toml").write_text("[kato]\ntol = 0.01\n")
            result = runner.invoke(
                cli,
                ["-c", "kato.toml", "kato-check", "--kernel", "riesz", "--d", "1", "--alpha", "0.5",
                 "--measure", "interval.json"],
            )
        assert result.exit_code == EXIT_OK, result.output
        assert stdout_json(result)["counts_by_verdict"]["inconclusive"] == 1

    def test_experiment_error_exits_2(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(cli, ["stationary"])
        assert result.exit_code == EXIT_FAILED
        assert stdout_json(result)["certifications"][0]["check"] == "experiment_error"


class TestUsageErrors:
    def test_invalid_config_values(self, runner):
        with runner.isolated_filesystem():
            Path("bad.json").write_text(json.dumps({"converge": {"k_max": 0}}))
            result = runner.invoke(cli, ["-c", "bad.json", "converge"])
        assert result.exit_code == EXIT_USAGE

    def test_missing_config_file(self, runner):
        result = runner.invoke(cli, ["-c", "does-not-exist.toml", "ball-eig"])
        assert result.exit_code == EXIT_USAGE

    def test_invalid_option(self, runner):
        result = runner.invoke(cli, ["graph1d-validate", "--n", "-1"])
        assert result.exit_code == EXIT_USAGE

    def test_unknown_command(self, runner):
        result = runner.invoke(cli, ["no-such-command"])
        assert result.exit_code == EXIT_USAGE

    def test_bad_list(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(cli, ["annulus-gap", "--n", "2,four"])
        assert result.exit_code == EXIT_USAGE


class TestListing:
    def test_list_checks(self, runner):
        result = runner.invoke(cli, ["list-checks"])
        assert result.exit_code == EXIT_OK
        assert "ball_series" in result.stdout
        assert "kato_criterion" in result.stdout

    def test_list_checks_json(self, runner):
        result = runner.invoke(cli, ["list-checks", "--format", "json"])
        checks = json.loads(result.stdout)
        assert {c["command"] for c in checks} >= {"spectrum", "converge", "kato-check"}

    def test_describe_one_check(self, runner):
        result = runner.invoke(cli, ["list-checks", "--check", "graph_form_equivalence"])
        assert "`graph1d-validate`" in result.stdout

    def test_list_experiments(self, runner):
        result = runner.invoke(cli, ["list-experiments"])
        assert result.exit_code == EXIT_OK
        assert "annulus-gap" in result.stdout
        assert "AVAILABLE" in result.stdout


class TestInit:
    def test_init_toml(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(cli, ["init"])
            assert result.exit_code == EXIT_OK
            content = Path(".traceforms.toml").read_text()
        assert "[converge]" in content
        assert "k_max = 3" in content

    def test_init_json_loads_back(self, runner):
        with runner.isolated_filesystem():
            runner.invoke(cli, ["init", "--format", "json"])
            data = json.loads(Path(".traceforms.json").read_text())
            result = runner.invoke(cli, ["graph1d-validate", "--n", "1"])
        assert data["graph1d"]["n"] == 10
        assert result.exit_code == EXIT_OK

    def test_init_keeps_existing_file(self, runner):
        with runner.isolated_filesystem():
            Path(".traceforms.json").write_text("{}")
            runner.invoke(cli, ["init", "--format", "json"], input="n\n")
            assert Path(".traceforms.json").read_text() == "{}"


class TestHelpers:
    def test_parse_lists(self):
        assert parse_float_list("0.1, 0.01") == [0.1, 0.01]
        assert parse_int_list("2,4") == [2, 4]
        assert parse_float_list(None) is None

    def test_section_drops_missing(self):
        assert section(a=1, b=None, c=False) == {"a": 1, "c": False}

    def test_dict_to_toml(self):
        text = _dict_to_toml({"kato": {"radii": [0.1, 0.01], "s": 1.0}, "output": {"verbose": False}})
        assert "[kato]" in text
        assert "radii = [0.1, 0.01]" in text
        assert "verbose = false" in text
