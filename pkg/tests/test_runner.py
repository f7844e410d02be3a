"""Tests for the experiment runner."""

import asyncio
import time

import pytest

from traceforms.config import Config
from traceforms.core.errors import NonpositiveWeight
from traceforms.core.models import Certification, ExperimentOutput, Verdict
from traceforms.core.runner import ExperimentRunner, create_default_runner
from traceforms.core.taxonomy import CertificationCheck
from traceforms.experiments.base import Experiment


class MockExperiment(Experiment):
    """Mock experiment for testing."""

    def __init__(self, name: str = "mock", output: ExperimentOutput | None = None, error: Exception | None = None):
        self._name = name
        self._output = output or ExperimentOutput()
        self._error = error
        self._available = True
        self.calls = 0

    @property
    def name(self) -> str:
        return self._name

    def run(self, config: Config) -> ExperimentOutput:
        self.calls += 1
        if self._error is not None:
            raise self._error
        return self._output

    def is_available(self) -> bool:
        return self._available


class SlowExperiment(MockExperiment):
    def run(self, config: Config) -> ExperimentOutput:
        time.sleep(0.5)
        return ExperimentOutput()


def passing_output() -> ExperimentOutput:
    return ExperimentOutput(
        certifications=[
            Certification.from_condition(CertificationCheck.BALL_SERIES, True, "ok", "ok", "mock")
        ],
        columns=["m", "value"],
        rows=[{"m": 0, "value": 0.3130352854993313}],
        summary={"tol": 1e-8},
    )


class TestRegistry:
    """Tests for experiment registration."""

    def test_register_experiment(self):
        runner = ExperimentRunner()
        experiment = MockExperiment("test")
        runner.register_experiment(experiment)
        assert runner.get_experiment("test") is experiment

    def test_register_duplicate_raises(self):
        runner = ExperimentRunner()
        runner.register_experiment(MockExperiment("test"))
        with pytest.raises(ValueError, match="already registered"):
            runner.register_experiment(MockExperiment("test"))

    def test_unregister(self):
        runner = ExperimentRunner()
        runner.register_experiment(MockExperiment("test"))
        assert runner.unregister_experiment("test") is True
        assert runner.get_experiment("test") is None
        assert runner.unregister_experiment("test") is False

    def test_list_available(self):
        runner = ExperimentRunner()
        unavailable = MockExperiment("off")
        unavailable._available = False
        runner.register_experiment(MockExperiment("on"))
        runner.register_experiment(unavailable)
        assert len(runner.list_experiments()) == 2
        assert [e.name for e in runner.list_available_experiments()] == ["on"]

    def test_default_runner(self):
        runner = create_default_runner()
        names = [e.name for e in runner.list_experiments()]
        for expected in (
            "spectrum",
            "converge",
            "graph1d-validate",
            "ball-eig",
            "annulus-gap",
            "stationary",
            "kato-check",
        ):
            assert expected in names


class TestRun:
    """Tests for running experiments."""

    @pytest.mark.asyncio
    async def test_run_builds_report(self):
        runner = ExperimentRunner()
        experiment = MockExperiment("mock", passing_output())
        runner.register_experiment(experiment)
        config = Config()
        report = await runner.run("mock", config)
        assert experiment.calls == 1
        assert report.command == "mock"
        assert report.passed
        assert report.rows == [{"m": 0, "value": 0.3130352854993313}]
        assert report.config_hash == config.config_hash()
        assert report.duration_ms is not None
        assert report.metadata == {"experiment_version": "0.1.0"}

    @pytest.mark.asyncio
    async def test_numerical_error_becomes_failure(self):
        runner = ExperimentRunner()
        runner.register_experiment(MockExperiment("bad", error=NonpositiveWeight("weight -1")))
        report = await runner.run("bad", Config())
        assert not report.passed
        (cert,) = report.certifications
        assert cert.check == CertificationCheck.EXPERIMENT_ERROR
        assert cert.verdict == Verdict.FAIL
        assert cert.evidence["error_type"] == "NonpositiveWeight"

    @pytest.mark.asyncio
    async def test_other_errors_propagate(self):
        runner = ExperimentRunner()
        runner.register_experiment(MockExperiment("bug", error=RuntimeError("boom")))
        with pytest.raises(RuntimeError):
            await runner.run("bug", Config())

    @pytest.mark.asyncio
    async def test_timeout(self):
        runner = ExperimentRunner(timeout=0.05)
        runner.register_experiment(SlowExperiment("slow"))
        report = await runner.run("slow", Config())
        (cert,) = report.certifications
        assert cert.verdict == Verdict.FAIL
        assert cert.evidence == {"timeout_seconds": 0.05}

    def test_timeout_bounds_wall_time(self):
        runner = ExperimentRunner(timeout=0.05)
        runner.register_experiment(SlowExperiment("slow"))
        start = time.perf_counter()
        report = asyncio.run(runner.run("slow", Config()))
        assert time.perf_counter() - start < 0.4
        assert not report.passed

    @pytest.mark.asyncio
    async def test_result_without_timeout(self):
        runner = ExperimentRunner()
        runner.register_experiment(SlowExperiment("slow"))
        report = await runner.run("slow", Config())
        assert report.passed
        assert report.duration_ms >= 450

    @pytest.mark.asyncio
    async def test_unknown_experiment(self):
        runner = ExperimentRunner()
        with pytest.raises(ValueError, match="not registered"):
            await runner.run("missing", Config())

    @pytest.mark.asyncio
    async def test_unavailable_experiment(self):
        runner = ExperimentRunner()
        experiment = MockExperiment("off")
        experiment._available = False
        runner.register_experiment(experiment)
        with pytest.raises(ValueError, match="not available"):
            await runner.run("off", Config())
