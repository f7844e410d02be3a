"""
Experiment runner.

Keeps the registry of experiments, runs one per invocation off the event
loop with an optional timeout, turns numerical failures into failing
certifications and assembles the ExperimentReport.
"""

import asyncio
import logging
import threading
import time
from typing import TYPE_CHECKING

from traceforms.config import Config
from traceforms.core.errors import TraceFormError
from traceforms.core.models import (
    Certification,
    ExperimentOutput,
    ExperimentReport,
    Verdict,
)
from traceforms.core.taxonomy import CertificationCheck

if TYPE_CHECKING:
    from traceforms.experiments.base import Experiment

logger = logging.getLogger(__name__)


class ExperimentRunner:
    """
    Runs registered experiments.

    The runner:
    - Manages registered experiments
    - Runs one experiment with an optional timeout
    - Converts numerical errors and timeouts into failing certifications
    - Stamps the report with the config hash and the wall time
    """

    def __init__(self, timeout: float | None = None) -> None:
        self._experiments: dict[str, Experiment] = {}
        self.timeout = timeout

    def register_experiment(self, experiment: "Experiment") -> None:
        """
        Register an experiment.

        Raises:
            ValueError: If an experiment with the same name is already registered
        """
        if experiment.name in self._experiments:
            raise ValueError(
                f"Experiment '{experiment.name}' is already registered. "
                "Use unregister_experiment first to replace it."
            )
        self._experiments[experiment.name] = experiment

    def unregister_experiment(self, name: str) -> bool:
        if name in self._experiments:
            del self._experiments[name]
            return True
        return False

    def get_experiment(self, name: str) -> "Experiment | None":
        return self._experiments.get(name)

    def list_experiments(self) -> list["Experiment"]:
        return list(self._experiments.values())

    def list_available_experiments(self) -> list["Experiment"]:
        return [e for e in self._experiments.values() if e.is_available()]

    def _select(self, name: str) -> "Experiment":
        experiment = self._experiments.get(name)
        if experiment is None:
            raise ValueError(
                f"Experiment '{name}' is not registered. Available: {list(self._experiments)}"
            )
        if not experiment.is_available():
            reason = experiment.get_unavailable_reason() or "Unknown reason"
            raise ValueError(f"Experiment '{name}' is not available: {reason}")
        return experiment

    async def _execute(self, experiment: "Experiment", config: Config) -> ExperimentOutput:
        """
        Run the experiment on a daemon worker thread.

        A timed-out run is abandoned, not interrupted: the thread keeps its
        CPU until the numerics return, but neither the event loop nor
        interpreter shutdown waits for it.
        """
        loop = asyncio.get_running_loop()
        future: asyncio.Future[ExperimentOutput] = loop.create_future()

        def settle(result: ExperimentOutput | None, error: Exception | None) -> None:
            if future.done():
                return
            if error is not None:
                future.set_exception(error)
            else:
                future.set_result(result)  # type: ignore[arg-type]

        def post(result: ExperimentOutput | None, error: Exception | None) -> None:
            try:
                loop.call_soon_threadsafe(settle, result, error)
            except RuntimeError:
                logger.debug("event loop closed before %s finished", experiment.name)

        def work() -> None:
            try:
                result = experiment.run(config)
            except Exception as e:
                post(None, e)
            else:
                post(result, None)

        threading.Thread(target=work, name=f"traceforms-{experiment.name}", daemon=True).start()
        if not self.timeout:
            return await future
        try:
            return await asyncio.wait_for(future, timeout=self.timeout)
        except asyncio.TimeoutError:
            logger.warning("experiment %s exceeded %ss; abandoning its worker thread", experiment.name, self.timeout)
            raise

    def _failure(self, experiment: "Experiment", title: str, description: str, evidence: dict) -> ExperimentOutput:
        return ExperimentOutput(
            certifications=[
                Certification(
                    check=CertificationCheck.EXPERIMENT_ERROR,
                    verdict=Verdict.FAIL,
                    title=title,
                    description=description,
                    evidence=evidence,
                    experiment=experiment.name,
                )
            ]
        )

    async def run(self, name: str, config: Config) -> ExperimentReport:
        """
        Run the named experiment.

        Returns:
            ExperimentReport with certifications, table and provenance

        Raises:
            ValueError: If the experiment is unknown or unavailable
        """
        experiment = self._select(name)
        start_time = time.time()
        await experiment.initialize()
        try:
            try:
                output = await self._execute(experiment, config)
            except asyncio.TimeoutError:
                output = self._failure(
                    experiment,
                    f"Experiment '{name}' timed out",
                    f"Run abandoned after {self.timeout} seconds",
                    {"timeout_seconds": self.timeout},
                )
            except TraceFormError as e:
                logger.info("experiment %s failed: %s", name, e)
                output = self._failure(
                    experiment,
                    f"Experiment '{name}' failed",
                    str(e),
                    {"error_type": type(e).__name__, "error_message": str(e)},
                )
        finally:
            await experiment.cleanup()

        return ExperimentReport(
            command=name,
            certifications=output.certifications,
            columns=output.columns,
            rows=output.rows,
            summary=output.summary,
            config_hash=config.config_hash(),
            duration_ms=int((time.time() - start_time) * 1000),
            metadata={"experiment_version": experiment.version},
        )


def create_default_runner(timeout: float | None = None) -> ExperimentRunner:
    """Runner with every built-in experiment and discovered plugins registered."""
    from traceforms.experiments import get_all_experiments_with_plugins

    runner = ExperimentRunner(timeout=timeout)
    for experiment in get_all_experiments_with_plugins():
        runner.register_experiment(experiment)
    return runner
