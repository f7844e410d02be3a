"""
Abstract base class for experiments.

An experiment turns a configuration into certifications plus a table and
a summary. Experiments are registered with the ExperimentRunner under the
name of the CLI command that runs them.
"""

from abc import ABC, abstractmethod

from traceforms.config import Config
from traceforms.core.models import ExperimentOutput


class Experiment(ABC):
    """
    Abstract base class for experiments.

    run() is synchronous numerics; the runner moves it off the event loop
    and applies the timeout.
    """

    @property
    @abstractmethod
    def name(self) -> str:
        """
        Experiment identifier, identical to the CLI command name.

        Returns:
            Unique name (e.g., "spectrum", "ball-eig")
        """

    @property
    def description(self) -> str:
        return "Base experiment"

    @property
    def version(self) -> str:
        return "0.1.0"

    @abstractmethod
    def run(self, config: Config) -> ExperimentOutput:
        """
        Run the experiment.

        Args:
            config: Effective configuration

        Returns:
            Certifications, table rows and summary

        Raises:
            TraceFormError: On invalid numerical input; the runner reports
                it as a failing certification.
        """

    def is_available(self) -> bool:
        return True

    def get_unavailable_reason(self) -> str | None:
        if self.is_available():
            return None
        return "Experiment dependencies not met"

    async def initialize(self) -> None:  # noqa: B027
        """Called before run(). Default implementation does nothing."""

    async def cleanup(self) -> None:  # noqa: B027
        """Called after run(). Default implementation does nothing."""

    def __repr__(self) -> str:
        available = "available" if self.is_available() else "unavailable"
        return f"<{self.__class__.__name__}(name={self.name!r}, {available})>"
