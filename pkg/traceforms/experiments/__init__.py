"""
Experiments for traceforms.

Each experiment backs one CLI command and turns the effective
configuration into certifications, a table and a summary.

Supports custom experiments via entry points:
  [project.entry-points."traceforms.experiments"]
  my_experiment = "my_package.experiments:MyExperiment"
"""

import warnings
from importlib.metadata import entry_points

from traceforms.experiments.ball_experiment import AnnulusGapExperiment, BallEigExperiment
from traceforms.experiments.base import Experiment
from traceforms.experiments.converge_experiment import ConvergeExperiment
from traceforms.experiments.graph1d_experiment import Graph1dExperiment
from traceforms.experiments.kato_experiment import KatoExperiment
from traceforms.experiments.spectrum_experiment import SpectrumExperiment
from traceforms.experiments.stationary_experiment import StationaryExperiment

ENTRY_POINT_GROUP = "traceforms.experiments"

__all__ = [
    "Experiment",
    "SpectrumExperiment",
    "ConvergeExperiment",
    "Graph1dExperiment",
    "BallEigExperiment",
    "AnnulusGapExperiment",
    "StationaryExperiment",
    "KatoExperiment",
]


def get_default_experiments() -> list[Experiment]:
    """One instance of every built-in experiment, in CLI order."""
    return [
        SpectrumExperiment(),
        ConvergeExperiment(),
        Graph1dExperiment(),
        BallEigExperiment(),
        AnnulusGapExperiment(),
        StationaryExperiment(),
        KatoExperiment(),
    ]


def discover_custom_experiments() -> dict[str, type[Experiment]]:
    """
    Discover custom experiments via entry points.

    Returns:
        Dictionary mapping entry point names to experiment classes
    """
    custom: dict[str, type[Experiment]] = {}
    try:
        eps = entry_points().select(group=ENTRY_POINT_GROUP)
    except Exception as e:
        warnings.warn(f"Failed to discover custom experiments: {e}", stacklevel=2)
        return custom

    for ep in eps:
        try:
            experiment_class = ep.load()
        except Exception as e:
            warnings.warn(f"Failed to load custom experiment '{ep.name}': {e}", stacklevel=2)
            continue
        if isinstance(experiment_class, type) and issubclass(experiment_class, Experiment):
            custom[ep.name] = experiment_class
        else:
            warnings.warn(f"Custom experiment '{ep.name}' is not a subclass of Experiment", stacklevel=2)
    return custom


def get_all_experiments_with_plugins() -> list[Experiment]:
    """Built-in experiments plus available plugins whose names do not clash."""
    experiments = get_default_experiments()
    taken = {e.name for e in experiments}
    for name, experiment_class in discover_custom_experiments().items():
        try:
            experiment = experiment_class()
        except Exception as e:
            warnings.warn(f"Custom experiment '{name}' failed to instantiate: {e}", stacklevel=2)
            continue
        if experiment.is_available() and experiment.name not in taken:
            experiments.append(experiment)
            taken.add(experiment.name)
    return experiments
