"""
Pytest configuration for traceforms tests.

Loads pytest-asyncio for the runner tests and provides the measures and
kernels the acceptance numbers are stated for.
"""

import math

import numpy as np
import pytest

from traceforms.config import Config
from traceforms.numerics.kernels import Kernel
from traceforms.numerics.measures import (
    AtomicMeasure,
    SphereFamilyMeasure,
    geometric_weights,
    truncate_sequence,
)
from traceforms.numerics.potentials import EvaluationGrid

# Explicitly configure pytest-asyncio
pytest_plugins = ("pytest_asyncio",)


@pytest.fixture(scope="session")
def anyio_backend():
    """Use asyncio as the async backend."""
    return "asyncio"


@pytest.fixture
def exp_kernel() -> Kernel:
    return Kernel.exponential1d()


@pytest.fixture
def newton_kernel() -> Kernel:
    return Kernel.newtonian(3)


@pytest.fixture
def two_atoms() -> AtomicMeasure:
    """delta_0 + delta_1 on the line."""
    return AtomicMeasure(points=np.array([0.0, 1.0]), weights=np.array([1.0, 1.0]))


@pytest.fixture
def unit_surface() -> SphereFamilyMeasure:
    """Surface measure of the unit sphere, mass 4 pi."""
    return SphereFamilyMeasure.surface(1.0)


@pytest.fixture
def line_grid() -> EvaluationGrid:
    return EvaluationGrid.build(-5.0, 5.0, 0.01)


@pytest.fixture
def lattice_sequence():
    """a_k = 2^-|k| truncated at n = 0..10 with limit N_max = 40."""
    return truncate_sequence(geometric_weights(0.5), list(range(11)), 40)


@pytest.fixture
def sphere_config() -> Config:
    """Newtonian kernel with the unit surface measure and the thinning-shell family."""
    return Config.model_validate(
        {
            "kernel": {"type": "newtonian"},
            "measure": {"family": "spheres", "radii": [1.0], "masses": [4 * math.pi]},
            "sequence": {"kind": "thinning-shell", "schedule": [2, 4, 8], "slices": 2},
            "grid": {"lo": 0.0, "hi": 3.0, "step": 0.05},
        }
    )
