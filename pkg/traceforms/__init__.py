"""
traceforms - trace Dirichlet forms as weighted Green-kernel matrices.

For a finite measure mu with finite or concentric-sphere support, the
trace form E^mu is realized exactly by the weighted kernel matrix
S = W^1/2 G W^1/2: its eigenvalues lambda are those of K^mu and the
energies of E^mu are 1/lambda. On top of this the package computes
potentials, resolvents and stationary solutions, and certifies spectral
convergence along monotone measure families.
"""

__version__ = "0.1.0"
__author__ = "traceforms Contributors"
__license__ = "Apache-2.0"

from traceforms.core.models import Certification, ExperimentReport, Verdict
from traceforms.core.runner import ExperimentRunner
from traceforms.numerics.kernels import Kernel
from traceforms.numerics.measures import AtomicMeasure, MeasureSequence, SphereFamilyMeasure
from traceforms.numerics.potentials import operator_matrix
from traceforms.numerics.spectra import eigendecompose

__all__ = [
    "AtomicMeasure",
    "Certification",
    "ExperimentReport",
    "ExperimentRunner",
    "Kernel",
    "MeasureSequence",
    "SphereFamilyMeasure",
    "Verdict",
    "eigendecompose",
    "operator_matrix",
]
