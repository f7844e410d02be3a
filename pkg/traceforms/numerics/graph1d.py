"""
Explicit trace form of -u'' + u on the lattice Z.

For mu_n = sum_{|k| <= n} a_k delta_k the trace form only sees the values
u(k). The minimal extension between neighbouring atoms is the solution of
-u'' + u = 0 on [k, k+1], whose energy is

    (cosh 1 (p^2 + q^2) - 2 p q) / sinh 1,   p = u(k), q = u(k+1),

and outside [-n, n] the decaying exponential contributes u(+-n)^2. Summing
gives the stiffness matrix A; the mass matrix is B = diag(a_k).
"""

import logging
import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np
from pydantic import BaseModel, Field
from scipy import linalg

from traceforms.core.errors import InvalidParameter, NonpositiveWeight, SingularMass
from traceforms.numerics.kernels import Kernel
from traceforms.numerics.measures import AtomicMeasure
from traceforms.numerics.potentials import operator_matrix
from traceforms.numerics.spectra import cluster_groups, eigendecompose

logger = logging.getLogger(__name__)

SINH1 = math.sinh(1.0)
EDGE_COUPLING = 1.0 / SINH1
VERTEX_COEFF = (math.cosh(1.0) - 1.0) / SINH1

Weights = Callable[[int], float] | Mapping[int, float] | Sequence[float]


class FormVariant(str, Enum):
    """Which lattice form to assemble."""

    DERIVED = "derived"
    PRINTED = "printed"


@dataclass(frozen=True, eq=False)
class GraphFormMatrices:
    """Stiffness A and diagonal mass B of the trace form on {-n..n}."""

    A: np.ndarray
    B: np.ndarray
    n: int
    variant: FormVariant = FormVariant.DERIVED

    @property
    def masses(self) -> np.ndarray:
        return np.diag(self.B).copy()


@dataclass(frozen=True, eq=False)
class GeneralizedSpectrum:
    """Ascending energies of A u = E B u with B-orthonormal eigenvectors."""

    energies: np.ndarray
    vectors: np.ndarray


def lattice_weights(weights: Weights, n: int) -> np.ndarray:
    """a_k for k = -n..n from a callable, a mapping or a sequence of length 2n+1."""
    ks = range(-n, n + 1)
    if callable(weights):
        a = np.array([float(weights(k)) for k in ks])
    elif isinstance(weights, Mapping):
        a = np.array([float(weights[k]) for k in ks])
    else:
        a = np.asarray(weights, dtype=float)
        if len(a) != 2 * n + 1:
            raise InvalidParameter(f"expected {2 * n + 1} weights, got {len(a)}")
    return a


def graph_form_matrix(
    weights: Weights, n: int, variant: FormVariant = FormVariant.DERIVED
) -> GraphFormMatrices:
    """
    Assemble (A, B).

    DERIVED uses every edge k = -n..n-1 and gives each endpoint of an edge
    the vertex term (cosh 1 - 1)/sinh 1, plus the two exterior rays.
    PRINTED keeps edges k = -(n-1)..n-1, vertex terms 2 (cosh 1 - 1)/sinh 1
    on |k| <= n-1 and bare coefficient 1 at +-n.
    """
    if n < 0:
        raise InvalidParameter("cutoff n must be nonnegative")
    a = lattice_weights(weights, n)
    if np.any(a <= 0):
        raise NonpositiveWeight("lattice weights must be strictly positive")
    size = 2 * n + 1
    A = np.zeros((size, size))
    if variant == FormVariant.DERIVED:
        for i in range(size - 1):
            A[i, i] += EDGE_COUPLING + VERTEX_COEFF
            A[i + 1, i + 1] += EDGE_COUPLING + VERTEX_COEFF
            A[i, i + 1] -= EDGE_COUPLING
            A[i + 1, i] -= EDGE_COUPLING
    else:
        for k in range(-(n - 1), n):
            i = k + n
            A[i, i] += EDGE_COUPLING
            A[i + 1, i + 1] += EDGE_COUPLING
            A[i, i + 1] -= EDGE_COUPLING
            A[i + 1, i] -= EDGE_COUPLING
        for k in range(-(n - 1), n):
            A[k + n, k + n] += 2 * VERTEX_COEFF
    A[0, 0] += 1.0
    A[-1, -1] += 1.0
    return GraphFormMatrices(A=A, B=np.diag(a), n=n, variant=variant)


def generalized_eigs(matrices: GraphFormMatrices) -> GeneralizedSpectrum:
    """Solve A u = E B u (symmetric-definite, LAPACK)."""
    masses = np.diag(matrices.B)
    if np.any(masses <= 0):
        raise SingularMass("mass matrix has a nonpositive diagonal entry")
    energies, vectors = linalg.eigh(matrices.A, matrices.B)
    return GeneralizedSpectrum(energies=energies, vectors=vectors)


class GraphValidationReport(BaseModel):
    """Lattice form spectrum against the kernel-matrix spectrum."""

    n: int
    tol: float
    form_energies: list[float]
    kernel_energies: list[float]
    max_relative_discrepancy: float
    multiplicities_match: bool
    printed_form_discrepancy: float = Field(
        description="Same comparison for the form as printed with bare boundary terms"
    )
    passed: bool


def _relative_discrepancy(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b) / np.abs(b)))


def cross_validate(
    weights: Weights,
    n: int,
    tol: float = 1e-9,
    matrices: GraphFormMatrices | None = None,
) -> GraphValidationReport:
    """
    Compare generalized eigenvalues of (A, B) with 1/lambda of S for
    Exponential1D on the same atoms. Pass iff the relative discrepancy
    is below tol. matrices overrides the assembled form (negative controls).
    """
    if tol <= 0:
        raise InvalidParameter("tol must be positive")
    a = lattice_weights(weights, n)
    form = matrices if matrices is not None else graph_form_matrix(a, n)
    measure = AtomicMeasure(points=np.arange(-n, n + 1, dtype=float), weights=a)
    kernel_spectrum = eigendecompose(operator_matrix(Kernel.exponential1d(), measure))
    kernel_energies = kernel_spectrum.energies
    form_energies = generalized_eigs(form).energies
    discrepancy = _relative_discrepancy(form_energies, kernel_energies)
    printed = generalized_eigs(graph_form_matrix(a, n, FormVariant.PRINTED)).energies
    multiplicities = [len(g) for g in cluster_groups(form_energies, kernel_spectrum.multiplicity_tol)]
    logger.debug("lattice form n=%d: discrepancy %.3e", n, discrepancy)
    return GraphValidationReport(
        n=n,
        tol=tol,
        form_energies=form_energies.tolist(),
        kernel_energies=kernel_energies.tolist(),
        max_relative_discrepancy=discrepancy,
        multiplicities_match=multiplicities == kernel_spectrum.multiplicities,
        printed_form_discrepancy=_relative_discrepancy(printed, kernel_energies),
        passed=discrepancy < tol,
    )
