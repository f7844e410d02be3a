"""
Spectrum experiment.

Builds S for one measure, decomposes it and certifies the properties every
spectrum must have: the Hardy sandwich, the resolvent identity, agreement
of the symmetric and unsymmetrized representations, the fixed point of the
continuous eigenfunction extension and the Rayleigh-Ritz bound.
"""

import logging

import numpy as np

from traceforms.config import Config
from traceforms.core.errors import InvalidParameter
from traceforms.core.models import Certification, ExperimentOutput
from traceforms.core.taxonomy import CertificationCheck
from traceforms.experiments.base import Experiment
from traceforms.numerics.kato import LebesgueInterval
from traceforms.numerics.potentials import (
    hardy_constant_bounds,
    operator_matrix,
    resolvent_identity_residual,
)
from traceforms.numerics.spectra import (
    eigendecompose,
    extension_fixed_point_residual,
    rayleigh_quotient_check,
    spectrum_consistency,
)

logger = logging.getLogger(__name__)

ORTHONORMALITY_TOL = 1e-10
PAIR_RESIDUAL_TOL = 1e-10
RESOLVENT_TOL = 1e-10
EXTENSION_TOL = 1e-9


def spread(points: np.ndarray, count: int) -> np.ndarray:
    """count points taken evenly from the array (all of them if fewer)."""
    if len(points) <= count:
        return points
    return points[np.linspace(0, len(points) - 1, count).round().astype(int)]


class SpectrumExperiment(Experiment):
    """Spectrum of K^mu and E^mu for a single measure."""

    @property
    def name(self) -> str:
        return "spectrum"

    @property
    def description(self) -> str:
        return "Eigenvalues of K^mu, energies of the trace form and their consistency checks"

    def run(self, config: Config) -> ExperimentOutput:
        kernel = config.kernel.build()
        measure = config.measure.build()
        if isinstance(measure, LebesgueInterval):
            raise InvalidParameter("the Lebesgue interval is only accepted by kato-check")
        grid = config.grid.build(dim=measure.dim, measures=(measure,))
        operator = operator_matrix(kernel, measure)
        result = eigendecompose(operator, config.spectrum.multiplicity_tol)
        logger.debug("spectrum of %d x %d operator", operator.size, operator.size)

        lower, upper = hardy_constant_bounds(kernel, measure, grid)
        consistency = spectrum_consistency(operator, result)
        v = result.eigenvectors
        orthonormality = float(np.max(np.abs(v.T @ v - np.eye(result.size))))
        norm = max(result.top(), np.finfo(float).tiny)
        pair_residual = float(
            np.max(np.linalg.norm(operator.matrix @ v - v * result.lambdas[None, :], axis=0)) / norm
        )
        off_support = spread(grid.off_support(measure, margin=grid.step / 2), config.spectrum.extension_points)
        extension = extension_fixed_point_residual(kernel, measure, result, off_support)
        rayleigh = rayleigh_quotient_check(
            operator, result, config.spectrum.rayleigh_trials, config.runner.seed
        )
        resolvent = resolvent_identity_residual(operator, config.spectrum.alpha)

        certifications = [
            Certification.from_condition(
                CertificationCheck.HARDY_SANDWICH,
                lower <= upper * (1 + 1e-12),
                "Hardy constant bounds are ordered",
                "largest eigenvalue of S <= sup of G^mu 1 on the grid",
                self.name,
                {"lower": lower, "upper": upper},
            ),
            Certification.from_condition(
                CertificationCheck.RESOLVENT_IDENTITY,
                resolvent <= RESOLVENT_TOL * max(1.0, norm),
                "Resolvent identity holds",
                f"max |S - R_a - a R_a S| at a = {config.spectrum.alpha}",
                self.name,
                {"residual": resolvent, "alpha": config.spectrum.alpha},
            ),
            Certification.from_condition(
                CertificationCheck.SPECTRUM_REPRESENTATION,
                consistency["max_discrepancy"] < config.spectrum.consistency_tol
                and consistency["multiplicities_match"]
                and orthonormality < ORTHONORMALITY_TOL
                and pair_residual < PAIR_RESIDUAL_TOL,
                "Symmetric and unsymmetrized spectra agree",
                "eigenvalues of W^1/2 G W^1/2 and of G W, orthonormal eigenvectors",
                self.name,
                {
                    **consistency,
                    "orthonormality": orthonormality,
                    "pair_residual": pair_residual,
                },
            ),
            Certification.from_condition(
                CertificationCheck.EIGENFUNCTION_EXTENSION,
                extension < EXTENSION_TOL,
                "Continuous eigenfunction extensions are fixed points",
                f"|G^mu f - lambda f| / (lambda ||u||) at {len(off_support)} off-support points",
                self.name,
                {"residual": extension, "points": len(off_support)},
            ),
            Certification.from_condition(
                CertificationCheck.RAYLEIGH_RITZ,
                bool(rayleigh["holds"]),
                "Lowest energy is below every sampled Rayleigh quotient",
                f"{config.spectrum.rayleigh_trials} random unit vectors",
                self.name,
                rayleigh,
            ),
        ]

        group_of = {i: g for g, members in enumerate(result.groups) for i in members}
        rows = [
            {
                "k": k,
                "lambda": float(result.lambdas[k]),
                "energy": float(result.energies[k]),
                "group": group_of[k],
            }
            for k in range(result.size)
        ]
        summary = {
            "size": result.size,
            "lambdas": result.lambdas.tolist(),
            "energies": result.energies.tolist(),
            "multiplicities": result.multiplicities,
            "hardy": {"lower": lower, "upper": upper},
        }
        return ExperimentOutput(
            certifications=certifications,
            columns=["k", "lambda", "energy", "group"],
            rows=rows,
            summary=summary,
        )
