"""
Stationary solution experiment.

Solves -Delta u_n + a u_n mu = u mu for a concentric sphere family and
certifies the defining identity, harmonicity off the spheres, the flux
jump at each sphere and the far-field decay. With a sphere sequence
configured it also checks the convergence bound along the family.
"""

import logging

import numpy as np

from traceforms.config import Config
from traceforms.core.errors import InvalidParameter
from traceforms.core.models import Certification, ExperimentOutput
from traceforms.core.taxonomy import CertificationCheck
from traceforms.experiments.base import Experiment
from traceforms.numerics.measures import Direction, SphereFamilyMeasure
from traceforms.numerics.stationary import (
    far_field_error,
    harmonicity_residual,
    radial_derivative_jump,
    resolvent_identity_residual,
    stationary_compare,
    stationary_solve,
)

logger = logging.getLogger(__name__)

# unit vector along (1, 1, 1)
DIAGONAL = np.full(3, 1.0 / np.sqrt(3.0))


def harmonic_test_radii(measure: SphereFamilyMeasure, radii: np.ndarray) -> np.ndarray:
    """Sample radii well inside the innermost sphere or well outside the outermost."""
    if measure.is_zero:
        return radii
    inner, outer = measure.radii[0], measure.radii[-1]
    return radii[(radii <= inner / 2) | (radii >= 2 * outer)]


def off_support_radii(measure: SphereFamilyMeasure, radii: np.ndarray, margin: float) -> np.ndarray:
    if measure.is_zero:
        return radii
    gap = np.min(np.abs(radii[:, None] - measure.radii[None, :]), axis=1)
    return radii[gap > margin]


class StationaryExperiment(Experiment):
    @property
    def name(self) -> str:
        return "stationary"

    @property
    def description(self) -> str:
        return "Stationary solutions (1 + a G^mu)^-1 G^mu u on concentric spheres"

    def run(self, config: Config) -> ExperimentOutput:
        settings = config.stationary
        measure = config.measure.build()
        if not isinstance(measure, SphereFamilyMeasure):
            raise InvalidParameter("stationary needs measure.family = 'spheres'")
        u = settings.u if isinstance(settings.u, float) else np.asarray(settings.u)
        field = stationary_solve(measure, settings.alpha, u)

        radii = np.linspace(0.0, settings.r_max, settings.samples)
        harmonic_points = harmonic_test_radii(measure, radii)[:, None] * DIAGONAL[None, :]
        off_points = off_support_radii(measure, radii, 2 * settings.h)[:, None] * DIAGONAL[None, :]
        identity = resolvent_identity_residual(field, off_points)
        harmonic = harmonicity_residual(field, harmonic_points, settings.h) if len(harmonic_points) else 0.0
        jumps = radial_derivative_jump(field, settings.jump_h)
        far = far_field_error(field, settings.far_radius)
        logger.debug("stationary field on %d spheres, alpha=%g", measure.size, settings.alpha)

        certifications = [
            Certification.from_condition(
                CertificationCheck.STATIONARY_IDENTITY,
                identity < settings.identity_tol,
                "Stationary field satisfies its defining identity",
                "u_n + a G^mu u_n = G^mu u on the spheres and off the support",
                self.name,
                {"residual": identity, "tol": settings.identity_tol},
            ),
            Certification.from_condition(
                CertificationCheck.STATIONARY_IDENTITY,
                far < settings.far_tol,
                "Stationary field decays like a point charge",
                f"|x| u_n(x) against sum m_i v_i / 4 pi at |x| = {settings.far_radius:g}",
                self.name,
                {"relative_error": far, "constant": field.far_field_constant()},
            ),
            Certification.from_condition(
                CertificationCheck.STATIONARY_HARMONICITY,
                harmonic < settings.harmonic_tol,
                "Stationary field is harmonic off the spheres",
                f"7-point Laplacian with h = {settings.h:g} at {len(harmonic_points)} points",
                self.name,
                {"residual": harmonic, "tol": settings.harmonic_tol},
            ),
            Certification.from_condition(
                CertificationCheck.STATIONARY_FLUX_JUMP,
                all(j.error <= settings.jump_tol * max(1.0, abs(j.expected)) for j in jumps),
                "Radial derivative jumps by the surface source",
                "u'(R-) - u'(R+) = (u - a u_n) m / (4 pi R^2) at every sphere",
                self.name,
                {"jumps": [{**j.model_dump(), "error": j.error} for j in jumps]},
            ),
        ]

        summary: dict = {
            "alpha": settings.alpha,
            "boundary_values": field.boundary_values.tolist(),
            "coefficients": field.coefficients.tolist(),
            "far_field_constant": field.far_field_constant(),
        }
        if config.sequence.kind != "truncated-exponential":
            certifications.append(self._compare(config, summary))

        values = field.radial(radii)
        return ExperimentOutput(
            certifications=certifications,
            columns=["r", "u_n"],
            rows=[{"r": float(r), "u_n": float(v)} for r, v in zip(radii, values, strict=True)],
            summary=summary,
        )

    def _compare(self, config: Config, summary: dict) -> Certification:
        settings = config.stationary
        sequence = config.sequence.build()
        largest = sequence.terms[0] if sequence.direction == Direction.DECREASING else sequence.limit
        grid = config.grid.build(dim=3, measures=(largest,))
        u = settings.u if isinstance(settings.u, float) else np.asarray(settings.u)
        comparison = stationary_compare(sequence, settings.alpha, u, grid, threads=config.runner.threads)
        summary["comparison"] = {
            "monotone": comparison.monotone,
            "rows": [r.model_dump() for r in comparison.rows],
        }
        return Certification.from_condition(
            CertificationCheck.STATIONARY_BOUND,
            comparison.passed,
            "Stationary fields converge within the potential bound",
            "sup |u_n - u_inf| <= ||u|| ||G^nu_n 1|| at every n and nonincreasing in n",
            self.name,
            {"monotone": comparison.monotone, "rows": [r.model_dump() for r in comparison.rows]},
        )

