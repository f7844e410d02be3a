"""Lattice trace form validation for a_k = rate^|k|."""

import logging

import numpy as np

from traceforms.config import Config
from traceforms.core.models import Certification, ExperimentOutput
from traceforms.core.taxonomy import CertificationCheck
from traceforms.experiments.base import Experiment
from traceforms.numerics.graph1d import (
    GraphFormMatrices,
    GraphValidationReport,
    cross_validate,
    graph_form_matrix,
)
from traceforms.numerics.measures import geometric_weights

logger = logging.getLogger(__name__)


def without_rays(matrices: GraphFormMatrices) -> GraphFormMatrices:
    """The form with the two exterior ray terms removed."""
    A = matrices.A.copy()
    A[0, 0] -= 1.0
    A[-1, -1] -= 1.0
    return GraphFormMatrices(A=A, B=matrices.B, n=matrices.n, variant=matrices.variant)


class Graph1dExperiment(Experiment):
    @property
    def name(self) -> str:
        return "graph1d-validate"

    @property
    def description(self) -> str:
        return "Explicit lattice trace form against the exponential kernel matrix"

    def run(self, config: Config) -> ExperimentOutput:
        settings = config.graph1d
        weights = geometric_weights(settings.rate)
        reports: list[GraphValidationReport] = [
            cross_validate(weights, n, settings.tol) for n in range(settings.n + 1)
        ]
        control = cross_validate(
            weights,
            settings.n,
            settings.tol,
            matrices=without_rays(graph_form_matrix(weights, settings.n)),
        )
        logger.debug("negative control discrepancy %.3e", control.max_relative_discrepancy)

        worst = max(r.max_relative_discrepancy for r in reports)
        certifications = [
            Certification.from_condition(
                CertificationCheck.GRAPH_FORM_EQUIVALENCE,
                all(r.passed and r.multiplicities_match for r in reports),
                "Lattice form and kernel matrix share their spectrum",
                f"n = 0..{settings.n}, relative tolerance {settings.tol:g}",
                self.name,
                {
                    "max_relative_discrepancy": worst,
                    "printed_form_discrepancy": {str(r.n): r.printed_form_discrepancy for r in reports},
                },
            ),
            Certification.from_condition(
                CertificationCheck.GRAPH_FORM_EQUIVALENCE,
                not control.passed,
                "Form without exterior rays is rejected",
                "negative control: dropping the ray terms must break the agreement",
                self.name,
                {"control_discrepancy": control.max_relative_discrepancy},
            ),
        ]
        rows = [
            {
                "n": r.n,
                "k": k,
                "form_energy": fe,
                "kernel_energy": ke,
                "relative_error": float(abs(fe - ke) / abs(ke)),
            }
            for r in reports
            for k, (fe, ke) in enumerate(zip(r.form_energies, r.kernel_energies, strict=True))
        ]
        summary = {
            "rate": settings.rate,
            "n": settings.n,
            "tol": settings.tol,
            "max_relative_discrepancy": worst,
            "multiplicities_match": all(r.multiplicities_match for r in reports),
            "printed_form_max_discrepancy": float(np.max([r.printed_form_discrepancy for r in reports])),
            "negative_control_discrepancy": control.max_relative_discrepancy,
        }
        return ExperimentOutput(
            certifications=certifications,
            columns=["n", "k", "form_energy", "kernel_energy", "relative_error"],
            rows=rows,
            summary=summary,
        )
