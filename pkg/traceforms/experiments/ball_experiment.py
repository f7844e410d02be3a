"""
Unit ball experiments.

ball-eig tabulates the trace-form energies of the unit sphere by harmonic
degree; annulus-gap measures how fast the shell potential vanishes.
"""

import logging

from traceforms.config import Config
from traceforms.core.models import Certification, ExperimentOutput
from traceforms.core.taxonomy import CertificationCheck
from traceforms.experiments.base import Experiment
from traceforms.numerics.ball import (
    annulus_gap_slope,
    annulus_potential_gap,
    ball_eigenvalue,
    ball_eigenvalue_table,
)

logger = logging.getLogger(__name__)

ROUNDING = 1e-12


class BallEigExperiment(Experiment):
    @property
    def name(self) -> str:
        return "ball-eig"

    @property
    def description(self) -> str:
        return "Series m + 2 sum 1/(1 + j_mk^2) against i_m'(1)/i_m(1)"

    def run(self, config: Config) -> ExperimentOutput:
        settings = config.ball
        if settings.m_max is not None:
            table = ball_eigenvalue_table(settings.m_max, settings.tol)
        else:
            table = [ball_eigenvalue(settings.m, settings.tol)]
        logger.info("ball-eig: %d harmonic degrees", len(table))

        errors = [abs(e.value - e.closed_form) for e in table]
        values = [e.value for e in table]
        certifications = [
            Certification.from_condition(
                CertificationCheck.BALL_SERIES,
                all(err <= e.error_bound + ROUNDING for err, e in zip(errors, table, strict=True)),
                "Series matches the closed form",
                "closed form lies inside the certified truncation bracket",
                self.name,
                {"errors": errors, "error_bounds": [e.error_bound for e in table]},
            )
        ]
        if len(table) > 1:
            certifications.append(
                Certification.from_condition(
                    CertificationCheck.BALL_SERIES,
                    all(b > a for a, b in zip(values, values[1:], strict=False)),
                    "Energies increase with the harmonic degree",
                    f"E_m for m = 0..{table[-1].m}",
                    self.name,
                    {"values": values},
                )
            )
        rows = [
            {
                "m": e.m,
                "value": e.value,
                "closed_form": e.closed_form,
                "error_bound": e.error_bound,
                "tail_bound": e.tail_bound,
                "truncation": e.truncation,
                "multiplicity": e.multiplicity,
            }
            for e in table
        ]
        return ExperimentOutput(
            certifications=certifications,
            columns=["m", "value", "closed_form", "error_bound", "tail_bound", "truncation", "multiplicity"],
            rows=rows,
            summary={"tol": settings.tol, "eigenvalues": {str(e.m): e.value for e in table}},
        )


class AnnulusGapExperiment(Experiment):
    @property
    def name(self) -> str:
        return "annulus-gap"

    @property
    def description(self) -> str:
        return "Decay of the shell potential gap sup_x int_shell |x - y|^-1 dy in n"

    def run(self, config: Config) -> ExperimentOutput:
        settings = config.ball
        gaps = [
            annulus_potential_gap(n, settings.quadrature_points, settings.radial_points)
            for n in sorted(settings.ns)
        ]
        slope = annulus_gap_slope(gaps)
        values = [g.value for g in gaps]
        logger.info("annulus-gap: slope %.4f over %d cutoffs", slope, len(gaps))
        certifications = [
            Certification.from_condition(
                CertificationCheck.ANNULUS_GAP_DECAY,
                abs(slope + 1.0) <= settings.slope_tol
                and all(b < a for a, b in zip(values, values[1:], strict=False)),
                "Shell potential decays like 1/n",
                f"log-log slope within -1 +- {settings.slope_tol}",
                self.name,
                {"slope": slope, "values": values},
            )
        ]
        rows = [g.model_dump() for g in gaps]
        return ExperimentOutput(
            certifications=certifications,
            columns=["n", "value", "argmax_radius", "cavity_value"],
            rows=rows,
            summary={"slope": slope, "ns": [g.n for g in gaps]},
        )
