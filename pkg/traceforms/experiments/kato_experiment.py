"""Admissibility (G-Kato) tests for a single measure."""

import logging

from traceforms.config import Config
from traceforms.core.models import Certification, ExperimentOutput, Verdict
from traceforms.core.taxonomy import CertificationCheck
from traceforms.experiments.base import Experiment
from traceforms.numerics.kato import kato_check, volume_growth_check

logger = logging.getLogger(__name__)


class KatoExperiment(Experiment):
    @property
    def name(self) -> str:
        return "kato-check"

    @property
    def description(self) -> str:
        return "Kato criterion and volume-growth test for a measure and kernel"

    def run(self, config: Config) -> ExperimentOutput:
        settings = config.kato
        kernel = config.kernel.build()
        measure = config.measure.build()
        grid = config.grid.build(dim=measure.dim, measures=(measure,))
        report = kato_check(kernel, measure, settings.radii, grid, settings.tol, config.runner.threads)
        if settings.s is not None:
            report.apply_growth(volume_growth_check(measure, settings.s, grid, settings.radii, beta=report.beta))

        certifications = [
            Certification(
                check=CertificationCheck.KATO_CRITERION,
                verdict=report.verdict,
                title=f"Kato criterion: {report.verdict.value}",
                description=report.note or f"sup-integrals against tol {settings.tol:g}",
                evidence={"beta": report.beta, "sup_integrals": report.sup_integrals},
                experiment=self.name,
            )
        ]
        if report.growth is not None:
            growth = report.growth
            certifications.append(
                Certification(
                    check=CertificationCheck.VOLUME_GROWTH,
                    verdict=Verdict.PASS if growth.passed else Verdict.INCONCLUSIVE,
                    title="Volume growth is sufficient" if growth.passed else "Volume growth is not sufficient",
                    description=f"mu(B_r(x)) <= c' r^s with s = {growth.s:g} against beta = {growth.beta:g}",
                    evidence=growth.model_dump(),
                    experiment=self.name,
                )
            )
        logger.info("kato-check: %s", report.verdict.value)

        rows = [
            {"r": r, "sup_integral": v}
            for r, v in zip(report.radii, report.sup_integrals, strict=True)
        ]
        return ExperimentOutput(
            certifications=certifications,
            columns=["r", "sup_integral"],
            rows=rows,
            summary=report.model_dump(mode="json"),
        )
