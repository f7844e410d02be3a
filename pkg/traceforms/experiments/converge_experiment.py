"""
Convergence experiment.

Runs a monotone measure family against its finite limit and certifies
ordered eigenvalue convergence, the quantitative error bound, ground state
monotonicity, uniform potential convergence, the operator difference bound,
projection dimension stability and resolvent convergence.
"""

import logging
import math

import numpy as np

from traceforms.config import Config
from traceforms.core.models import Certification, ExperimentOutput
from traceforms.core.taxonomy import CertificationCheck
from traceforms.experiments.base import Experiment
from traceforms.numerics.kernels import Kernel
from traceforms.numerics.measures import Direction, MeasureSequence, measure_difference
from traceforms.numerics.potentials import (
    EvaluationGrid,
    operator_difference_sup,
    potential_one_sup,
)
from traceforms.numerics.spectra import (
    ConvergenceReport,
    ResolventRow,
    convergence_experiment,
    resolvent_convergence,
)

logger = logging.getLogger(__name__)

COLUMNS = ["n", "k", "E_n_k", "bound_n", "gap_k", "ratio_k"]
OPERATOR_SLACK = 1e-12
# gaps below this multiple of ||S_inf|| are eigensolver noise
GAP_RESOLUTION = 1e-12


def _nonincreasing(values: list[float]) -> bool:
    return all(b <= a * (1 + 1e-10) + 1e-15 for a, b in zip(values, values[1:], strict=False))


def running_sup_variation(report: ConvergenceReport, window: tuple[int, int]) -> dict[int, float]:
    """
    Relative growth of the running sup of ratio_k over n in the window, per k.

    Rows whose gap is below the eigensolver resolution carry no information
    about the ratio and are left out.
    """
    lo, hi = window
    resolution = GAP_RESOLUTION / report.limit_energies[0] if report.limit_energies else 0.0
    variation: dict[int, float] = {}
    for k in range(report.k_max):
        ratios = [
            r.ratio_k
            for r in report.rows
            if r.k == k and lo <= r.n <= hi and r.bound_n > 0 and r.gap_k > resolution
        ]
        if not ratios:
            continue
        first, top = ratios[0], max(ratios)
        variation[k] = (top - first) / top if top > 0 else 0.0
    return variation


def operator_difference_trials(
    kernel: Kernel,
    sequence: MeasureSequence,
    grid: EvaluationGrid,
    trials: int,
    seed: int,
) -> list[dict[str, float]]:
    """Worst grid difference of G^mu_inf u - G^mu_n u over random ||u|| <= 1, per n."""
    support = sequence.limit if sequence.direction == Direction.INCREASING else sequence.terms[0]
    points = grid.including(support).points
    rng = np.random.default_rng(seed)
    tests = rng.uniform(-1.0, 1.0, size=(support.size, trials))
    out = []
    for n, mu_n in zip(sequence.labels, sequence.terms, strict=True):
        worst = float(np.max(operator_difference_sup(kernel, sequence.limit, mu_n, tests, points, support)))
        nu_n = measure_difference(sequence.limit, mu_n, sequence.direction)
        out.append({"n": n, "worst": worst, "bound": potential_one_sup(kernel, nu_n, grid)})
    return out


class ConvergeExperiment(Experiment):
    """Spectral convergence along a monotone measure family."""

    @property
    def name(self) -> str:
        return "converge"

    @property
    def description(self) -> str:
        return "Convergence of the k lowest energies, potentials and resolvents along mu_n -> mu_inf"

    def run(self, config: Config) -> ExperimentOutput:
        settings = config.converge
        kernel = config.kernel.build()
        sequence = config.sequence.build()
        largest = sequence.limit if sequence.direction == Direction.INCREASING else sequence.terms[0]
        grid = config.grid.build(dim=largest.dim, measures=(largest,))
        logger.info("converge: %d terms, k_max=%d", len(sequence), settings.k_max)

        report = convergence_experiment(
            kernel,
            sequence,
            settings.k_max,
            grid,
            intervals=settings.intervals,
            multiplicity_tol=settings.multiplicity_tol,
            threads=config.runner.threads,
            strict_rank=settings.strict_rank,
            convergence_tol=settings.convergence_tol,
        )
        operator_rows = operator_difference_trials(
            kernel, sequence, grid, settings.operator_trials, config.runner.seed
        )
        resolvent_rows: list[ResolventRow] = []
        if settings.resolvent_alpha:
            resolvent_rows = resolvent_convergence(
                kernel, sequence, settings.resolvent_alpha, grid, threads=config.runner.threads
            )

        certifications = [
            self._ordered(report),
            self._ratio(report, settings.ratio_window, settings.ratio_variation),
            Certification.from_condition(
                CertificationCheck.GROUND_STATE_MONOTONICITY,
                report.ground_state_monotone,
                "Ground state energy is monotone",
                f"E_n^(0) along the {sequence.direction.value} family",
                self.name,
                {"ground_energies": {str(n): e for n, e in report.ground_energies.items()}},
            ),
            Certification.from_condition(
                CertificationCheck.GROUND_STATE_IDENTITY,
                report.ground_state_identity_residual < settings.identity_tol,
                "Ground state energy is the reciprocal norm",
                "|(E_n^(0) - E_inf^(0)) - (1/||S_n|| - 1/||S_inf||)|",
                self.name,
                {"residual": report.ground_state_identity_residual, "tol": settings.identity_tol},
            ),
            self._potential(report),
            Certification.from_condition(
                CertificationCheck.OPERATOR_DIFFERENCE_BOUND,
                all(r["worst"] <= r["bound"] + OPERATOR_SLACK for r in operator_rows),
                "Potential operators differ by at most ||G^nu_n 1||",
                f"{settings.operator_trials} random test functions per n, seed {config.runner.seed}",
                self.name,
                {"rows": operator_rows},
            ),
            Certification.from_condition(
                CertificationCheck.PROJECTION_DIMENSION_STABILITY,
                all(d.stable for d in report.dimension_stability),
                "Eigenvalue counts settle at the limit count",
                "counts of energies inside each interval along the schedule",
                self.name,
                {"intervals": [d.model_dump() for d in report.dimension_stability]},
            ),
        ]
        if resolvent_rows:
            diffs = [r.difference for r in resolvent_rows]
            certifications.append(
                Certification.from_condition(
                    CertificationCheck.RESOLVENT_CONVERGENCE,
                    _nonincreasing(diffs) and all(r.within_bound for r in resolvent_rows),
                    "Resolvents converge on bounded functions",
                    f"||R_a^(n) - R_a^(inf)|| at a = {settings.resolvent_alpha}",
                    self.name,
                    {"rows": [{**r.model_dump(), "within_bound": r.within_bound} for r in resolvent_rows]},
                )
            )

        summary = report.to_summary()
        if resolvent_rows:
            summary["resolvent"] = {str(r.n): r.difference for r in resolvent_rows}
        return ExperimentOutput(
            certifications=certifications,
            columns=COLUMNS,
            rows=[r.model_dump() for r in report.rows],
            summary=summary,
        )

    def _ordered(self, report: ConvergenceReport) -> Certification:
        return Certification.from_condition(
            CertificationCheck.ORDERED_EIGENVALUE_CONVERGENCE,
            all(report.converged.values()),
            "Ordered eigenvalues converge",
            f"gaps for k < {report.k_max} are nonincreasing and within tolerance at the last n",
            self.name,
            {
                "final_gaps": {str(k): v for k, v in report.final_gaps.items()},
                "gaps_nonincreasing": {str(k): v for k, v in report.gaps_nonincreasing.items()},
                "converged": {str(k): v for k, v in report.converged.items()},
            },
        )

    def _ratio(self, report: ConvergenceReport, window: tuple[int, int], allowed: float) -> Certification:
        variation = running_sup_variation(report, window)
        finite = all(math.isfinite(r.ratio_k) for r in report.rows)
        capped = True
        if report.direction == Direction.INCREASING:
            capped = all(r.ratio_k <= 1 + 1e-9 for r in report.rows if r.k == 0)
        stable = all(v < allowed for v in variation.values())
        return Certification.from_condition(
            CertificationCheck.ERROR_BOUND_RATIO,
            finite and capped and stable,
            "Eigenvalue gaps are bounded by the difference potential",
            f"running sup of gap/bound over n in {list(window)} varies by less than {allowed:.0%}",
            self.name,
            {
                "empirical_c": report.empirical_c,
                "variation": {str(k): v for k, v in variation.items()},
                "ground_ratio_capped": capped,
            },
        )

    def _potential(self, report: ConvergenceReport) -> Certification:
        ns = list(report.potential_sup_diff)
        diffs = [report.potential_sup_diff[n] for n in ns]
        mismatch = max(
            (abs(report.potential_sup_diff[n] - report.bounds[n]) / max(1.0, report.bounds[n]) for n in ns),
            default=0.0,
        )
        return Certification.from_condition(
            CertificationCheck.POTENTIAL_CONVERGENCE,
            _nonincreasing(diffs) and mismatch < 1e-9,
            "Potentials of 1 converge uniformly",
            "sup |G^mu_n 1 - G^mu_inf 1| is nonincreasing and equals ||G^nu_n 1||",
            self.name,
            {"sup_differences": diffs, "max_mismatch": mismatch},
        )
