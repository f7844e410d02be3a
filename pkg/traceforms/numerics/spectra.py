"""
Spectra of K^mu and the eigenvalue convergence engine.

Eigenvalues lambda of S are the eigenvalues of K^mu; the trace form has
energies E = 1/lambda with the same eigenvectors and multiplicities.
"""

import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any

import numpy as np
from pydantic import BaseModel, Field
from scipy import linalg

from traceforms.core.errors import (
    BoundaryHitsEigenvalue,
    ConvergenceFailure,
    InvalidParameter,
    NonpositiveEigenvalue,
    ShrinkingSupport,
)
from traceforms.numerics.kernels import Kernel
from traceforms.numerics.measures import Direction, Measure, MeasureSequence, measure_difference
from traceforms.numerics.potentials import (
    EvaluationGrid,
    SymmetricOperator,
    bounded_resolvent,
    green_matrix,
    operator_matrix,
    potential_field,
    potential_one_sup,
    sup_norm_operator,
)

logger = logging.getLogger(__name__)

DEFAULT_MULTIPLICITY_TOL = 1e-8
NONPOSITIVE_TOL = 1e-12
ENERGY_NOISE_FLOOR = 1e-13


@dataclass(frozen=True, eq=False)
class SpectralResult:
    """
    Full spectrum of S.

    lambdas descend, energies ascend with energies[k] = 1 / lambdas[k],
    eigenvectors are columns in weighted coordinates. groups are index
    ranges of eigenvalues within multiplicity_tol (relative) of each other.
    """

    lambdas: np.ndarray
    energies: np.ndarray
    eigenvectors: np.ndarray
    multiplicity_tol: float
    groups: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.lambdas)

    @property
    def multiplicities(self) -> list[int]:
        return [len(g) for g in self.groups]

    def top(self) -> float:
        return float(self.lambdas[0]) if self.size else 0.0


def cluster_groups(values: np.ndarray, tol: float) -> tuple[tuple[int, ...], ...]:
    """Consecutive (sorted) values within relative gap tol form one group."""
    if len(values) == 0:
        return ()
    groups: list[list[int]] = [[0]]
    for i in range(1, len(values)):
        prev, cur = values[i - 1], values[i]
        scale = max(abs(prev), abs(cur), np.finfo(float).tiny)
        if abs(prev - cur) <= tol * scale:
            groups[-1].append(i)
        else:
            groups.append([i])
    return tuple(tuple(g) for g in groups)


def eigendecompose(
    operator: SymmetricOperator | np.ndarray,
    multiplicity_tol: float = DEFAULT_MULTIPLICITY_TOL,
    nonpositive_tol: float = NONPOSITIVE_TOL,
) -> SpectralResult:
    """
    Dense symmetric eigendecomposition of S (LAPACK, deterministic).

    Eigenvalues below -nonpositive_tol * ||S|| raise NonpositiveEigenvalue.
    Values in [-tol ||S||, 0] are rounding noise of a numerically singular S;
    they are clipped to 0 with infinite energy and logged.
    """
    if multiplicity_tol <= 0:
        raise InvalidParameter("multiplicity_tol must be positive")
    s = operator.matrix if isinstance(operator, SymmetricOperator) else np.asarray(operator, dtype=float)
    if s.size == 0:
        empty = np.zeros(0)
        return SpectralResult(empty, empty, np.zeros((0, 0)), multiplicity_tol, ())
    try:
        values, vectors = linalg.eigh(s)
    except linalg.LinAlgError as e:
        raise ConvergenceFailure(f"symmetric eigensolver did not converge: {e}") from e
    values, vectors = values[::-1], vectors[:, ::-1]
    scale = max(abs(values[0]), abs(values[-1]))
    if values[-1] < -nonpositive_tol * scale:
        raise NonpositiveEigenvalue(
            f"eigenvalue {values[-1]:.3e} of S is negative (||S|| = {scale:.3e})"
        )
    tiny = values <= 0
    if np.any(tiny):
        logger.warning("%d eigenvalue(s) of S are numerically zero; energies set to inf", int(tiny.sum()))
        values = np.where(tiny, 0.0, values)
    with np.errstate(divide="ignore"):
        energies = np.where(tiny, math.inf, 1.0 / np.where(tiny, 1.0, values))
    return SpectralResult(
        lambdas=values,
        energies=energies,
        eigenvectors=vectors,
        multiplicity_tol=multiplicity_tol,
        groups=cluster_groups(values, multiplicity_tol),
    )


def eigenfunction_field(
    kernel: Kernel, measure: Measure, lam: float, v: np.ndarray, points: np.ndarray
) -> np.ndarray:
    """(1/lambda) G^mu u on many points, u = v / sqrt(w)."""
    u = np.asarray(v, dtype=float) / np.sqrt(measure.weights)
    return potential_field(kernel, measure, u, points) / lam


def eigenfunction_extend(
    kernel: Kernel, measure: Measure, lam: float, v: np.ndarray, x: object
) -> float:
    """
    The C_0 representative of an eigenfunction at x.

    On support points this reproduces u = v / sqrt(w).
    """
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    if kernel.d == 1 and pts.shape[-1] != 1:
        pts = pts.reshape(-1, 1)
    return float(eigenfunction_field(kernel, measure, lam, v, pts)[0])


def count_spectrum_in(result: SpectralResult, interval: tuple[float, float]) -> int:
    """Number of energies in (a, b) with multiplicity."""
    a, b = interval
    if not 0 < a < b:
        raise InvalidParameter("interval must satisfy 0 < a < b")
    energies = result.energies[np.isfinite(result.energies)]
    for edge in (a, b):
        if math.isinf(edge):
            continue
        near = np.abs(energies - edge) <= result.multiplicity_tol * np.maximum(energies, edge)
        if np.any(near):
            raise BoundaryHitsEigenvalue(f"interval endpoint {edge} is an eigenvalue")
    return int(np.sum((energies > a) & (energies < b)))


def lambda_group(result: SpectralResult, lambda_inf: float, radius: float) -> list[tuple[int, float]]:
    """Eigenvalues within radius of lambda_inf, with their indices."""
    if radius <= 0:
        raise InvalidParameter("radius must be positive")
    return [
        (i, float(lam)) for i, lam in enumerate(result.lambdas) if abs(lam - lambda_inf) < radius
    ]


def spectrum_consistency(operator: SymmetricOperator, result: SpectralResult) -> dict[str, Any]:
    """
    Compare the spectrum of S with that of the unsymmetrized G W.

    Both realize K^mu, so eigenvalues and multiplicities agree.
    """
    if result.size == 0:
        return {"max_discrepancy": 0.0, "multiplicities_match": True}
    other = np.sort(np.real(linalg.eigvals(operator.potential_matrix)))[::-1]
    scale = max(result.top(), np.finfo(float).tiny)
    discrepancy = float(np.max(np.abs(other - result.lambdas)) / scale)
    other_groups = cluster_groups(np.clip(other, 0.0, None), result.multiplicity_tol)
    return {
        "max_discrepancy": discrepancy,
        "multiplicities_match": [len(g) for g in other_groups] == result.multiplicities,
    }


def extension_fixed_point_residual(
    kernel: Kernel,
    measure: Measure,
    result: SpectralResult,
    points: np.ndarray,
    indices: Sequence[int] | None = None,
) -> float:
    """
    max over eigenpairs and points of |G^mu f(x) - lambda f(x)| / (lambda ||u||),
    f the extension of the eigenfunction u.
    """
    idx = list(range(result.size)) if indices is None else list(indices)
    idx = [i for i in idx if result.lambdas[i] > 0]
    if not idx or len(points) == 0:
        return 0.0
    w = measure.weights
    lam = result.lambdas[idx]
    u = result.eigenvectors[:, idx] / np.sqrt(w)[:, None]
    g_support = green_matrix(kernel, measure, measure.support_points())
    g_points = green_matrix(kernel, measure, points)
    f_support = g_support @ (w[:, None] * u) / lam
    f_points = g_points @ (w[:, None] * u) / lam
    lhs = g_points @ (w[:, None] * f_support)
    scale = lam * np.max(np.abs(u), axis=0)
    return float(np.max(np.abs(lhs - lam * f_points) / scale))


def rayleigh_quotient_check(
    operator: SymmetricOperator, result: SpectralResult, trials: int = 1000, seed: int = 0
) -> dict[str, float | bool]:
    """
    E^(0) = min |psi|^2 / <S psi, psi> over psi; sample random unit vectors.

    Every sampled quotient is an upper bound for E^(0).
    """
    if result.size == 0:
        return {"e0": math.inf, "min_sampled": math.inf, "holds": True}
    rng = np.random.default_rng(seed)
    psi = rng.standard_normal((result.size, trials))
    psi /= np.linalg.norm(psi, axis=0)
    quadratic = np.einsum("it,it->t", psi, operator.matrix @ psi)
    with np.errstate(divide="ignore"):
        quotients = np.where(quadratic > 0, 1.0 / np.where(quadratic > 0, quadratic, 1.0), math.inf)
    e0 = float(result.energies[0])
    min_sampled = float(np.min(quotients))
    return {"e0": e0, "min_sampled": min_sampled, "holds": e0 <= min_sampled * (1 + 1e-12)}


class ConvergenceRow(BaseModel):
    """One (n, k) entry of the convergence table."""

    n: int
    k: int
    E_n_k: float = Field(description="k-th energy of the truncated form")
    bound_n: float = Field(description="sup of G^{nu_n} 1 on the grid")
    gap_k: float = Field(description="|1/E_inf^(k) - 1/E_n^(k)|")
    ratio_k: float = Field(description="gap_k / bound_n, 0 when bound_n = 0")


class DimensionStability(BaseModel):
    """Eigenvalue counts in one energy interval along the schedule."""

    interval: tuple[float, float]
    limit_count: int
    counts: list[int | None] = Field(description="None where an endpoint hit an eigenvalue")
    n0: int | None = Field(default=None, description="First n from which counts stay at limit_count")

    @property
    def stable(self) -> bool:
        return self.n0 is not None


class ConvergenceReport(BaseModel):
    """Per-n spectra, potential bounds and the summary verdicts."""

    direction: Direction
    k_max: int
    limit_energies: list[float]
    rows: list[ConvergenceRow] = Field(default_factory=list)
    bounds: dict[int, float] = Field(default_factory=dict)
    potential_sup_diff: dict[int, float] = Field(
        default_factory=dict, description="sup |G^{mu_n} 1 - G^{mu_inf} 1| on the grid"
    )
    ground_energies: dict[int, float] = Field(default_factory=dict)
    gaps_nonincreasing: dict[int, bool] = Field(default_factory=dict)
    final_gaps: dict[int, float] = Field(default_factory=dict)
    converged: dict[int, bool] = Field(default_factory=dict)
    empirical_c: float = 0.0
    ground_state_monotone: bool = True
    ground_state_identity_residual: float = 0.0
    dimension_stability: list[DimensionStability] = Field(default_factory=list)

    def to_summary(self) -> dict[str, Any]:
        return {
            "direction": self.direction.value,
            "k_max": self.k_max,
            "limit_energies": self.limit_energies,
            "empirical_c": self.empirical_c,
            "gaps_nonincreasing": {str(k): v for k, v in self.gaps_nonincreasing.items()},
            "final_gaps": {str(k): v for k, v in self.final_gaps.items()},
            "converged": {str(k): v for k, v in self.converged.items()},
            "ground_state_monotone": self.ground_state_monotone,
            "ground_state_identity_residual": self.ground_state_identity_residual,
            "potential_sup_diff": {str(n): v for n, v in self.potential_sup_diff.items()},
            "bounds": {str(n): v for n, v in self.bounds.items()},
            "dimension_stability": [
                {**d.model_dump(), "stable": d.stable} for d in self.dimension_stability
            ],
        }


@dataclass(frozen=True)
class _TermResult:
    n: int
    result: SpectralResult
    bound: float
    sup_diff: float
    ground_identity: float | None


def _default_intervals(limit: SpectralResult, k_max: int) -> list[tuple[float, float]]:
    energies = limit.energies[np.isfinite(limit.energies)]
    lo = energies[0] / 2
    if len(energies) > k_max:
        return [(lo, 0.5 * (energies[k_max - 1] + energies[k_max]))]
    return [(lo, 2 * energies[-1])]


def _nonincreasing(values: list[float], rel: float = 1e-10) -> bool:
    return all(b <= a + rel * max(abs(a), 1.0) for a, b in zip(values, values[1:], strict=False))


def _strictly_decreasing(values: list[float], limit: float, floor: float = ENERGY_NOISE_FLOOR) -> bool:
    """
    Strict decrease, except between terms that already agree with the limit
    to within the eigensolver's resolution.
    """
    noise = floor * max(abs(limit), 1.0)
    return all(
        b < a or (abs(a - limit) <= noise and abs(b - limit) <= noise)
        for a, b in zip(values, values[1:], strict=False)
    )


def convergence_experiment(
    kernel: Kernel,
    sequence: MeasureSequence,
    k_max: int,
    grid: EvaluationGrid,
    intervals: Sequence[tuple[float, float]] | None = None,
    multiplicity_tol: float = DEFAULT_MULTIPLICITY_TOL,
    threads: int | None = None,
    strict_rank: bool = False,
    convergence_tol: float = 1e-6,
) -> ConvergenceReport:
    """
    Track the k_max lowest energies of E^{mu_n} against the finite limit.

    Terms are decomposed in parallel; rows come back ordered by the schedule.
    """
    if k_max < 1:
        raise InvalidParameter("k_max must be at least 1")
    limit_op = operator_matrix(kernel, sequence.limit)
    limit = eigendecompose(limit_op, multiplicity_tol)
    if k_max > limit.size:
        raise ShrinkingSupport(f"k_max = {k_max} exceeds the rank {limit.size} of the limit operator")
    limit_norm = linalg.norm(limit_op.matrix, 2)
    ones_limit = potential_field(kernel, sequence.limit, 1.0, grid.including(sequence.limit).points)

    def run_term(item: tuple[int, Measure]) -> _TermResult:
        n, mu_n = item
        nu_n = measure_difference(sequence.limit, mu_n, sequence.direction)
        bound = potential_one_sup(kernel, nu_n, grid)
        pts = grid.including(sequence.limit).points
        sup_diff = float(np.max(np.abs(potential_field(kernel, mu_n, 1.0, pts) - ones_limit)))
        if mu_n.is_zero:
            return _TermResult(n, eigendecompose(np.zeros((0, 0)), multiplicity_tol), bound, sup_diff, None)
        op = operator_matrix(kernel, mu_n)
        result = eigendecompose(op, multiplicity_tol)
        identity = (result.energies[0] - limit.energies[0]) - (
            1.0 / linalg.norm(op.matrix, 2) - 1.0 / limit_norm
        )
        logger.debug("term n=%d: %d atoms, bound %.3e", n, mu_n.size, bound)
        return _TermResult(n, result, bound, sup_diff, float(abs(identity)))

    items = list(zip(sequence.labels, sequence.terms, strict=True))
    if strict_rank:
        for n, mu in items:
            if mu.size < k_max:
                raise ShrinkingSupport(f"term n={n} has rank {mu.size} < k_max = {k_max}")
    with ThreadPoolExecutor(max_workers=threads) as pool:
        terms = list(pool.map(run_term, items))

    report = ConvergenceReport(
        direction=sequence.direction,
        k_max=k_max,
        limit_energies=[float(e) for e in limit.energies[:k_max]],
    )
    gaps: dict[int, list[float]] = {k: [] for k in range(k_max)}
    ratios: list[float] = []
    identity_residuals: list[float] = []
    for term in terms:
        report.bounds[term.n] = term.bound
        report.potential_sup_diff[term.n] = term.sup_diff
        if term.ground_identity is not None:
            identity_residuals.append(term.ground_identity)
            report.ground_energies[term.n] = float(term.result.energies[0])
        for k in range(min(k_max, term.result.size)):
            gap = abs(limit.lambdas[k] - term.result.lambdas[k])
            ratio = gap / term.bound if term.bound > 0 else 0.0
            gaps[k].append(gap)
            ratios.append(ratio)
            report.rows.append(
                ConvergenceRow(
                    n=term.n,
                    k=k,
                    E_n_k=float(term.result.energies[k]),
                    bound_n=term.bound,
                    gap_k=float(gap),
                    ratio_k=float(ratio),
                )
            )

    for k, series in gaps.items():
        report.gaps_nonincreasing[k] = _nonincreasing(series)
        report.final_gaps[k] = float(series[-1]) if series else math.nan
        report.converged[k] = bool(
            series and report.gaps_nonincreasing[k] and series[-1] <= convergence_tol
        )
    report.empirical_c = float(max(ratios)) if ratios else 0.0
    e0 = list(report.ground_energies.values())
    e_inf = float(limit.energies[0])
    if sequence.direction == Direction.INCREASING:
        report.ground_state_monotone = _strictly_decreasing(e0, e_inf)
    else:
        report.ground_state_monotone = _strictly_decreasing([-e for e in e0], -e_inf)
    report.ground_state_identity_residual = float(max(identity_residuals, default=0.0))

    for interval in intervals or _default_intervals(limit, k_max):
        limit_count = count_spectrum_in(limit, interval)
        counts: list[int | None] = []
        for term in terms:
            try:
                counts.append(count_spectrum_in(term.result, interval))
            except BoundaryHitsEigenvalue:
                counts.append(None)
        n0 = None
        for i in range(len(counts) - 1, -1, -1):
            if counts[i] != limit_count:
                break
            n0 = terms[i].n
        report.dimension_stability.append(
            DimensionStability(interval=interval, limit_count=limit_count, counts=counts, n0=n0)
        )
    return report


class ResolventRow(BaseModel):
    """Distance of the resolvents on bounded functions at one n."""

    n: int
    difference: float = Field(description="||R_a^(n) - R_a^(inf)|| on bounded functions")
    bound_n: float
    constant: float = Field(description="||(1 + aG^mu_n)^-1|| ||(1 + aG^mu_inf)^-1||")
    ratio: float

    @property
    def within_bound(self) -> bool:
        return self.difference <= self.constant * self.bound_n * (1 + 1e-9) + 1e-14


def resolvent_convergence(
    kernel: Kernel,
    sequence: MeasureSequence,
    alpha: float,
    grid: EvaluationGrid,
    threads: int | None = None,
) -> list[ResolventRow]:
    """
    ||(1 + aG^{mu_n})^-1 G^{mu_n} - (1 + aG^{mu_inf})^-1 G^{mu_inf}|| per n,
    realized on bounded functions of the largest support in the sequence.

    R_n - R_inf = (1 + aG^mu_n)^-1 (G^mu_n - G^mu_inf) (1 + aG^mu_inf)^-1,
    so the difference is at most constant * sup G^{nu_n} 1.
    """
    support = sequence.limit if sequence.direction == Direction.INCREASING else sequence.terms[0]
    grid = grid.including(support)
    limit, limit_inverse = bounded_resolvent(kernel, sequence.limit, support, alpha)
    limit_norm = sup_norm_operator(limit_inverse)

    def run_term(item: tuple[int, Measure]) -> ResolventRow:
        n, mu_n = item
        resolvent, inverse = bounded_resolvent(kernel, mu_n, support, alpha)
        diff = sup_norm_operator(resolvent - limit)
        nu_n = measure_difference(sequence.limit, mu_n, sequence.direction)
        bound = potential_one_sup(kernel, nu_n, grid)
        return ResolventRow(
            n=n,
            difference=diff,
            bound_n=bound,
            constant=sup_norm_operator(inverse) * limit_norm,
            ratio=diff / bound if bound > 0 else 0.0,
        )

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run_term, zip(sequence.labels, sequence.terms, strict=True)))
