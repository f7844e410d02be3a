"""
Admissibility tests for measures.

A measure mu is G-Kato for a kernel with G(x, y) <= c |x - y|^-beta near the
diagonal iff

    sup_x int_{B_r(x)} |x - y|^-beta dmu(y) -> 0   as r -> 0.

A sufficient condition is volume growth mu(B_r(x)) <= c' r^s with s > beta.
Both are evaluated on finite radius schedules and evaluation grids.
"""

import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, Field

from traceforms.core.errors import InvalidParameter
from traceforms.core.models import Verdict
from traceforms.numerics.kernels import Kernel, kernel_singularity_params
from traceforms.numerics.measures import AtomicMeasure, SphereFamilyMeasure
from traceforms.numerics.potentials import EvaluationGrid

logger = logging.getLogger(__name__)

PLATEAU_RTOL = 1e-3


@dataclass(frozen=True)
class LebesgueInterval:
    """
    Lebesgue measure on [lo, hi] in R^1.

    Only the admissibility tests accept it; it has no matrix realization.
    """

    lo: float = 0.0
    hi: float = 1.0
    dim: int = 1

    def __post_init__(self) -> None:
        if not self.hi > self.lo:
            raise InvalidParameter("interval needs hi > lo")

    @property
    def is_zero(self) -> bool:
        return False

    def support_points(self) -> np.ndarray:
        return np.array([[self.lo], [self.hi]])

    def mass_in_ball(self, center: np.ndarray, r: float) -> float:
        x = float(np.ravel(center)[0])
        return max(0.0, min(self.hi, x + r) - max(self.lo, x - r))

    def truncated_integral(self, x: float, r: float, beta: float) -> float:
        """int over [lo, hi] cap (x - r, x + r) of |x - y|^-beta dy."""
        total = 0.0
        # distances to the right of x, then to the left
        for near, far in ((self.lo - x, self.hi - x), (x - self.hi, x - self.lo)):
            if far <= 0:
                continue
            a, b = max(near, 0.0), min(far, r)
            if b > a:
                total += _power_integral(a, b, beta)
        return total


def _power_integral(a: float, b: float, beta: float) -> float:
    """int_a^b t^-beta dt for 0 <= a < b."""
    if beta == 1.0:
        return math.inf if a == 0.0 else math.log(b / a)
    if a == 0.0 and beta > 1.0:
        return math.inf
    return (b ** (1 - beta) - a ** (1 - beta)) / (1 - beta)


KatoMeasure = AtomicMeasure | SphereFamilyMeasure | LebesgueInterval


def _sphere_integral(radius: float, mass: float, rho: float, r: float, beta: float) -> float:
    """int_{B_r(x)} |x - y|^-beta d sigma for a sphere of radius R seen from |x| = rho."""
    if rho == 0.0:
        return mass * radius**-beta if radius < r else 0.0
    lo, hi = abs(radius - rho), min(r, radius + rho)
    if hi <= lo:
        return 0.0
    # distance density is mass t / (2 R rho) on [|R - rho|, R + rho]
    return mass / (2 * radius * rho) * _power_integral(lo, hi, beta - 1.0)


def kato_sup_integral(kernel: Kernel, measure: KatoMeasure, r: float, grid: EvaluationGrid) -> float:
    """sup over grid points (and the support) of int_{B_r(x)} rho^-beta dmu; may be inf."""
    if r <= 0:
        raise InvalidParameter("r must be positive")
    beta, _, _ = kernel_singularity_params(kernel)
    pts = grid.points if isinstance(measure, LebesgueInterval) else grid.including(measure).points
    if isinstance(measure, LebesgueInterval):
        return max(measure.truncated_integral(float(x[0]), r, beta) for x in pts)
    if isinstance(measure, SphereFamilyMeasure):
        rhos = np.linalg.norm(pts, axis=1)
        return max(
            sum(_sphere_integral(R, m, float(rho), r, beta) for R, m in zip(measure.radii, measure.masses, strict=True))
            for rho in rhos
        )
    if measure.is_zero:
        return 0.0
    dist = np.linalg.norm(pts[:, None, :] - measure.points[None, :, :], axis=2)
    if beta > 0 and np.any(dist == 0.0):
        return math.inf
    inside = dist < r
    with np.errstate(divide="ignore"):
        density = np.where(inside, dist ** (-beta) if beta > 0 else 1.0, 0.0)
    return float(np.max(density @ measure.weights))


class VolumeGrowth(BaseModel):
    """Estimate of c' in mu(B_r(x)) <= c' r^s."""

    s: float
    beta: float
    ratios: list[float] = Field(description="max_x mu(B_r(x)) / r^s per radius")
    slope: float | None = Field(default=None, description="log-log slope of the ratios against r")
    c_prime: float
    passed: bool


class KatoReport(BaseModel):
    """Sup-integrals along a decreasing radius schedule and the verdict."""

    beta: float
    radii: list[float]
    sup_integrals: list[float]
    tol: float
    verdict: Verdict
    note: str = ""
    growth: VolumeGrowth | None = None

    @property
    def nonincreasing(self) -> bool:
        vals = self.sup_integrals
        return all(b <= a * (1 + 1e-12) for a, b in zip(vals, vals[1:], strict=False))

    def apply_growth(self, growth: VolumeGrowth) -> None:
        """Record a volume-growth estimate; a passing one settles an inconclusive verdict."""
        self.growth = growth
        if growth.passed and self.verdict == Verdict.INCONCLUSIVE:
            self.verdict = Verdict.PASS
            self.note = f"volume growth with s = {growth.s:g} > beta = {growth.beta:g} is sufficient"


def _check_radii(radii: Sequence[float]) -> list[float]:
    rs = [float(r) for r in radii]
    if not rs or any(r <= 0 for r in rs):
        raise InvalidParameter("radii must be positive")
    if any(b >= a for a, b in zip(rs, rs[1:], strict=False)):
        raise InvalidParameter("radii must be strictly decreasing")
    return rs


def kato_check(
    kernel: Kernel,
    measure: KatoMeasure,
    radii: Sequence[float],
    grid: EvaluationGrid,
    tol: float = 1e-2,
    threads: int | None = None,
) -> KatoReport:
    """
    Pass when the sup-integrals fall below tol; fail on an infinite value or
    a plateau above tol; inconclusive otherwise.
    """
    if tol <= 0:
        raise InvalidParameter("tol must be positive")
    rs = _check_radii(radii)
    beta, _, _ = kernel_singularity_params(kernel)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        values = list(pool.map(lambda r: kato_sup_integral(kernel, measure, r, grid), rs))
    note = ""
    if beta == 0:
        verdict = Verdict.PASS
        note = "bounded kernel: every finite measure is G-Kato and G^mu 1 is continuous and vanishes at infinity"
    elif any(math.isinf(v) for v in values):
        verdict = Verdict.FAIL
        note = "infinite sup-integral: an atom sits at the kernel singularity"
    elif values[-1] < tol:
        verdict = Verdict.PASS
    elif len(values) > 1 and abs(values[-1] - values[-2]) <= PLATEAU_RTOL * values[-2]:
        verdict = Verdict.FAIL
        note = "sup-integrals plateau above tol"
    else:
        verdict = Verdict.INCONCLUSIVE
    logger.debug("kato check beta=%g over %d radii: %s", beta, len(rs), verdict.value)
    return KatoReport(beta=beta, radii=rs, sup_integrals=values, tol=tol, verdict=verdict, note=note)


def volume_growth_check(
    measure: KatoMeasure,
    s: float,
    grid: EvaluationGrid,
    radii: Sequence[float],
    beta: float | None = None,
    kernel: Kernel | None = None,
) -> VolumeGrowth:
    """
    c' = max over grid points and radii of mu(B_r(x)) / r^s.

    c' is declared infinite when the per-radius maxima grow with log-log
    slope below -s/2 as r decreases. Passes iff c' is finite and s > beta.
    """
    if s <= 0:
        raise InvalidParameter("s must be positive")
    if beta is None:
        if kernel is None:
            raise InvalidParameter("volume growth needs beta or a kernel")
        beta = kernel_singularity_params(kernel)[0]
    rs = _check_radii(radii)
    pts = grid.points if isinstance(measure, LebesgueInterval) else grid.including(measure).points
    ratios = [max(measure.mass_in_ball(x, r) for x in pts) / r**s for r in rs]
    slope = None
    positive = [(r, q) for r, q in zip(rs, ratios, strict=True) if q > 0]
    if len(positive) >= 2:
        slope = float(np.polyfit(np.log([p[0] for p in positive]), np.log([p[1] for p in positive]), 1)[0])
    c_prime = math.inf if slope is not None and slope < -s / 2 else float(max(ratios))
    return VolumeGrowth(
        s=s,
        beta=beta,
        ratios=ratios,
        slope=slope,
        c_prime=c_prime,
        passed=math.isfinite(c_prime) and s > beta,
    )
