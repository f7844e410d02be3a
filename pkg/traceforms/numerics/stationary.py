"""
Stationary solutions of -Delta u_n + a u_n mu_n = u mu_n in R^3 for
concentric sphere families.

u_n = (1 + a G^mu)^-1 G^mu u. With w the values of u_n on the spheres,
u_n = G^mu (u - a w), so u_n is a sum of sphere potentials with
coefficients v = u - a w and is harmonic off the spheres.
"""

import logging
import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, Field
from scipy import linalg

from traceforms.core.errors import InvalidParameter, PointTooCloseToSupport, SingularSystem
from traceforms.numerics.kernels import Kernel, sphere_green_matrix
from traceforms.numerics.measures import Direction, MeasureSequence, SphereFamilyMeasure, measure_difference
from traceforms.numerics.potentials import EvaluationGrid, potential_one_sup

logger = logging.getLogger(__name__)

RadialData = float | Callable[[np.ndarray], np.ndarray] | np.ndarray

_STENCIL = np.array(
    [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], dtype=float
)


def _radii_of(points: np.ndarray) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 2:
        if pts.shape[1] != 3:
            raise InvalidParameter("stationary fields live in R^3")
        return np.linalg.norm(pts, axis=1)
    return np.abs(pts)


def sphere_values(measure: SphereFamilyMeasure, data: RadialData) -> np.ndarray:
    """Radial data as one value per sphere."""
    if callable(data):
        values = np.asarray(data(measure.radii), dtype=float)
    elif np.ndim(data) == 0:
        values = np.full(measure.size, float(data))
    else:
        values = np.asarray(data, dtype=float)
    if values.shape != (measure.size,):
        raise InvalidParameter(f"expected one value per sphere ({measure.size}), got {values.shape}")
    return values


@dataclass(frozen=True, eq=False)
class StationarySolutionField:
    """u_n(x) = sum_i m_i v_i / (4 pi max(R_i, |x|))."""

    measure: SphereFamilyMeasure
    alpha: float
    data: np.ndarray
    boundary_values: np.ndarray
    coefficients: np.ndarray

    def radial(self, r: np.ndarray | float) -> np.ndarray:
        r = np.atleast_1d(np.asarray(r, dtype=float))
        if self.measure.is_zero:
            return np.zeros_like(r)
        return sphere_green_matrix(self.measure.radii, r) @ (self.measure.masses * self.coefficients)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return self.radial(_radii_of(points))

    def far_field_constant(self) -> float:
        """lim |x| u_n(x) = sum_i m_i v_i / (4 pi)."""
        return float(np.sum(self.measure.masses * self.coefficients) / (4 * math.pi))


def stationary_solve(
    measure: SphereFamilyMeasure, alpha: float, u: RadialData
) -> StationarySolutionField:
    """Solve (I + a M) w = M u with M_ij = m_j / (4 pi max(R_i, R_j))."""
    if alpha < 0:
        raise InvalidParameter("alpha must be nonnegative")
    values = sphere_values(measure, u)
    if measure.is_zero:
        empty = np.zeros(0)
        return StationarySolutionField(measure, alpha, values, empty, empty)
    m = sphere_green_matrix(measure.radii, measure.radii) * measure.masses[None, :]
    try:
        w = linalg.solve(np.eye(measure.size) + alpha * m, m @ values)
    except linalg.LinAlgError as e:
        raise SingularSystem(f"I + aM is singular: {e}") from e
    return StationarySolutionField(
        measure=measure,
        alpha=alpha,
        data=values,
        boundary_values=w,
        coefficients=values - alpha * w,
    )


def harmonicity_residual(
    field: StationarySolutionField, test_points: np.ndarray, h: float = 1e-3
) -> float:
    """
    max over points of |7-point Laplacian of u_n| / |u_n|.

    Points must stay farther than 2h from every sphere.
    """
    if h <= 0:
        raise InvalidParameter("h must be positive")
    pts = np.atleast_2d(np.asarray(test_points, dtype=float))
    r = _radii_of(pts)
    if not field.measure.is_zero:
        gap = np.min(np.abs(r[:, None] - field.measure.radii[None, :]), axis=1)
        if np.any(gap <= 2 * h):
            raise PointTooCloseToSupport(f"a test point lies within {2 * h} of a sphere")
    center = field(pts)
    neighbours = pts[:, None, :] + h * _STENCIL[None, :, :]
    around = field(neighbours.reshape(-1, 3)).reshape(len(pts), 6)
    laplacian = (around.sum(axis=1) - 6 * center) / h**2
    scale = np.where(np.abs(center) > 0, np.abs(center), 1.0)
    return float(np.max(np.abs(laplacian) / scale))


def resolvent_identity_residual(field: StationarySolutionField, points: np.ndarray) -> float:
    """max relative |u_n + a G^mu u_n - G^mu u| at the spheres and at points."""
    if field.measure.is_zero:
        return 0.0
    radii = np.concatenate([field.measure.radii, _radii_of(points)])
    g = sphere_green_matrix(field.measure.radii, radii) * field.measure.masses[None, :]
    lhs = field.radial(radii) + field.alpha * g @ field.boundary_values
    rhs = g @ field.data
    return float(np.max(np.abs(lhs - rhs)) / max(np.max(np.abs(rhs)), np.finfo(float).tiny))


class FluxJump(BaseModel):
    """Radial derivative jump across one sphere."""

    radius: float
    measured: float = Field(description="u'(R-) - u'(R+) from one-sided differences")
    expected: float = Field(description="(u(R) - a u_n(R)) m / (4 pi R^2)")

    @property
    def error(self) -> float:
        return abs(self.measured - self.expected)


def radial_derivative_jump(field: StationarySolutionField, h: float = 1e-5) -> list[FluxJump]:
    jumps = []
    for i, radius in enumerate(field.measure.radii):
        if radius - h <= 0:
            raise InvalidParameter("h exceeds the sphere radius")
        lo, mid, hi = field.radial(np.array([radius - h, radius, radius + h]))
        expected = field.coefficients[i] * field.measure.masses[i] / (4 * math.pi * radius**2)
        jumps.append(
            FluxJump(radius=float(radius), measured=float((mid - lo) / h - (hi - mid) / h), expected=float(expected))
        )
    return jumps


def far_field_error(field: StationarySolutionField, r: float = 1e3) -> float:
    """Relative error of |x| u_n(x) against the point-mass constant at |x| = r."""
    const = field.far_field_constant()
    value = float(field.radial(r)[0]) * r
    if const == 0.0:
        return abs(value)
    return abs(value - const) / abs(const)


class StationaryRow(BaseModel):
    n: int
    sup_difference: float = Field(description="sup over the test grid of |u_n - u_inf|")
    bound: float = Field(description="||u||_inf sup G^{nu_n} 1")
    within_bound: bool


class StationaryComparison(BaseModel):
    alpha: float
    rows: list[StationaryRow]
    monotone: bool = Field(description="sup differences nonincreasing along the schedule")

    @property
    def passed(self) -> bool:
        return self.monotone and all(r.within_bound for r in self.rows)


def stationary_compare(
    sequence: MeasureSequence,
    alpha: float,
    u: RadialData,
    test_grid: EvaluationGrid,
    tol: float = 1e-12,
    threads: int | None = None,
) -> StationaryComparison:
    """Compare u_n with u_inf on the grid and against the potential bound."""
    if not isinstance(sequence.limit, SphereFamilyMeasure):
        raise InvalidParameter("stationary solutions need a sphere family sequence")
    kernel = Kernel.newtonian(3)
    largest = sequence.terms[0] if sequence.direction == Direction.DECREASING else sequence.limit
    u_norm = float(np.max(np.abs(sphere_values(largest, u)))) if not largest.is_zero else 0.0
    radii = np.union1d(_radii_of(test_grid.points), largest.radii)
    limit = stationary_solve(sequence.limit, alpha, u).radial(radii)

    def run_term(item: tuple[int, SphereFamilyMeasure]) -> StationaryRow:
        n, mu_n = item
        diff = float(np.max(np.abs(stationary_solve(mu_n, alpha, u).radial(radii) - limit)))
        nu_n = measure_difference(sequence.limit, mu_n, sequence.direction)
        bound = u_norm * potential_one_sup(kernel, nu_n, test_grid)
        return StationaryRow(
            n=n, sup_difference=diff, bound=bound, within_bound=diff <= bound + tol * max(1.0, bound)
        )

    with ThreadPoolExecutor(max_workers=threads) as pool:
        rows = list(pool.map(run_term, zip(sequence.labels, sequence.terms, strict=True)))
    diffs = [r.sup_difference for r in rows]
    monotone = all(b <= a * (1 + 1e-10) + 1e-15 for a, b in zip(diffs, diffs[1:], strict=False))
    logger.debug("stationary comparison over %d terms, alpha=%g", len(rows), alpha)
    return StationaryComparison(alpha=alpha, rows=rows, monotone=monotone)
