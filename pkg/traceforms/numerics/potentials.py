"""
Potential operators and their exact matrix realization.

G^mu u(x) = int G(x, y) u(y) dmu(y) is evaluated in closed form for atomic
and concentric-sphere measures. On L^2(mu) the operator K^mu is realized in
weighted coordinates by the symmetric matrix

    S = W^1/2 G W^1/2,

which is similar to the matrix G W of K^mu acting on functions of the
support. The resolvent of the trace form is (I + aS)^-1 S in the same
coordinates.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from traceforms.core.errors import (
    InvalidParameter,
    KernelMismatch,
    PolarAtomicSupport,
    SingularSystem,
)
from traceforms.numerics.kernels import Kernel, KernelType, sphere_green_matrix
from traceforms.numerics.measures import AtomicMeasure, Measure, SphereFamilyMeasure

logger = logging.getLogger(__name__)

DEFAULT_SOLVE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class EvaluationGrid:
    """
    Finite stand-in for sup over X.

    Points are laid out along the first coordinate axis between lo and hi
    with the given step (radial symmetry makes this enough for sphere
    families) plus any extra points. The grid always contains the support
    points of the measures it was built for.
    """

    points: np.ndarray
    step: float

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if len(pts) == 0:
            raise InvalidParameter("evaluation grid must be nonempty")
        object.__setattr__(self, "points", np.unique(pts, axis=0))

    @classmethod
    def build(
        cls,
        lo: float,
        hi: float,
        step: float,
        dim: int = 1,
        extra_points: list | None = None,
        measures: tuple[Measure, ...] = (),
    ) -> "EvaluationGrid":
        if step <= 0 or hi < lo:
            raise InvalidParameter("grid needs step > 0 and hi >= lo")
        count = int(round((hi - lo) / step)) + 1
        axis = lo + step * np.arange(count)
        pts = np.zeros((count, dim))
        pts[:, 0] = axis
        blocks = [pts]
        if extra_points:
            extra = np.asarray(extra_points, dtype=float)
            blocks.append(extra.reshape(-1, dim) if extra.ndim == 1 else extra)
        blocks.extend(m.support_points() for m in measures if not m.is_zero)
        return cls(points=np.vstack(blocks), step=step)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return len(self.points)

    def including(self, measure: Measure) -> "EvaluationGrid":
        """Grid with the support points of measure added."""
        if measure.is_zero:
            return self
        return EvaluationGrid(points=np.vstack([self.points, measure.support_points()]), step=self.step)

    def off_support(self, measure: Measure, margin: float = 0.0) -> np.ndarray:
        """Grid points farther than margin from every support point (or sphere)."""
        if measure.is_zero:
            return self.points
        if isinstance(measure, SphereFamilyMeasure):
            r = np.linalg.norm(self.points, axis=1)
            gap = np.min(np.abs(r[:, None] - measure.radii[None, :]), axis=1)
        else:
            gap = np.min(
                np.linalg.norm(self.points[:, None, :] - measure.points[None, :, :], axis=2), axis=1
            )
        return self.points[gap > margin]


def _check_sphere_kernel(kernel: Kernel) -> None:
    if kernel.type != KernelType.NEWTONIAN or kernel.d != 3:
        raise KernelMismatch("concentric sphere families need the Newtonian kernel in R^3")


def green_matrix(kernel: Kernel, measure: Measure, points: np.ndarray) -> np.ndarray:
    """G(x_i, support_j) with one column per atom/sphere (unit mass)."""
    points = np.asarray(points, dtype=float)
    if isinstance(measure, SphereFamilyMeasure):
        _check_sphere_kernel(kernel)
        pts = points.reshape(-1, 3) if points.ndim == 1 else points
        return sphere_green_matrix(measure.radii, np.linalg.norm(pts, axis=1))
    return kernel.matrix(points, measure.points)


def potential_field(
    kernel: Kernel, measure: Measure, values: np.ndarray | float, points: np.ndarray
) -> np.ndarray:
    """
    G^mu u at many points.

    values has one entry per atom/sphere, or shape (size, T) for T functions
    at once; a scalar means the constant function.
    """
    pts = np.asarray(points, dtype=float)
    n_pts = 1 if pts.ndim == 1 and kernel.d > 1 else (len(pts) if pts.ndim else 1)
    if measure.is_zero:
        vals = np.asarray(values, dtype=float)
        return np.zeros((n_pts, vals.shape[1])) if vals.ndim == 2 else np.zeros(n_pts)
    u = np.asarray(values, dtype=float)
    if u.ndim == 0:
        u = np.full(measure.size, float(u))
    if u.shape[0] != measure.size:
        raise InvalidParameter(f"expected {measure.size} values, got {u.shape[0]}")
    g = green_matrix(kernel, measure, pts)
    weighted = measure.weights * u.T
    return g @ weighted.T


def potential_apply(
    kernel: Kernel, measure: Measure, u: np.ndarray | float, x: object
) -> float:
    """G^mu u(x) at a single point."""
    return float(potential_field(kernel, measure, u, np.atleast_2d(np.asarray(x, dtype=float)))[0])


def potential_one_sup(kernel: Kernel, measure: Measure, grid: EvaluationGrid) -> float:
    """max over the grid (and the support) of G^mu 1."""
    if measure.is_zero:
        return 0.0
    if isinstance(measure, AtomicMeasure) and kernel.is_singular:
        pts = grid.off_support(measure)
    else:
        pts = grid.including(measure).points
    return float(np.max(potential_field(kernel, measure, 1.0, pts)))


def potential_one_argmax(kernel: Kernel, measure: Measure, grid: EvaluationGrid) -> np.ndarray:
    """Grid point where G^mu 1 is largest."""
    pts = grid.including(measure).points
    return pts[int(np.argmax(potential_field(kernel, measure, 1.0, pts)))]


@dataclass(frozen=True, eq=False)
class SymmetricOperator:
    """
    S = W^1/2 G W^1/2 realizing K^mu on L^2(mu).

    matrix is exactly symmetric (upper triangle mirrored).
    """

    matrix: np.ndarray
    kernel: Kernel
    measure: Measure

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def sqrt_weights(self) -> np.ndarray:
        return np.sqrt(self.measure.weights)

    @property
    def potential_matrix(self) -> np.ndarray:
        """G W: the unsymmetrized matrix of K^mu on functions of the support."""
        s = self.sqrt_weights
        return self.matrix * (s[None, :] / s[:, None])

    def to_weighted(self, u: np.ndarray) -> np.ndarray:
        """u on the support -> L^2(mu)-isometric coordinates W^1/2 u."""
        return self.sqrt_weights * np.asarray(u, dtype=float)

    def from_weighted(self, v: np.ndarray) -> np.ndarray:
        s = self.sqrt_weights
        v = np.asarray(v, dtype=float)
        return v / (s[:, None] if v.ndim == 2 else s)


def operator_matrix(kernel: Kernel, measure: Measure) -> SymmetricOperator:
    """Exact finite matrix of K^mu."""
    if isinstance(measure, AtomicMeasure):
        if kernel.is_singular:
            raise PolarAtomicSupport(
                f"atoms are polar for the {kernel.type.value} kernel (beta = {kernel.beta})"
            )
        g = kernel.matrix(measure.points, measure.points)
    else:
        _check_sphere_kernel(kernel)
        g = sphere_green_matrix(measure.radii, measure.radii)
    s = np.sqrt(measure.weights)
    full = s[:, None] * g * s[None, :]
    upper = np.triu(full)
    matrix = upper + np.triu(full, 1).T
    logger.debug("operator matrix of size %d for %s", len(s), kernel.type.value)
    return SymmetricOperator(matrix=matrix, kernel=kernel, measure=measure)


def _spd_solve(a: np.ndarray, b: np.ndarray, tol: float) -> np.ndarray:
    try:
        factor = linalg.cho_factor(a, lower=False, check_finite=True)
        x = linalg.cho_solve(factor, b)
    except linalg.LinAlgError as e:
        raise SingularSystem(f"matrix is not positive definite: {e}") from e
    residual = np.linalg.norm(a @ x - b) / max(np.linalg.norm(b), np.finfo(float).tiny)
    if residual > tol * max(1.0, np.linalg.cond(a)):
        raise SingularSystem(f"relative residual {residual:.3e} exceeds tolerance")
    return x


def resolvent_matrix(
    operator: SymmetricOperator, alpha: float, tol: float = DEFAULT_SOLVE_TOL
) -> np.ndarray:
    """R_a = (I + aS)^-1 S."""
    if alpha < 0:
        raise InvalidParameter("alpha must be nonnegative")
    s = operator.matrix
    if alpha == 0:
        return s.copy()
    return _spd_solve(np.eye(operator.size) + alpha * s, s, tol)


def resolvent_apply(
    operator: SymmetricOperator,
    alpha: float,
    psi: np.ndarray,
    tol: float = DEFAULT_SOLVE_TOL,
) -> np.ndarray:
    """(I + aS)^-1 S psi, by a Cholesky solve."""
    if alpha < 0:
        raise InvalidParameter("alpha must be nonnegative")
    rhs = operator.matrix @ np.asarray(psi, dtype=float)
    if alpha == 0:
        return rhs
    return _spd_solve(np.eye(operator.size) + alpha * operator.matrix, rhs, tol)


def resolvent_identity_residual(operator: SymmetricOperator, alpha: float) -> float:
    """max |S - R_a - a R_a S|."""
    s = operator.matrix
    r = resolvent_matrix(operator, alpha)
    return float(np.max(np.abs(s - r - alpha * r @ s)))


def hardy_constant_bounds(
    kernel: Kernel, measure: Measure, grid: EvaluationGrid
) -> tuple[float, float]:
    """(||K^mu||, sup G^mu 1): the best Hardy constant and its potential bound."""
    if measure.is_zero:
        return 0.0, 0.0
    operator = operator_matrix(kernel, measure)
    top = linalg.eigh(
        operator.matrix, eigvals_only=True, subset_by_index=[operator.size - 1, operator.size - 1]
    )
    return float(top[0]), potential_one_sup(kernel, measure, grid)


def _columns(support: Measure, measure: Measure) -> list[int]:
    index = {key: i for i, key in enumerate(support.keys())}
    return [index[key] for key in measure.keys()]


def operator_difference_sup(
    kernel: Kernel,
    mu_limit: Measure,
    mu_n: Measure,
    test_functions: np.ndarray,
    points: np.ndarray,
    support: Measure | None = None,
) -> np.ndarray:
    """
    max over points of |G^mu_inf u - G^mu_n u| for each test function.

    test_functions has shape (size of support, T): values of bounded
    functions on a support containing both measures (default: mu_limit).
    """
    support = mu_limit if support is None else support
    lim = potential_field(kernel, mu_limit, test_functions[_columns(support, mu_limit)], points)
    if mu_n.is_zero:
        return np.max(np.abs(lim), axis=0)
    part = potential_field(kernel, mu_n, test_functions[_columns(support, mu_n)], points)
    return np.max(np.abs(lim - part), axis=0)


def bounded_potential_matrix(kernel: Kernel, measure: Measure, support: Measure) -> np.ndarray:
    """
    G^mu on bounded functions of the points of `support`.

    measure must live on (a subset of) the support points; G^mu f at those
    points only involves the values of f there, so the matrix is exact.
    """
    n = support.size
    p = np.zeros((n, n))
    if not measure.is_zero:
        g = green_matrix(kernel, measure, support.support_points())
        p[:, _columns(support, measure)] = g * measure.weights[None, :]
    return p


def bounded_resolvent(
    kernel: Kernel, measure: Measure, support: Measure, alpha: float
) -> tuple[np.ndarray, np.ndarray]:
    """((1 + aG^mu)^-1 G^mu, (1 + aG^mu)^-1) on bounded functions of `support`."""
    if alpha < 0:
        raise InvalidParameter("alpha must be nonnegative")
    p = bounded_potential_matrix(kernel, measure, support)
    try:
        inverse = linalg.inv(np.eye(support.size) + alpha * p)
    except linalg.LinAlgError as e:
        raise SingularSystem(f"1 + aG^mu is singular: {e}") from e
    return inverse @ p, inverse


def sup_norm_operator(matrix: np.ndarray) -> float:
    """Operator norm on bounded functions (max absolute row sum)."""
    return float(np.max(np.sum(np.abs(matrix), axis=1))) if matrix.size else 0.0
