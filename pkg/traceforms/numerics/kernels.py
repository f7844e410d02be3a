"""
Closed-form Green kernels.

Three families are supported:

- exponential1d: G(x, y) = 1/2 exp(-|x - y|) on the line, the Green kernel of
  u -> -u'' + u. Bounded (beta = 0).
- newtonian(d): G(x, y) = c_d |x - y|^(2-d), c_d = Gamma(d/2 - 1) / (4 pi^(d/2)),
  so that -Delta G = delta. beta = d - 2.
- riesz(d, alpha): G(x, y) = kappa_{d,alpha} |x - y|^(alpha-d), the Green kernel
  of the fractional Laplacian. beta = d - alpha.

Points are handled as arrays of shape (n, d). One-dimensional inputs given as
flat sequences are promoted to (n, 1).
"""

import math
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.spatial.distance import cdist
from scipy.special import gamma

from traceforms.core.errors import (
    CoincidentPoints,
    DimensionMismatch,
    InvalidParameter,
    NonpositiveRadius,
)


class KernelType(str, Enum):
    """Kernel families."""

    EXPONENTIAL_1D = "exponential1d"
    NEWTONIAN = "newtonian"
    RIESZ = "riesz"


class SingularityParams(BaseModel):
    """(beta, c, r0) with G(x, y) <= c |x - y|^-beta whenever |x - y| < r0."""

    beta: float
    c_bound: float
    r0: float


class Kernel(BaseModel):
    """
    A Green kernel in closed form.

    Instances are immutable; evaluation is pure and thread safe.
    """

    model_config = ConfigDict(frozen=True)

    type: KernelType = Field(description="Kernel family")
    d: int = Field(default=1, ge=1, description="Dimension of the ambient space")
    alpha: float | None = Field(
        default=None, description="Order of the fractional Laplacian (riesz only)"
    )

    @model_validator(mode="after")
    def _check_family(self) -> "Kernel":
        if self.type == KernelType.EXPONENTIAL_1D and self.d != 1:
            raise ValueError("exponential1d lives on the line (d = 1)")
        if self.type == KernelType.NEWTONIAN and self.d < 3:
            raise ValueError("newtonian kernel needs d >= 3 (transience)")
        if self.type == KernelType.RIESZ:
            if self.alpha is None:
                raise ValueError("riesz kernel needs alpha")
            if not 0.0 < self.alpha < min(2.0, float(self.d)):
                raise ValueError(f"riesz alpha must lie in (0, {min(2, self.d)})")
        return self

    @classmethod
    def exponential1d(cls) -> "Kernel":
        return cls(type=KernelType.EXPONENTIAL_1D, d=1)

    @classmethod
    def newtonian(cls, d: int = 3) -> "Kernel":
        return cls(type=KernelType.NEWTONIAN, d=d)

    @classmethod
    def riesz(cls, d: int, alpha: float) -> "Kernel":
        return cls(type=KernelType.RIESZ, d=d, alpha=alpha)

    @property
    def beta(self) -> float:
        """Singularity exponent."""
        if self.type == KernelType.EXPONENTIAL_1D:
            return 0.0
        if self.type == KernelType.NEWTONIAN:
            return float(self.d - 2)
        return float(self.d) - float(self.alpha)  # type: ignore[arg-type]

    @property
    def c_norm(self) -> float:
        """Normalization constant in front of the radial profile."""
        if self.type == KernelType.EXPONENTIAL_1D:
            return 0.5
        if self.type == KernelType.NEWTONIAN:
            d = self.d
            return float(gamma(d / 2 - 1) / (4 * math.pi ** (d / 2)))
        d, a = self.d, float(self.alpha)  # type: ignore[arg-type]
        return float(gamma((d - a) / 2) / (2**a * math.pi ** (d / 2) * gamma(a / 2)))

    @property
    def is_singular(self) -> bool:
        return self.beta > 0

    def profile(self, rho: np.ndarray) -> np.ndarray:
        """G as a function of the distance rho (no diagonal check)."""
        rho = np.asarray(rho, dtype=float)
        if self.type == KernelType.EXPONENTIAL_1D:
            return self.c_norm * np.exp(-rho)
        with np.errstate(divide="ignore"):
            return self.c_norm * rho ** (-self.beta)

    def _as_points(self, x: object) -> np.ndarray:
        pts = np.atleast_1d(np.asarray(x, dtype=float))
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1) if self.d == 1 else pts.reshape(1, -1)
        if pts.shape[1] != self.d:
            raise DimensionMismatch(
                f"points have dimension {pts.shape[1]}, kernel has dimension {self.d}"
            )
        return pts

    def evaluate(self, x: object, y: object) -> float:
        """G(x, y) for a single pair of points."""
        px, py = self._as_points(x), self._as_points(y)
        if len(px) != 1 or len(py) != 1:
            raise DimensionMismatch("evaluate expects a single pair of points")
        return float(self.matrix(px, py)[0, 0])

    def matrix(self, xs: object, ys: object) -> np.ndarray:
        """Kernel matrix G(xs_i, ys_j); rejects coincident pairs when beta > 0."""
        px, py = self._as_points(xs), self._as_points(ys)
        rho = cdist(px, py)
        if self.is_singular and np.any(rho == 0.0):
            i, j = np.argwhere(rho == 0.0)[0]
            raise CoincidentPoints(
                f"kernel is infinite at coincident points {px[i].tolist()} = {py[j].tolist()}"
            )
        return self.profile(rho)

    def singularity_params(self) -> SingularityParams:
        """The (beta, c, r0) triple of the metric Kato test."""
        if self.type == KernelType.EXPONENTIAL_1D:
            return SingularityParams(beta=0.0, c_bound=0.5, r0=math.inf)
        return SingularityParams(beta=self.beta, c_bound=self.c_norm, r0=math.inf)


def kernel_eval(kernel: Kernel, x: object, y: object) -> float:
    """G(x, y) for one pair."""
    return kernel.evaluate(x, y)


def kernel_singularity_params(kernel: Kernel) -> tuple[float, float, float]:
    """(beta, c_bound, r0) of the kernel."""
    params = kernel.singularity_params()
    return params.beta, params.c_bound, params.r0


def mutual_potential_sphere(
    sphere_i: tuple[float, float], sphere_j: tuple[float, float]
) -> float:
    """
    Mutual Newtonian energy of two concentric uniform spheres in R^3.

    Each sphere is (radius, mass). By the mean-value property the potential
    of a sphere at a point at distance r from the center is
    m / (4 pi max(R, r)), which gives m_i m_j / (4 pi max(R_i, R_j)).
    """
    (r_i, m_i), (r_j, m_j) = sphere_i, sphere_j
    if r_i <= 0 or r_j <= 0:
        raise NonpositiveRadius(f"sphere radii must be positive, got {r_i}, {r_j}")
    return m_i * m_j / (4 * math.pi * max(r_i, r_j))


def sphere_green_matrix(radii: np.ndarray, r: np.ndarray) -> np.ndarray:
    """1 / (4 pi max(R_j, r_i)): potential at radius r_i of a unit-mass sphere R_j."""
    radii = np.asarray(radii, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(radii <= 0):
        raise NonpositiveRadius("sphere radii must be positive")
    if np.any(r < 0):
        raise InvalidParameter("radial evaluation points must be nonnegative")
    return 1.0 / (4 * math.pi * np.maximum(radii[None, :], r[:, None]))
