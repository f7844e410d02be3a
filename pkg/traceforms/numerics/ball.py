"""
Limit spectrum of the trace of -Delta + 1 on the unit sphere in R^3.

The energies are

    E_m = m + 2 sum_{k >= 1} 1 / (1 + j_{mk}^2),   multiplicity 2m + 1,

where j_{mk} are the positive zeros of the spherical Bessel function j_m.
The series equals i_m'(1) / i_m(1) for the modified spherical Bessel
function i_m, which is reported alongside as a closed-form oracle.
"""

import logging
import math

import numpy as np
from numpy.polynomial.legendre import leggauss
from pydantic import BaseModel, Field
from scipy.special import psi, spherical_in, spherical_jn

from traceforms.core.errors import BracketFailure, InvalidParameter, QuadratureUnderflow

logger = logging.getLogger(__name__)

MIN_TERMS = 16
BISECTION_STEPS = 100


def _bisect(order: int, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    f_lo = spherical_jn(order, lo)
    f_hi = spherical_jn(order, hi)
    bad = np.sign(f_lo) * np.sign(f_hi) >= 0
    if np.any(bad):
        j = int(np.argmax(bad))
        raise BracketFailure(
            f"j_{order} has no sign change on [{lo[j]:.6f}, {hi[j]:.6f}]"
        )
    lo, hi = lo.copy(), hi.copy()
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        f_mid = spherical_jn(order, mid)
        left = np.sign(f_mid) == np.sign(f_lo)
        lo = np.where(left, mid, lo)
        f_lo = np.where(left, f_mid, f_lo)
        hi = np.where(left, hi, mid)
        if np.all(hi - lo <= 4 * np.finfo(float).eps * hi):
            break
    return 0.5 * (lo + hi)


def spherical_bessel_zeros(m: int, count: int) -> np.ndarray:
    """
    First count positive zeros of j_m, ascending.

    Zeros of j_{i-1} bracket those of j_i (interlacing), starting from the
    zeros k pi of j_0 = sin x / x.
    """
    if m < 0 or count < 1:
        raise InvalidParameter("need m >= 0 and count >= 1")
    zeros = math.pi * np.arange(1, count + m + 1, dtype=float)
    for order in range(1, m + 1):
        zeros = _bisect(order, zeros[:-1], zeros[1:])
    return zeros[:count]


def _shifted_tail(start: int, shift: float) -> float:
    """sum_{k > start} 1 / (1 + pi^2 (k + shift)^2), via the digamma function."""
    a = start + 1 + shift
    return float(np.imag(psi(complex(a, 1.0 / math.pi))) / math.pi)


class BallEigenvalue(BaseModel):
    """One limit energy of the unit ball with its certified truncation."""

    m: int = Field(ge=0, description="Harmonic degree")
    zeros: list[float] = Field(description="Zeros j_m1 < j_m2 < ... used in the partial sum")
    value: float = Field(description="Series value (midpoint of the certified bracket)")
    tail_bound: float = Field(description="Upper bound of the omitted remainder 2 sum_{k>K}")
    error_bound: float = Field(description="Half width of the certified bracket around value")
    lower: float
    upper: float
    closed_form: float = Field(description="i_m'(1) / i_m(1)")
    multiplicity: int

    @property
    def truncation(self) -> int:
        return len(self.zeros)


def ball_closed_form(m: int) -> float:
    """i_m'(1) / i_m(1)."""
    if m < 0:
        raise InvalidParameter("m must be nonnegative")
    return float(spherical_in(m, 1.0, derivative=True) / spherical_in(m, 1.0))


def ball_eigenvalue(m: int, tol: float = 1e-8) -> BallEigenvalue:
    """
    E_m to within tol.

    k pi < j_{mk} < (k + m) pi brackets every omitted term; both bracket
    tails are summed exactly, and the truncation K grows until the bracket
    half width is below tol.
    """
    if m < 0:
        raise InvalidParameter("m must be nonnegative")
    if tol <= 0:
        raise InvalidParameter("tol must be positive")
    count = max(MIN_TERMS, math.ceil(math.sqrt(m / (math.pi**2 * tol))))
    while True:
        zeros = spherical_bessel_zeros(m, count)
        partial = float(np.sum(1.0 / (1.0 + zeros**2)))
        upper_tail = _shifted_tail(count, 0.0)
        lower_tail = _shifted_tail(count, float(m))
        lower = m + 2 * (partial + lower_tail)
        upper = m + 2 * (partial + upper_tail)
        half_width = 0.5 * (upper - lower)
        if half_width < tol:
            break
        count *= 2
    logger.debug("ball series m=%d truncated at K=%d (half width %.2e)", m, count, half_width)
    return BallEigenvalue(
        m=m,
        zeros=zeros.tolist(),
        value=0.5 * (lower + upper),
        tail_bound=2 * upper_tail,
        error_bound=half_width,
        lower=lower,
        upper=upper,
        closed_form=ball_closed_form(m),
        multiplicity=2 * m + 1,
    )


def ball_eigenvalue_table(m_max: int, tol: float = 1e-8) -> list[BallEigenvalue]:
    return [ball_eigenvalue(m, tol) for m in range(m_max + 1)]


class AnnulusGap(BaseModel):
    """sup_x int_{shell} |x - y|^-1 dy for the shell 1 - 1/n < |y| < 1."""

    n: int
    value: float
    argmax_radius: float = Field(description="|x| where the supremum is attained")
    cavity_value: float = Field(description="Exact value on the inner cavity, 2 pi (1 - a^2)")


def _shell_potential(r: np.ndarray, inner: float, nodes: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """
    int_{inner < |y| < 1} |x - y|^-1 dy at |x| = r.

    The angular mean of |x - y|^-1 over a sphere of radius rho is
    1 / max(r, rho); the radial integral is split at rho = r and done by
    Gauss-Legendre on each piece.
    """

    def radial(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        half = 0.5 * (hi - lo)
        rho = 0.5 * (hi + lo)[:, None] + half[:, None] * nodes[None, :]
        integrand = 4 * math.pi * rho**2 / np.maximum(rho, r[:, None])
        return half * (integrand @ weights)

    split = np.clip(r, inner, 1.0)
    return radial(np.full_like(r, inner), split) + radial(split, np.ones_like(r))


def annulus_potential_gap(
    n: int, quadrature_points: int = 1000, radial_points: int = 2001
) -> AnnulusGap:
    """Free-space bound of the potential gap between the shell family and its limit."""
    if n < 2:
        raise InvalidParameter("n must be >= 2")
    if quadrature_points < 1000:
        raise InvalidParameter("quadrature_points must be >= 1000")
    inner = 1.0 - 1.0 / n
    if not 1.0 - inner > 0.0:
        raise QuadratureUnderflow(f"shell width 1/{n} underflows")
    nodes, weights = leggauss(quadrature_points)
    radii = np.union1d(np.linspace(0.0, 1.0, radial_points), [inner])
    values = _shell_potential(radii, inner, nodes, weights)
    if not np.all(np.isfinite(values)) or np.max(values) <= 0.0:
        raise QuadratureUnderflow(f"shell integral vanished numerically for n = {n}")
    i = int(np.argmax(values))
    return AnnulusGap(
        n=n,
        value=float(values[i]),
        argmax_radius=float(radii[i]),
        cavity_value=2 * math.pi * (1 - inner**2),
    )


def annulus_gap_slope(gaps: list[AnnulusGap]) -> float:
    """Least-squares slope of log gap against log n."""
    if len(gaps) < 2:
        raise InvalidParameter("need at least two cutoffs for a slope")
    ns = np.log([g.n for g in gaps])
    vals = np.log([g.value for g in gaps])
    return float(np.polyfit(ns, vals, 1)[0])
