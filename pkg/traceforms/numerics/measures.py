"""
Admissible measures and monotone measure sequences.

Two finite families make K^mu an exact finite matrix:

- AtomicMeasure: points with positive weights (bounded kernels only).
- SphereFamilyMeasure: concentric spheres about the origin of R^3 with
  uniform surface mass (Newtonian kernel).

Sequences mu_1, ..., mu_N with a finite proxy limit mu_inf are monotone
atomwise/spherewise; their difference measures nu_n = |mu_inf - mu_n| are
again measures of the same family.
"""

import logging
import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

import numpy as np

from traceforms.core.errors import (
    CutoffExceedsLimit,
    DuplicatePoint,
    EmptyMeasure,
    InvalidParameter,
    NonpositiveRadius,
    NonpositiveWeight,
    NotDominated,
)

logger = logging.getLogger(__name__)


class Direction(str, Enum):
    """Direction of a monotone family."""

    INCREASING = "increasing"
    DECREASING = "decreasing"


def _points_array(points: object) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 0:
        pts = pts.reshape(1, 1)
    elif pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    return pts


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """
    Finite sum of weighted Dirac masses.

    An empty AtomicMeasure is the zero measure; use atomic_measure_new to
    reject it at construction time.
    """

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        pts = _points_array(self.points)
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if len(pts) != len(w):
            raise InvalidParameter(f"{len(pts)} points but {len(w)} weights")
        if np.any(w <= 0):
            raise NonpositiveWeight("atom weights must be strictly positive")
        keys = {tuple(p) for p in pts}
        if len(keys) != len(pts):
            raise DuplicatePoint("atoms must be pairwise distinct")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def is_zero(self) -> bool:
        return self.size == 0

    def support_points(self) -> np.ndarray:
        """Atom coordinates, shape (n, d)."""
        return self.points

    def keys(self) -> list[tuple[float, ...]]:
        return [tuple(p) for p in self.points]

    def as_dict(self) -> dict[tuple[float, ...], float]:
        return dict(zip(self.keys(), self.weights.tolist(), strict=True))

    @classmethod
    def from_dict(cls, atoms: Mapping[tuple[float, ...], float], dim: int = 1) -> "AtomicMeasure":
        items = sorted(atoms.items())
        if not items:
            return cls(points=np.zeros((0, dim)), weights=np.zeros(0))
        return cls(
            points=np.array([k for k, _ in items], dtype=float),
            weights=np.array([v for _, v in items], dtype=float),
        )

    def mass_in_ball(self, center: np.ndarray, r: float) -> float:
        """mu(B_r(center)) for the open ball."""
        if self.is_zero:
            return 0.0
        dist = np.linalg.norm(self.points - np.asarray(center, dtype=float), axis=1)
        return float(self.weights[dist < r].sum())


@dataclass(frozen=True, eq=False)
class SphereFamilyMeasure:
    """Concentric uniform spheres about the origin of R^3."""

    radii: np.ndarray
    masses: np.ndarray
    dim: int = field(default=3, init=False)

    def __post_init__(self) -> None:
        r = np.asarray(self.radii, dtype=float).reshape(-1)
        m = np.asarray(self.masses, dtype=float).reshape(-1)
        if len(r) != len(m):
            raise InvalidParameter(f"{len(r)} radii but {len(m)} masses")
        if np.any(r <= 0):
            raise NonpositiveRadius("sphere radii must be positive")
        if np.any(np.diff(r) <= 0):
            raise DuplicatePoint("sphere radii must be strictly increasing")
        if np.any(m <= 0):
            raise NonpositiveWeight("sphere masses must be strictly positive")
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "masses", m)

    @property
    def size(self) -> int:
        return len(self.masses)

    @property
    def weights(self) -> np.ndarray:
        return self.masses

    @property
    def is_zero(self) -> bool:
        return self.size == 0

    def support_points(self) -> np.ndarray:
        """One representative point per sphere, on the positive x-axis."""
        pts = np.zeros((self.size, 3))
        pts[:, 0] = self.radii
        return pts

    def keys(self) -> list[float]:
        return self.radii.tolist()

    def as_dict(self) -> dict[float, float]:
        return dict(zip(self.radii.tolist(), self.masses.tolist(), strict=True))

    @classmethod
    def from_dict(cls, spheres: Mapping[float, float]) -> "SphereFamilyMeasure":
        items = sorted(spheres.items())
        return cls(
            radii=np.array([k for k, _ in items], dtype=float),
            masses=np.array([v for _, v in items], dtype=float),
        )

    @classmethod
    def surface(cls, radius: float = 1.0) -> "SphereFamilyMeasure":
        """Surface measure of the sphere of the given radius (mass 4 pi R^2)."""
        return cls(radii=np.array([radius]), masses=np.array([4 * math.pi * radius**2]))

    def mass_in_ball(self, center: np.ndarray, r: float) -> float:
        """
        mu(B_r(center)) in closed form.

        For a uniform sphere of radius R and mass m seen from distance rho,
        the distance t to its points has density m t / (2 R rho) on
        [|R - rho|, R + rho].
        """
        rho = float(np.linalg.norm(center))
        total = 0.0
        for big_r, m in zip(self.radii, self.masses, strict=True):
            if rho == 0.0:
                total += m if big_r < r else 0.0
                continue
            lo, hi = abs(big_r - rho), min(r, big_r + rho)
            if hi > lo:
                total += m * (hi**2 - lo**2) / (4 * big_r * rho)
        return total


Measure = Union[AtomicMeasure, SphereFamilyMeasure]


def atomic_measure_new(points: Sequence[object], weights: Sequence[float]) -> AtomicMeasure:
    """Validated, nonempty atomic measure."""
    if len(weights) == 0:
        raise EmptyMeasure("an atomic measure needs at least one atom")
    if len(points) != len(weights):
        raise InvalidParameter(f"{len(points)} points but {len(weights)} weights")
    return AtomicMeasure(points=np.asarray(points, dtype=float), weights=np.asarray(weights, dtype=float))


def zero_like(measure: Measure) -> Measure:
    """The zero measure of the same family."""
    if isinstance(measure, SphereFamilyMeasure):
        return SphereFamilyMeasure(radii=np.zeros(0), masses=np.zeros(0))
    return AtomicMeasure(points=np.zeros((0, measure.dim)), weights=np.zeros(0))


def total_mass(measure: Measure) -> float:
    """Sum of weights (atoms) or masses (spheres)."""
    return float(np.sum(measure.weights))


def _from_dict_like(template: Measure, entries: dict) -> Measure:
    if isinstance(template, SphereFamilyMeasure):
        return SphereFamilyMeasure.from_dict(entries)
    return AtomicMeasure.from_dict(entries, dim=template.dim)


def measure_difference(
    mu_limit: Measure,
    mu_n: Measure,
    direction: Direction = Direction.INCREASING,
) -> Measure:
    """
    nu_n = |mu_inf - mu_n| atomwise.

    For an increasing family mu_n must be dominated by mu_inf; for a
    decreasing family mu_n must dominate mu_inf.
    """
    if type(mu_limit) is not type(mu_n):
        raise InvalidParameter("measures of different families cannot be compared")
    upper, lower = (mu_limit, mu_n) if direction == Direction.INCREASING else (mu_n, mu_limit)
    up, low = upper.as_dict(), lower.as_dict()
    diff: dict = {}
    for key, w in low.items():
        if key not in up or up[key] < w:
            raise NotDominated(
                f"weight at {key} is {w} but the dominating measure has {up.get(key, 0.0)}"
            )
    for key, w in up.items():
        rest = w - low.get(key, 0.0)
        if rest > 0:
            diff[key] = rest
    return _from_dict_like(mu_limit, diff)


def dominates(upper: Measure, lower: Measure) -> bool:
    """True when lower <= upper atomwise."""
    try:
        measure_difference(upper, lower, Direction.INCREASING)
    except NotDominated:
        return False
    return True


@dataclass(frozen=True, eq=False)
class MeasureSequence:
    """
    Monotone family mu_n (labelled by the schedule) with a finite proxy limit.
    """

    terms: tuple[Measure, ...]
    limit: Measure
    direction: Direction = Direction.INCREASING
    labels: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not self.terms:
            raise EmptyMeasure("a measure sequence needs at least one term")
        labels = self.labels or tuple(range(len(self.terms)))
        if len(labels) != len(self.terms):
            raise InvalidParameter("one label per term is required")
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "labels", tuple(labels))
        chain = [*self.terms, self.limit]
        for a, b in zip(chain, chain[1:], strict=False):
            upper, lower = (b, a) if self.direction == Direction.INCREASING else (a, b)
            if not dominates(upper, lower):
                raise NotDominated(f"sequence is not {self.direction.value} atomwise")

    def __len__(self) -> int:
        return len(self.terms)

    def differences(self) -> list[Measure]:
        """nu_n for every term."""
        return [measure_difference(self.limit, mu, self.direction) for mu in self.terms]


def geometric_weights(rate: float) -> Callable[[int], float]:
    """a_k = rate^|k|."""
    if not 0 < rate:
        raise InvalidParameter("rate must be positive")
    return lambda k: rate ** abs(k)


def truncate_sequence(
    weights: Callable[[int], float] | Mapping[int, float],
    schedule: Sequence[int],
    n_max: int,
) -> MeasureSequence:
    """
    mu_n = sum_{|k| <= n} a_k delta_k for n in the schedule, limit at n_max.
    """
    if n_max < 0:
        raise InvalidParameter("n_max must be nonnegative")
    lookup = weights.__getitem__ if isinstance(weights, Mapping) else weights
    a = {k: float(lookup(k)) for k in range(-n_max, n_max + 1)}
    if any(v <= 0 for v in a.values()):
        raise NonpositiveWeight("lattice weights must be strictly positive")

    def truncated(n: int) -> AtomicMeasure:
        ks = range(-n, n + 1)
        return AtomicMeasure(
            points=np.array(list(ks), dtype=float), weights=np.array([a[k] for k in ks])
        )

    for n in schedule:
        if n > n_max:
            raise CutoffExceedsLimit(f"cutoff {n} exceeds n_max = {n_max}")
        if n < 0:
            raise InvalidParameter("cutoffs must be nonnegative")
    logger.debug("truncated lattice sequence: %d terms, n_max=%d", len(schedule), n_max)
    return MeasureSequence(
        terms=tuple(truncated(n) for n in schedule),
        limit=truncated(n_max),
        direction=Direction.INCREASING,
        labels=tuple(schedule),
    )


def thinning_shell_sequence(
    schedule: Sequence[int],
    slices: int = 8,
    radius: float = 1.0,
) -> MeasureSequence:
    """
    Decreasing family 1_{Omega_n} dx + dS on the ball, realized by spheres.

    Omega_n = {radius - radius/n < |x| < radius}. The shell is cut into
    concentric slices of common width delta (midpoint rule, mass
    4 pi r^2 delta each); mu_n keeps the slices whose midpoint lies in
    Omega_n, plus the surface sphere. The limit is the surface measure.
    """
    if not schedule or min(schedule) < 2:
        raise InvalidParameter("shell cutoffs must be >= 2")
    if slices < 1:
        raise InvalidParameter("slices must be >= 1")
    n_min, n_top = min(schedule), max(schedule)
    delta = radius / (n_top * slices)
    count = math.ceil(n_top * slices / n_min)
    mids = radius - delta * (np.arange(count) + 0.5)
    surface = {radius: 4 * math.pi * radius**2}

    def shell(n: int) -> SphereFamilyMeasure:
        inner = radius - radius / n
        entries = dict(surface)
        for r in mids[mids > inner]:
            entries[float(r)] = 4 * math.pi * float(r) ** 2 * delta
        return SphereFamilyMeasure.from_dict(entries)

    ordered = sorted(schedule)
    return MeasureSequence(
        terms=tuple(shell(n) for n in ordered),
        limit=SphereFamilyMeasure.from_dict(surface),
        direction=Direction.DECREASING,
        labels=tuple(ordered),
    )
