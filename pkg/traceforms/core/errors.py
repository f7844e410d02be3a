"""
Exception hierarchy for traceforms.

Every numerical precondition failure raises a subclass of TraceFormError.
The runner turns these into failing certifications; anything else is a bug
and propagates.
"""


class TraceFormError(ValueError):
    """Base class for all numerical/admissibility errors."""


class InvalidParameter(TraceFormError):
    """A scalar argument is outside its documented range."""


# kernels


class CoincidentPoints(TraceFormError):
    """Singular kernel evaluated on the diagonal (the measure would charge a polar set)."""


class DimensionMismatch(TraceFormError):
    """Point dimension differs from the kernel dimension."""


class NonpositiveRadius(TraceFormError):
    """A sphere radius is zero or negative."""


# measures


class NonpositiveWeight(TraceFormError):
    """An atom weight or sphere mass is zero or negative."""


class DuplicatePoint(TraceFormError):
    """Two atoms (or two spheres) share a location."""


class EmptyMeasure(TraceFormError):
    """A measure was requested with no atoms."""


class CutoffExceedsLimit(TraceFormError):
    """A truncation cutoff exceeds the proxy limit N_max."""


class NotDominated(TraceFormError):
    """Atomwise weights cross, so the monotone hypothesis fails."""


# potentials / spectra


class PolarAtomicSupport(TraceFormError):
    """Atomic measure paired with a singular kernel (beta > 0)."""


class KernelMismatch(TraceFormError):
    """Measure family is not supported by this kernel."""


class SingularSystem(TraceFormError):
    """A linear system that should be SPD could not be factorized."""


class NonpositiveEigenvalue(TraceFormError):
    """Eigenvalue below -tol; the kernel/measure pair is broken."""


class ConvergenceFailure(TraceFormError):
    """The eigensolver did not converge."""


class BoundaryHitsEigenvalue(TraceFormError):
    """A counting interval endpoint sits on an eigenvalue."""


class ShrinkingSupport(TraceFormError):
    """k_max exceeds the rank of an operator in the sequence."""


# graph form / ball / stationary


class SingularMass(TraceFormError):
    """The mass matrix has a nonpositive diagonal entry."""


class BracketFailure(TraceFormError):
    """A bisection bracket does not contain a sign change."""


class QuadratureUnderflow(TraceFormError):
    """The quadrature produced a non-finite or nonpositive value."""


class PointTooCloseToSupport(TraceFormError):
    """A finite-difference stencil would cross a sphere of the support."""
