"""
Certification taxonomy for traceforms.

Every certification emitted by an experiment belongs to one check listed
here. The descriptions document the mathematical claim and how the
computation decides it.
"""

from enum import Enum
from typing import Any

__all__ = [
    "CertificationCheck",
    "CHECK_DESCRIPTIONS",
    "get_check_description",
    "format_check_help",
    "format_taxonomy_overview",
]


class CertificationCheck(str, Enum):
    """Properties certified by the experiments."""

    HARDY_SANDWICH = "hardy_sandwich"
    RESOLVENT_IDENTITY = "resolvent_identity"
    SPECTRUM_REPRESENTATION = "spectrum_representation"
    EIGENFUNCTION_EXTENSION = "eigenfunction_extension"
    RAYLEIGH_RITZ = "rayleigh_ritz"
    ORDERED_EIGENVALUE_CONVERGENCE = "ordered_eigenvalue_convergence"
    ERROR_BOUND_RATIO = "error_bound_ratio"
    GROUND_STATE_MONOTONICITY = "ground_state_monotonicity"
    GROUND_STATE_IDENTITY = "ground_state_identity"
    POTENTIAL_CONVERGENCE = "potential_convergence"
    OPERATOR_DIFFERENCE_BOUND = "operator_difference_bound"
    PROJECTION_DIMENSION_STABILITY = "projection_dimension_stability"
    RESOLVENT_CONVERGENCE = "resolvent_convergence"
    GRAPH_FORM_EQUIVALENCE = "graph_form_equivalence"
    BALL_SERIES = "ball_series"
    ANNULUS_GAP_DECAY = "annulus_gap_decay"
    STATIONARY_IDENTITY = "stationary_identity"
    STATIONARY_HARMONICITY = "stationary_harmonicity"
    STATIONARY_FLUX_JUMP = "stationary_flux_jump"
    STATIONARY_BOUND = "stationary_bound"
    KATO_CRITERION = "kato_criterion"
    VOLUME_GROWTH = "volume_growth"
    EXPERIMENT_ERROR = "experiment_error"


CHECK_DESCRIPTIONS: dict[CertificationCheck, dict[str, Any]] = {
    CertificationCheck.HARDY_SANDWICH: {
        "name": "Hardy Sandwich",
        "command": "spectrum",
        "short_description": "Best Hardy constant ||K^mu|| is bounded by sup G^mu 1",
        "long_description": """
The best constant in the Hardy inequality on L^2(mu) equals the operator
norm of K^mu, i.e. the largest eigenvalue of S. It never exceeds the sup
norm of the potential G^mu 1, evaluated on the evaluation grid (which
always contains the support).
""",
    },
    CertificationCheck.RESOLVENT_IDENTITY: {
        "name": "Resolvent Identity",
        "command": "spectrum",
        "short_description": "R_a = (I + aS)^-1 S satisfies S - R_a - a R_a S = 0",
        "long_description": """
The resolvent of the trace form is realized in weighted coordinates as
(I + aS)^-1 S. The algebraic identity S - R_a - a R_a S = 0 is evaluated
in max norm for each configured a.
""",
    },
    CertificationCheck.SPECTRUM_REPRESENTATION: {
        "name": "Spectrum Across Representations",
        "command": "spectrum",
        "short_description": "S and the unsymmetrized matrix G W share eigenvalues",
        "long_description": """
S = W^1/2 G W^1/2 is similar to G W, the matrix of the potential operator
on functions of the support. Both spectra are computed independently and
compared with multiplicities.
""",
    },
    CertificationCheck.EIGENFUNCTION_EXTENSION: {
        "name": "Eigenfunction Extension",
        "command": "spectrum",
        "short_description": "(1/lambda) G^mu u is a continuous eigenfunction off the support",
        "long_description": """
Each eigenvector extends to a continuous function vanishing at infinity via
(1/lambda) G^mu u. The extension reproduces u on the support and satisfies
G^mu f = lambda f at off-support points.
""",
    },
    CertificationCheck.RAYLEIGH_RITZ: {
        "name": "Rayleigh-Ritz Consistency",
        "command": "spectrum",
        "short_description": "Smallest energy never exceeds a sampled Rayleigh quotient",
        "long_description": """
The smallest eigenvalue of the trace form is the minimum of its Rayleigh
quotient. Random unit vectors in L^2(mu) therefore give quotients that are
all at least E^(0).
""",
    },
    CertificationCheck.ORDERED_EIGENVALUE_CONVERGENCE: {
        "name": "Ordered Eigenvalue Convergence",
        "command": "converge",
        "short_description": "E_n^(k) approaches E_inf^(k) for every tracked k",
        "long_description": """
For each k below k_max the gaps |1/E_n^(k) - 1/E_inf^(k)| are nonincreasing
along the schedule (interlacing of principal submatrices) and the gap at the
last scheduled n is at most the convergence tolerance.
""",
    },
    CertificationCheck.ERROR_BOUND_RATIO: {
        "name": "Quantitative Error Bound",
        "command": "converge",
        "short_description": "|1/E_inf - 1/E_n| / ||G^nu_n 1|| stays bounded",
        "long_description": """
The ratios of eigenvalue gaps (in lambda = 1/E) to the sup norm of the
difference potential are finite; their running supremum over the stability
window varies by less than the configured fraction; for k = 0 and an
increasing family every ratio is at most one. Gaps below the eigensolver
resolution are left out of the window.
""",
    },
    CertificationCheck.GROUND_STATE_MONOTONICITY: {
        "name": "Ground State Monotonicity",
        "command": "converge",
        "short_description": "E_n^(0) decreases for increasing families, increases for decreasing",
        "long_description": """
The smallest eigenvalue is strictly monotone in the direction opposite to
the measures: adding mass lowers it, removing mass raises it. Ties are
accepted only between terms that already match the limit to rounding.
""",
    },
    CertificationCheck.GROUND_STATE_IDENTITY: {
        "name": "Ground State Identity",
        "command": "converge",
        "short_description": "E_n^(0) - E_inf^(0) = 1/||S_n|| - 1/||S_inf||",
        "long_description": """
The smallest energy is the reciprocal of the operator norm. The norm is
computed independently (spectral 2-norm) and compared to the eigenvalue.
""",
    },
    CertificationCheck.POTENTIAL_CONVERGENCE: {
        "name": "Uniform Potential Convergence",
        "command": "converge",
        "short_description": "sup |G^mu_n 1 - G^mu_inf 1| equals ||G^nu_n 1|| and decays to 0",
        "long_description": """
For monotone families the difference of the potentials of 1 is the
potential of the difference measure. Its sup norm is nonincreasing in n and
vanishes at the limit.
""",
    },
    CertificationCheck.OPERATOR_DIFFERENCE_BOUND: {
        "name": "Operator Difference Bound",
        "command": "converge",
        "short_description": "|G^mu_inf u - G^mu_n u| <= ||G^nu_n 1|| for ||u|| <= 1",
        "long_description": """
Random bounded test functions with sup norm at most one are pushed through
both potential operators; the grid maximum of the difference never exceeds
the sup norm of the difference potential.
""",
    },
    CertificationCheck.PROJECTION_DIMENSION_STABILITY: {
        "name": "Projection Dimension Stability",
        "command": "converge",
        "short_description": "Eigenvalue counts in fixed intervals settle for large n",
        "long_description": """
The dimension of a spectral projection equals the number of eigenvalues in
the interval. For intervals whose endpoints avoid the limit spectrum the
count becomes constant from some n0 on and equals the limit count.
""",
    },
    CertificationCheck.RESOLVENT_CONVERGENCE: {
        "name": "Resolvent Convergence",
        "command": "converge",
        "short_description": "||R_a^(n) - R_a^(inf)|| on bounded functions decreases in n",
        "long_description": """
(1 + aG^mu)^-1 G^mu acting on bounded functions of the largest support in
the family is formed for every term; the infinity-norm distance to the
limit resolvent is nonincreasing and stays below
||(1 + aG^mu_n)^-1|| ||(1 + aG^mu_inf)^-1|| ||G^nu_n 1||.
""",
    },
    CertificationCheck.GRAPH_FORM_EQUIVALENCE: {
        "name": "Lattice Trace Form Equivalence",
        "command": "graph1d-validate",
        "short_description": "Stiffness/mass spectrum equals the kernel-matrix spectrum",
        "long_description": """
On atoms of Z with the exponential kernel the trace form is an explicit
tridiagonal quadratic form. Its generalized eigenvalues coincide with the
reciprocals of the kernel-matrix eigenvalues.
""",
    },
    CertificationCheck.BALL_SERIES: {
        "name": "Ball Eigenvalue Series",
        "command": "ball-eig",
        "short_description": "m + 2 sum 1/(1 + j_mk^2) matches i_m'(1)/i_m(1)",
        "long_description": """
The trace-form eigenvalue on the unit sphere for harmonic degree m is a
series over spherical Bessel zeros. The truncated series with its certified
tail bracket is compared with the closed-form ratio of the modified
spherical Bessel function.
""",
    },
    CertificationCheck.ANNULUS_GAP_DECAY: {
        "name": "Annulus Gap Decay",
        "command": "annulus-gap",
        "short_description": "sup_x int_shell |x-y|^-1 dy decays like 1/n",
        "long_description": """
The Newtonian potential of the boundary shell of width 1/n is maximized on
a radial grid; a log-log regression over n has slope -1 within tolerance.
""",
    },
    CertificationCheck.STATIONARY_IDENTITY: {
        "name": "Stationary Resolvent Identity",
        "command": "stationary",
        "short_description": "u_n + a G^mu u_n = G^mu u on and off the support",
        "long_description": """
The stationary field is evaluated on the spheres and at off-support points
and plugged into its defining identity.
""",
    },
    CertificationCheck.STATIONARY_HARMONICITY: {
        "name": "Stationary Harmonicity",
        "command": "stationary",
        "short_description": "Discrete Laplacian of u_n vanishes away from the spheres",
        "long_description": """
Away from the support the stationary field is harmonic; the 7-point
central-difference Laplacian, scaled by |u_n|, is below tolerance.
""",
    },
    CertificationCheck.STATIONARY_FLUX_JUMP: {
        "name": "Stationary Flux Jump",
        "command": "stationary",
        "short_description": "Radial derivative jumps by (u - a u_n) m/(4 pi R^2) at each sphere",
        "long_description": """
The surface term of the distributional equation shows up as a jump of the
radial derivative at each sphere, measured by one-sided differences.
""",
    },
    CertificationCheck.STATIONARY_BOUND: {
        "name": "Stationary Convergence Bound",
        "command": "stationary",
        "short_description": "||u_n - u_inf|| <= ||u|| ||G^nu_n 1|| for every n",
        "long_description": """
Along a monotone sphere family the sup distance of stationary fields is
bounded by the data norm times the difference potential, and it does not
grow along the schedule.
""",
    },
    CertificationCheck.KATO_CRITERION: {
        "name": "Kato Criterion",
        "command": "kato-check",
        "short_description": "sup_x int_{B_r(x)} rho^-beta dmu -> 0 as r -> 0",
        "long_description": """
A finite measure is G-Kato exactly when the truncated singular integral
vanishes uniformly as the radius shrinks. Atoms fail for beta > 0; bounded
kernels make the criterion vacuous. A still-decreasing integral above tol
is settled by a passing volume-growth test.
""",
    },
    CertificationCheck.VOLUME_GROWTH: {
        "name": "Volume Growth",
        "command": "kato-check",
        "short_description": "mu(B_r(x)) <= c' r^s with s > beta implies the Kato property",
        "long_description": """
The ratio mu(B_r(x)) / r^s is maximized over the grid and radius schedule;
a bounded ratio with s > beta is sufficient for the Kato criterion.
""",
    },
    CertificationCheck.EXPERIMENT_ERROR: {
        "name": "Experiment Error",
        "command": "*",
        "short_description": "The experiment raised a numerical error or timed out",
        "long_description": """
A precondition of the numerics failed (inadmissible measure, singular
system, bracket failure, ...) or the experiment exceeded its timeout.
""",
    },
}


def get_check_description(check: CertificationCheck) -> dict[str, Any]:
    """Get the full description for a certification check."""
    return CHECK_DESCRIPTIONS.get(check, {})


def format_check_help(check: CertificationCheck) -> str:
    """Format a check's information for display."""
    desc = CHECK_DESCRIPTIONS.get(check, {})
    if not desc:
        return f"Unknown check: {check.value}"

    lines = [
        f"## {desc['name']}",
        "",
        f"**Check ID:** `{check.value}`",
        f"**Command:** `{desc['command']}`",
        "",
        desc["short_description"],
        "",
        desc["long_description"].strip(),
    ]
    return "\n".join(lines)


def format_taxonomy_overview() -> str:
    """Format the complete check catalogue for documentation."""
    lines = [
        "# traceforms - Certification Checks",
        "",
        "Every certification in a report belongs to one of these checks.",
        "",
    ]

    for check in CertificationCheck:
        lines.append(format_check_help(check))
        lines.append("")
        lines.append("---")
        lines.append("")

    return "\n".join(lines)
