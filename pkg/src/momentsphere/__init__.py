"""Rotationally invariant metrics on the 2-sphere in moment coordinates.

The package encodes area-normalized metrics invariant under rotation
about the polar axis by a single profile function on [-1, 1], and
computes their invariant and Fourier-mode Laplace spectra, diameters,
curvature, embeddability as surfaces of revolution, and the sharp
eigenvalue bounds attached to the named families.
"""

from .backend import BACKEND, available_backends
from .eigen import (
    Discretization,
    Mesh,
    SpectrumResult,
    assemble,
    full_spectrum,
    invariant_spectrum,
    make_mesh,
    mode_spectrum,
    parity_spectrum,
    rayleigh_quotient,
    solve_pencil,
)
from .families import (
    AFunctionalReport,
    BoundReport,
    FamilyKind,
    a_functional,
    bound_lambda1_mu,
    bound_lambda1_nu,
    bound_lambda1_rho,
    ellipsoid_metric,
    example_large_metric,
    example_small_metric,
    make_family,
    mu_metric,
    nu_metric,
    parse_family,
    random_embeddable,
    rho_metric,
    standard_metric,
    tent_metric,
)
from .geometry import (
    ClosureReport,
    EmbeddabilityReport,
    InvariantMetric,
    ProfileCurve,
    check_closure,
    check_embeddable,
    curvature,
    diameter,
    eval_g,
    eval_gbar,
    metric_from_csv,
    metric_from_profile,
    metric_to_csv,
    normalize_profile_area,
    profile_from_csv,
    profile_from_metric,
    profile_to_csv,
)
from .hardy import (
    EPS_SCHEDULE,
    HardyReport,
    feps_quotient,
    hardy_F,
    hardy_check_full,
    hardy_constant_numeric,
    hardy_m,
    hardy_report,
)
from .oracles import (
    AppendixSolution,
    BesselZero,
    appendix_solution,
    bessel_j0,
    bessel_j0_prime,
    bessel_j0_series,
    bessel_zero,
    el_residual,
    legendre_deriv,
    legendre_eval,
    tent_spectrum,
)

__version__ = "0.1.0"
