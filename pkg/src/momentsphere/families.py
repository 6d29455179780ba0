"""Named metric families and their closed-form eigenvalue bounds.

Each family is given by an explicit profile function (or its reciprocal,
the metric coefficient) together with exact first and second
derivatives, so curvature, closure and embeddability of family members
carry no interpolation error.  The module also provides the
Poincare-type bracket from the averaged-coefficient functional

    A = sup_{x in (0,1)} (1-x) * integral_0^x g(t) dt,

which pins the first eigenvalue of an equator-symmetric metric between
1/(2A) and 1/A, and a seeded generator of random embeddable metrics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
import numpy as np

from .errors import DivergenceError, DomainError, ParityError
from .geometry import InvariantMetric, check_embeddable, metric_from_profile, \
    normalize_profile_area, ProfileCurve
from .quadrature import cumulative_integral, tanhsinh

__all__ = [
    "FamilyKind",
    "BoundReport",
    "AFunctionalReport",
    "make_family",
    "parse_family",
    "standard_metric",
    "mu_metric",
    "rho_metric",
    "nu_metric",
    "tent_metric",
    "ellipsoid_metric",
    "example_small_metric",
    "example_large_metric",
    "bound_lambda1_mu",
    "bound_lambda1_rho",
    "bound_lambda1_nu",
    "a_functional",
    "random_embeddable",
]


class FamilyKind(Enum):
    STANDARD = "standard"
    MU = "mu"
    RHO = "rho"
    NU = "nu"
    TENT = "tent"
    ELLIPSOID = "ellipsoid"
    EXAMPLE_SMALL = "ex-small"
    EXAMPLE_LARGE = "ex-large"


@dataclass(frozen=True)
class BoundReport:
    """Closed-form bound on the first invariant eigenvalue of a family."""

    kind: FamilyKind
    parameter: float
    value: float
    direction: str  # "lower" or "upper"
    formula: str


@dataclass(frozen=True)
class AFunctionalReport:
    """Value and bracket from A = sup (1-x) * integral_0^x g."""

    A: float
    argmax_x: float
    lower: float   # 1/(2A) <= lambda_1
    upper: float   # lambda_1 <= 1/A

    def __post_init__(self):
        if not (0.0 < self.lower <= self.upper):
            raise DivergenceError("invalid eigenvalue bracket")


# ----------------------------------------------------------------------
# family constructors
# ----------------------------------------------------------------------

def standard_metric() -> InvariantMetric:
    """Round sphere: gbar = 1 - x**2."""
    return InvariantMetric(
        label="standard", params={},
        gbar=lambda x: 1.0 - x * x,
        dgbar=lambda x: -2.0 * x,
        d2gbar=lambda x: np.full_like(np.asarray(x, dtype=float), -2.0),
        gbar_end=lambda side, d: d * (2.0 - d),
        parity=True, smooth_closure=True,
    )


def mu_metric(mu: float) -> InvariantMetric:
    """gbar = (1-x^2)(1 + mu(1-x^2)); eigenvalues grow with mu."""
    if not mu > 0:
        raise DomainError("mu must be positive")

    def gbar(x):
        s = 1.0 - x * x
        return s * (1.0 + mu * s)

    return InvariantMetric(
        label="mu", params={"mu": mu},
        gbar=gbar,
        dgbar=lambda x: -2.0 * x * (1.0 + 2.0 * mu * (1.0 - x * x)),
        d2gbar=lambda x: -2.0 + mu * (12.0 * x * x - 4.0),
        gbar_end=lambda side, d: d * (2.0 - d) * (1.0 + mu * d * (2.0 - d)),
        parity=True, smooth_closure=True,
    )


def rho_metric(rho: float) -> InvariantMetric:
    """gbar = (1-x^2)(1 + rho(1-x^2)^2); keeps polar curvature equal to 1."""
    if rho < 0:
        raise DomainError("rho must be nonnegative")

    def gbar(x):
        s = 1.0 - x * x
        return s * (1.0 + rho * s * s)

    def d2gbar(x):
        s = 1.0 - x * x
        return -2.0 + rho * s * (30.0 * x * x - 6.0)

    return InvariantMetric(
        label="rho", params={"rho": rho},
        gbar=gbar,
        dgbar=lambda x: -2.0 * x * (1.0 + 3.0 * rho * (1.0 - x * x) ** 2),
        d2gbar=d2gbar,
        gbar_end=lambda side, d: d * (2.0 - d) * (1.0 + rho * (d * (2.0 - d)) ** 2),
        parity=True, smooth_closure=True,
    )


def nu_metric(nu: float) -> InvariantMetric:
    """g = 1/(1-x^2) + nu; eigenvalues collapse like 1/nu."""
    if not nu > 0:
        raise DomainError("nu must be positive")

    def gbar(x):
        s = 1.0 - x * x
        return s / (1.0 + nu * s)

    def dgbar(x):
        s = 1.0 - x * x
        return -2.0 * x / (1.0 + nu * s) ** 2

    def d2gbar(x):
        s = 1.0 - x * x
        c = 1.0 + nu * s
        return -2.0 / c**2 - 8.0 * nu * x * x / c**3

    return InvariantMetric(
        label="nu", params={"nu": nu},
        gbar=gbar, dgbar=dgbar, d2gbar=d2gbar,
        gbar_end=lambda side, d: d * (2.0 - d) / (1.0 + nu * d * (2.0 - d)),
        parity=True, smooth_closure=True,
    )


def tent_metric() -> InvariantMetric:
    """Flat-disc limit profile gbar = 2(1 - |x|), kinked at the equator."""

    def d2gbar(x):
        x = np.asarray(x, dtype=float)
        return np.zeros_like(x)

    return InvariantMetric(
        label="tent", params={},
        gbar=lambda x: 2.0 * (1.0 - np.abs(x)),
        dgbar=lambda x: -2.0 * np.sign(x) + 0.0,
        d2gbar=d2gbar,
        gbar_end=lambda side, d: np.minimum(2.0 * np.asarray(d, dtype=float),
                                            2.0 * (2.0 - np.asarray(d, dtype=float))),
        parity=True, smooth_closure=True,
        kinks=(0.0,),
    )


def ellipsoid_metric(aspect: float, n_samples: int = 4096) -> InvariantMetric:
    """Ellipsoid of revolution with polar/equatorial axis ratio ``aspect``.

    The generating half-ellipse is sampled at uniform arclength and area-
    normalized before conversion, so the result is a sampled metric.
    Aspect < 1 squeezes the poles together; the profile then lies between
    the round sphere's and the flat-disc tent.
    """
    if not aspect > 0:
        raise DomainError("aspect ratio must be positive")
    profile = _ellipsoid_profile(aspect, n_samples)
    metric = metric_from_profile(profile)
    metric.label = "ellipsoid"
    metric.params = {"aspect": aspect}
    return metric


def _ellipsoid_profile(aspect: float, n_samples: int) -> ProfileCurve:
    # meridian (p, q) = (sin u, -aspect*cos u) resampled at uniform arclength
    u_fine = np.linspace(0.0, math.pi, 16 * n_samples + 1)
    speed = np.sqrt(np.cos(u_fine) ** 2 + (aspect * np.sin(u_fine)) ** 2)
    s_fine = cumulative_integral(u_fine, speed)
    s_grid = np.linspace(0.0, s_fine[-1], n_samples)
    u = np.interp(s_grid, s_fine, u_fine)
    u[0], u[-1] = 0.0, math.pi
    p = np.sin(u)
    p[0], p[-1] = 0.0, 0.0
    q = -aspect * np.cos(u)
    return normalize_profile_area(ProfileCurve(s_grid, p, q))


def example_small_metric(mu: float, alpha: float) -> InvariantMetric:
    """Family with both the diameter and the first eigenvalue small.

    The metric coefficient adds a bump mu^{1-alpha}/(1+mu x^2)^2 on top
    of the large-eigenvalue family; alpha in (0, 1/2).
    """
    if not mu > 0:
        raise DomainError("mu must be positive")
    if not 0.0 < alpha < 0.5:
        raise DomainError("alpha must lie in (0, 1/2)")
    amp = mu ** (1.0 - alpha)

    def bump(x):
        return amp / (1.0 + mu * x * x) ** 2

    def dbump(x):
        return -4.0 * amp * mu * x / (1.0 + mu * x * x) ** 3

    def d2bump(x):
        v = 1.0 + mu * x * x
        return amp * (24.0 * mu**2 * x * x / v**4 - 4.0 * mu / v**3)

    return _metric_from_g_plus_bump("ex-small", {"mu": mu, "alpha": alpha},
                                    mu, bump, dbump, d2bump)


def example_large_metric(mu: float) -> InvariantMetric:
    """Family with both the diameter and the first eigenvalue large.

    Adds (1/log mu) / ((1+1/mu)^2 - x^2)^2 to the metric coefficient of
    the large-eigenvalue family; requires mu > 1.
    """
    if not mu > 1:
        raise DomainError("mu must exceed 1")
    amp = 1.0 / math.log(mu)
    b = (1.0 + 1.0 / mu) ** 2

    def bump(x):
        return amp / (b - x * x) ** 2

    def dbump(x):
        return 4.0 * amp * x / (b - x * x) ** 3

    def d2bump(x):
        w = b - x * x
        return amp * (24.0 * x * x / w**4 + 4.0 / w**3)

    return _metric_from_g_plus_bump("ex-large", {"mu": mu}, mu, bump, dbump, d2bump)


def _metric_from_g_plus_bump(label, params, mu, bump, dbump, d2bump) -> InvariantMetric:
    """Metric whose coefficient is g = 1/(s(1+mu*s)) + bump(x), s = 1-x^2.

    The profile is the algebraic rearrangement gbar = u/(1 + u*bump) with
    u = s(1+mu*s), which stays finite at the poles where g blows up.
    """

    def u_of(x):
        s = 1.0 - x * x
        return s * (1.0 + mu * s)

    def du_of(x):
        return -2.0 * x * (1.0 + 2.0 * mu * (1.0 - x * x))

    def d2u_of(x):
        return -2.0 + mu * (12.0 * x * x - 4.0)

    def gbar(x):
        u = u_of(x)
        return u / (1.0 + u * bump(x))

    def dgbar(x):
        u, du = u_of(x), du_of(x)
        c = 1.0 + u * bump(x)
        return (du - u * u * dbump(x)) / c**2

    def d2gbar(x):
        u, du, d2u = u_of(x), du_of(x), d2u_of(x)
        bv, db, d2b = bump(x), dbump(x), d2bump(x)
        c = 1.0 + u * bv
        dc = du * bv + u * db
        num = d2u - 2.0 * u * du * db - u * u * d2b
        return (num * c - 2.0 * dc * (du - u * u * db)) / c**3

    def gbar_end(side, d):
        d = np.asarray(d, dtype=float)
        x = side * (1.0 - d)
        s = d * (2.0 - d)
        u = s * (1.0 + mu * s)
        return u / (1.0 + u * bump(x))

    return InvariantMetric(
        label=label, params=params,
        gbar=gbar, dgbar=dgbar, d2gbar=d2gbar, gbar_end=gbar_end,
        parity=True, smooth_closure=True,
    )


def make_family(kind, *params) -> InvariantMetric:
    """Construct a family member from a kind tag and its parameters."""
    kind = FamilyKind(kind) if not isinstance(kind, FamilyKind) else kind
    try:
        if kind is FamilyKind.STANDARD:
            return standard_metric()
        if kind is FamilyKind.MU:
            return mu_metric(*params)
        if kind is FamilyKind.RHO:
            return rho_metric(*params)
        if kind is FamilyKind.NU:
            return nu_metric(*params)
        if kind is FamilyKind.TENT:
            return tent_metric()
        if kind is FamilyKind.ELLIPSOID:
            return ellipsoid_metric(*params)
        if kind is FamilyKind.EXAMPLE_SMALL:
            return example_small_metric(*params)
        if kind is FamilyKind.EXAMPLE_LARGE:
            return example_large_metric(*params)
    except TypeError as exc:
        raise DomainError(f"wrong parameter count for family {kind.value!r}") from exc
    raise DomainError(f"unknown family kind {kind!r}")


def parse_family(spec: str) -> InvariantMetric:
    """Parse a command-line family spec.

    Grammar: ``standard | mu:<v> | rho:<v> | nu:<v> | tent |
    ellipsoid:<aspect> | ex-small:<mu>,<alpha> | ex-large:<mu>``.
    """
    name, _, rest = spec.strip().partition(":")
    try:
        kind = FamilyKind(name)
    except ValueError:
        raise DomainError(f"unknown family {name!r}") from None
    if not rest:
        return make_family(kind)
    try:
        params = tuple(float(tok) for tok in rest.split(","))
    except ValueError:
        raise DomainError(f"bad parameters in family spec {spec!r}") from None
    return make_family(kind, *params)


# ----------------------------------------------------------------------
# closed-form bounds
# ----------------------------------------------------------------------

def bound_lambda1_mu(mu: float) -> BoundReport:
    """lambda_1 >= mu + 2 for the large-eigenvalue family."""
    if mu < 0:
        raise DomainError("mu must be nonnegative")
    return BoundReport(FamilyKind.MU, mu, mu + 2.0, "lower", "mu + 2")


def bound_lambda1_rho(rho: float) -> BoundReport:
    """lambda_1 >= sqrt(4 + 2 rho) for the fixed-polar-curvature family."""
    if rho < 0:
        raise DomainError("rho must be nonnegative")
    return BoundReport(FamilyKind.RHO, rho, math.sqrt(4.0 + 2.0 * rho),
                       "lower", "sqrt(4 + 2 rho)")


def bound_lambda1_nu(nu: float) -> BoundReport:
    """lambda_1 < pi^2/(4 nu) for the small-eigenvalue family."""
    if not nu > 0:
        raise DomainError("nu must be positive")
    return BoundReport(FamilyKind.NU, nu, math.pi**2 / (4.0 * nu),
                       "upper", "pi^2 / (4 nu)")


# ----------------------------------------------------------------------
# A-functional bracket
# ----------------------------------------------------------------------

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def a_functional(metric: InvariantMetric, *, grid_points: int = 96,
                 geometric_levels: int = 40) -> AFunctionalReport:
    """Bracket the first eigenvalue of an even metric.

    Evaluates Phi(x) = (1-x) * integral_0^x g on a grid accumulating
    geometrically toward x = 1 (the integral diverges there only
    logarithmically, so Phi stays bounded), then sharpens the maximum by
    golden-section search.  Requires an even metric, for which the first
    eigenfunction is odd and the bracket [1/(2A), 1/A] applies.
    """
    if not metric.is_even:
        raise ParityError("A-functional bracket requires an even metric")

    def seg_integral(lo: float, hi: float) -> float:
        # g evaluated through the distance to the pole at +1: the
        # distance to the segment's right edge plus the remaining gap
        gap = 1.0 - hi

        def g_fn(x, da, db):
            return 1.0 / metric.gbar_end(+1, gap + db)

        return tanhsinh(g_fn, lo, hi, atol=1e-13, rtol=1e-12).value

    uniform = np.linspace(0.0, 0.9, grid_points, endpoint=False)[1:]
    geo = 1.0 - 0.1 * 0.5 ** np.arange(geometric_levels)
    grid = np.concatenate([uniform, geo])
    prefix = np.zeros(grid.size)
    acc = 0.0
    lo = 0.0
    for i, x in enumerate(grid):
        acc += seg_integral(lo, float(x))
        prefix[i] = acc
        lo = float(x)
    phi = (1.0 - grid) * prefix
    if not np.all(np.isfinite(phi)):
        raise DivergenceError("averaged-coefficient functional is unbounded")
    i = int(np.argmax(phi))

    def phi_at(x: float) -> float:
        j = int(np.searchsorted(grid, x)) - 1
        base, x0 = (prefix[j], float(grid[j])) if j >= 0 else (0.0, 0.0)
        return (1.0 - x) * (base + seg_integral(x0, x))

    a_lo = float(grid[i - 1]) if i > 0 else 0.0
    a_hi = float(grid[i + 1]) if i + 1 < grid.size else 1.0 - 1e-14
    best_x, best_phi = _golden_max(phi_at, a_lo, a_hi)
    if best_phi < phi[i]:
        best_x, best_phi = float(grid[i]), float(phi[i])
    return AFunctionalReport(best_phi, best_x, 1.0 / (2.0 * best_phi), 1.0 / best_phi)


def _golden_max(f, a: float, b: float, iters: int = 80):
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if b - a < 1e-12:
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
    xm = 0.5 * (a + b)
    return xm, f(xm)


# ----------------------------------------------------------------------
# random embeddable metrics
# ----------------------------------------------------------------------

def random_embeddable(seed: int, *, max_attempts: int = 64) -> InvariantMetric:
    """Deterministic random metric of a closed surface of revolution.

    Perturbs the round profile with the bump basis (1-x^2)^2 x^k,
    k = 0..4, whose members vanish to second order at the poles, and
    rejection-samples on positivity and the slope bound.  Falls back to
    the round sphere if no draw is accepted.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    for _ in range(max_attempts):
        coeffs = rng.uniform(-0.3, 0.3, size=5)
        metric = _bump_metric(coeffs)
        probe = np.linspace(-1.0, 1.0, 2001)[1:-1]
        if np.min(metric.gbar(probe)) <= 0.0:
            continue
        if check_embeddable(metric).is_embeddable:
            return metric
    return standard_metric()


def _bump_metric(coeffs) -> InvariantMetric:
    poly = np.polynomial.Polynomial(np.asarray(coeffs, dtype=float))
    dpoly = poly.deriv()
    d2poly = dpoly.deriv()
    even = bool(np.all(np.asarray(coeffs[1::2]) == 0.0))

    def gbar(x):
        s = 1.0 - x * x
        return s + s * s * poly(x)

    def dgbar(x):
        s = 1.0 - x * x
        return -2.0 * x - 4.0 * x * s * poly(x) + s * s * dpoly(x)

    def d2gbar(x):
        s = 1.0 - x * x
        return (-2.0 + (12.0 * x * x - 4.0) * poly(x)
                - 8.0 * x * s * dpoly(x) + s * s * d2poly(x))

    def gbar_end(side, d):
        d = np.asarray(d, dtype=float)
        s = d * (2.0 - d)
        return s + s * s * poly(side * (1.0 - d))

    return InvariantMetric(
        label="random-bump", params={f"c{k}": float(c) for k, c in enumerate(coeffs)},
        gbar=gbar, dgbar=dgbar, d2gbar=d2gbar, gbar_end=gbar_end,
        parity=even, smooth_closure=True,
    )
