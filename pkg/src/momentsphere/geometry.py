"""Rotationally invariant metrics on the 2-sphere in moment coordinates.

A metric invariant under rotation about the polar axis, normalized to
total area 4*pi, is encoded by a single profile function ``gbar`` on the
moment interval P = [-1, 1]: the metric coefficient in the moment
coordinate is ``g = 1/gbar``.  Smoothly closing metrics satisfy

    gbar(-1) = gbar(1) = 0,   gbar'(-1) = 2,   gbar'(1) = -2,

and the metric comes from a closed surface of revolution exactly when in
addition ``|gbar'| <= 2`` everywhere.  This module provides the metric
type (closed-form families or sampled tables), pointwise and integral
geometric quantities (metric coefficient, Gauss curvature, diameter),
the closure and embeddability checks, and the conversion to and from
arclength-parametrized generating curves.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import (
    ClosureError,
    DegenerateProfileError,
    DivergenceError,
    DomainError,
    EmbeddabilityError,
    NormalizationError,
    SingularityError,
)
from .quadrature import cumulative_integral, tanhsinh

__all__ = [
    "InvariantMetric",
    "ProfileCurve",
    "ClosureReport",
    "EmbeddabilityReport",
    "eval_gbar",
    "eval_g",
    "curvature",
    "diameter",
    "check_closure",
    "check_embeddable",
    "profile_from_metric",
    "metric_from_profile",
    "normalize_profile_area",
    "profile_to_csv",
    "profile_from_csv",
    "metric_to_csv",
    "metric_from_csv",
]

_EMBED_SLACK = 1e-9


def _shifted_endpoint_cubics(interp: PchipInterpolator, v_left: float, v_right: float):
    """Cubics of the first/last interpolation piece in endpoint distance.

    Returns coefficient arrays (highest power first) for evaluating the
    interpolant at ``x = x0 + delta`` and ``x = xN - delta`` without
    forming ``x`` itself, which loses all precision once ``delta`` drops
    below machine epsilon.  Constant terms are pinned to the stored node
    values (re-evaluating the polynomial there leaves rounding residue).
    """
    c = interp.c
    xk = interp.x
    left = c[:, 0].copy()
    left[-1] = v_left
    # right piece: substitute (h - delta) into the local polynomial
    h = xk[-1] - xk[-2]
    p = np.polynomial.polynomial.Polynomial(c[::-1, -1])
    shifted = p(np.polynomial.polynomial.Polynomial([h, -1.0]))
    right = shifted.coef[::-1].copy()
    right = np.concatenate([np.zeros(4 - right.size), right])
    right[-1] = v_right
    return left, right


@dataclass(frozen=True)
class ClosureReport:
    """Boundary data of a profile function against the sphere conditions."""

    gbar_at_minus1: float
    gbar_at_plus1: float
    dgbar_at_minus1: float
    dgbar_at_plus1: float
    tolerance: float
    is_smooth_closed: bool


@dataclass(frozen=True)
class EmbeddabilityReport:
    """Result of the surface-of-revolution slope test |gbar'| <= 2."""

    max_abs_dgbar: float
    argmax_x: float
    tolerance: float
    is_embeddable: bool


class InvariantMetric:
    """A rotation-invariant metric encoded by its profile on [-1, 1].

    Instances are immutable and hold either closed-form callables for
    the profile and its derivatives (analytic families) or a sampled
    table interpolated by a monotone-preserving cubic.
    """

    def __init__(self, *, label: str, params: Optional[dict] = None,
                 gbar: Callable[[np.ndarray], np.ndarray],
                 dgbar: Callable[[np.ndarray], np.ndarray],
                 d2gbar: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                 gbar_end: Optional[Callable[[int, np.ndarray], np.ndarray]] = None,
                 parity: bool, smooth_closure: bool,
                 kinks: Sequence[float] = (),
                 samples: Optional[tuple[np.ndarray, np.ndarray]] = None):
        self.label = label
        self.params = dict(params or {})
        self._gbar = gbar
        self._dgbar = dgbar
        self._d2gbar = d2gbar
        self._gbar_end = gbar_end
        self.parity = bool(parity)
        self.smooth_closure = bool(smooth_closure)
        self.kinks = tuple(float(k) for k in kinks)
        self.samples = samples

    # -- construction -------------------------------------------------

    @classmethod
    def from_samples(cls, x, gbar_values, *, label: str = "sampled",
                     params: Optional[dict] = None) -> "InvariantMetric":
        """Metric from a sampled profile table on a strictly increasing grid.

        The grid must start at -1 and end at +1 exactly; interior values
        must be strictly positive, endpoint values nonnegative.
        """
        x = np.asarray(x, dtype=float)
        v = np.asarray(gbar_values, dtype=float)
        if x.ndim != 1 or x.shape != v.shape or x.size < 4:
            raise DomainError("sampled profile needs matching 1-d arrays with >= 4 points")
        if x[0] != -1.0 or x[-1] != 1.0:
            raise DomainError("sampled profile grid must span [-1, 1] exactly")
        if not np.all(np.diff(x) > 0):
            raise DomainError("sampled profile grid must be strictly increasing")
        if np.any(v[1:-1] <= 0.0):
            raise DomainError("sampled profile must be strictly positive inside (-1, 1)")
        if v[0] < 0.0 or v[-1] < 0.0:
            raise DomainError("sampled profile endpoint values must be nonnegative")
        interp = PchipInterpolator(x, v, extrapolate=False)
        dinterp = interp.derivative()
        left_c, right_c = _shifted_endpoint_cubics(interp, float(v[0]), float(v[-1]))
        h_left = float(x[1] - x[0])
        h_right = float(x[-1] - x[-2])

        def gbar_end(side, delta):
            # endpoint-distance cubic inside the edge cell, plain
            # interpolation beyond it (where cancellation is harmless)
            delta = np.asarray(delta, dtype=float)
            if side > 0:
                coeffs, h = right_c, h_right
                far = interp(np.clip(1.0 - delta, -1.0, 1.0))
            else:
                coeffs, h = left_c, h_left
                far = interp(np.clip(-1.0 + delta, -1.0, 1.0))
            near = np.polyval(coeffs, delta)
            return np.where(delta <= h, near, far)

        def gbar_fn(xx):
            return interp(xx)

        def dgbar_fn(xx):
            return dinterp(xx)

        metric = cls(
            label=label, params=params,
            gbar=gbar_fn, dgbar=dgbar_fn, d2gbar=None, gbar_end=gbar_end,
            parity=_samples_even(interp), smooth_closure=False,
            samples=(x.copy(), v.copy()),
        )
        metric.smooth_closure = check_closure(metric).is_smooth_closed
        return metric

    # -- pointwise evaluation ------------------------------------------

    def gbar(self, x):
        """Profile value; defined on all of [-1, 1].

        Evaluation preserves the input float dtype, so extended-precision
        finite differencing of analytic families works as expected.
        """
        x = np.asarray(x)
        if not np.issubdtype(x.dtype, np.floating):
            x = x.astype(float)
        if np.any(np.abs(x) > 1.0 + 1e-14):
            raise DomainError("moment coordinate outside [-1, 1]")
        out = np.asarray(self._gbar(np.clip(x, -1.0, 1.0)))
        return out if out.ndim else float(out)

    def dgbar(self, x):
        x = np.asarray(x)
        if not np.issubdtype(x.dtype, np.floating):
            x = x.astype(float)
        if np.any(np.abs(x) > 1.0 + 1e-14):
            raise DomainError("moment coordinate outside [-1, 1]")
        out = np.asarray(self._dgbar(np.clip(x, -1.0, 1.0)))
        return out if out.ndim else float(out)

    def d2gbar(self, x):
        """Second derivative of the profile (finite differences for tables)."""
        x = np.asarray(x)
        if not np.issubdtype(x.dtype, np.floating):
            x = x.astype(float)
        if np.any(np.abs(x) > 1.0 + 1e-14):
            raise DomainError("moment coordinate outside [-1, 1]")
        if self._d2gbar is not None:
            out = np.asarray(self._d2gbar(np.clip(x, -1.0, 1.0)))
            return out if out.ndim else float(out)
        return self._d2gbar_fd(x)

    def _d2gbar_fd(self, x):
        grid_x = self.samples[0] if self.samples is not None else None
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        if grid_x is not None:
            idx = np.clip(np.searchsorted(grid_x, x_arr), 1, grid_x.size - 1)
            h = np.maximum(grid_x[idx] - grid_x[idx - 1], 1e-6)
        else:
            h = np.full(x_arr.shape, 1e-5)
        xc = np.clip(x_arr, -1.0 + h, 1.0 - h)
        val = (self._gbar(xc - h) - 2.0 * self._gbar(xc) + self._gbar(xc + h)) / h**2
        return val if np.asarray(x).ndim else float(val[0])

    def g(self, x):
        """Metric coefficient 1/gbar; singular at the poles."""
        x = np.asarray(x, dtype=float)
        if np.any(np.abs(x) > 1.0 + 1e-14):
            raise DomainError("moment coordinate outside [-1, 1]")
        if np.any(np.abs(x) >= 1.0):
            raise SingularityError("metric coefficient blows up at the poles x = +-1")
        gb = self._gbar(x)
        if np.any(np.asarray(gb) <= 0.0):
            raise DivergenceError("profile vanishes inside the interval")
        out = 1.0 / gb
        return out if out.ndim else float(out)

    def gbar_end(self, side: int, delta):
        """Profile at distance ``delta`` from the pole ``side`` (+1 or -1).

        Stable for ``delta`` far below machine epsilon; used by the
        endpoint-singular quadratures.
        """
        delta = np.asarray(delta, dtype=float)
        if self._gbar_end is not None:
            return self._gbar_end(side, delta)
        x = 1.0 - delta if side > 0 else -1.0 + delta
        return self._gbar(x)

    @property
    def is_even(self) -> bool:
        return self.parity

    def __repr__(self):
        ps = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"InvariantMetric({self.label}{', ' + ps if ps else ''})"


def _samples_even(interp) -> bool:
    probe = np.linspace(0.0, 1.0, 257)
    a = interp(probe)
    b = interp(-probe)
    scale = float(np.max(np.abs(a))) or 1.0
    return bool(np.max(np.abs(a - b)) <= 1e-8 * scale)


@dataclass(frozen=True)
class ProfileCurve:
    """Arclength-parametrized generating curve of a surface of revolution.

    ``t`` runs from 0 to the total length, ``p`` is the distance to the
    rotation axis (zero exactly at both ends) and ``q`` the height.
    """

    t: np.ndarray
    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        p = np.asarray(self.p, dtype=float)
        q = np.asarray(self.q, dtype=float)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        if not (t.shape == p.shape == q.shape) or t.ndim != 1 or t.size < 4:
            raise DegenerateProfileError("profile needs matching 1-d arrays with >= 4 points")
        if t[0] != 0.0 or not np.all(np.diff(t) > 0):
            raise DegenerateProfileError("arclength must increase strictly from 0")

    @property
    def length(self) -> float:
        return float(self.t[-1])

    def area_integral(self) -> float:
        """Integral of p dt; equals 2 for total surface area 4*pi."""
        return float(cumulative_integral(self.t, self.p)[-1])

    def validate(self, tol: float = 1e-4) -> None:
        """Check the generating-curve invariants at tolerance ``tol``."""
        p, q, t = self.p, self.q, self.t
        if abs(p[0]) > tol or abs(p[-1]) > tol:
            raise DegenerateProfileError("radius must vanish at both poles")
        if np.any(p[1:-1] <= 0.0):
            raise DegenerateProfileError("radius must be positive between the poles")
        dp = np.gradient(p, t)
        dq = np.gradient(q, t)
        speed = dp[1:-1] ** 2 + dq[1:-1] ** 2
        # isolated corner points (the flat-disc limit) are tolerated; the
        # finite-difference speed is meaningless exactly at a kink
        bad = np.mean(np.abs(speed - 1.0) > max(100 * tol, 1e-2))
        if bad > 0.005:
            raise DegenerateProfileError("curve is not parametrized by arclength")
        if abs(self.area_integral() - 2.0) > tol:
            raise NormalizationError("surface area differs from 4*pi")


# ----------------------------------------------------------------------
# pointwise operations
# ----------------------------------------------------------------------

def eval_gbar(metric: InvariantMetric, x) -> float:
    """Profile function at ``x``; zero at the poles for closed metrics."""
    return metric.gbar(x)


def eval_g(metric: InvariantMetric, x) -> float:
    """Metric coefficient at interior ``x``; raises at the poles."""
    return metric.g(x)


def curvature(metric: InvariantMetric, x):
    """Gauss curvature K = -gbar''/2.

    At a profile kink (the tent metric's equator) the curvature is a
    distributional spike, flagged by returning NaN.
    """
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.asarray(metric.d2gbar(x_arr), dtype=float) * (-0.5)
    for k in metric.kinks:
        out[x_arr == k] = math.nan
    return float(out[0]) if np.asarray(x).ndim == 0 else out


def _require_positive_interior(metric: InvariantMetric):
    probe = np.linspace(-1.0, 1.0, 4097)[1:-1]
    vals = metric.gbar(probe)
    if np.any(vals <= 0.0):
        raise DivergenceError("profile vanishes inside (-1, 1); meridian length diverges")


def diameter(metric: InvariantMetric, *, atol: float = 1e-12) -> float:
    """Pole-to-pole meridian length: integral of 1/sqrt(gbar) over [-1, 1].

    The integrand has inverse-square-root singularities at the poles;
    each half interval is handled by the double-exponential rule with the
    profile evaluated in endpoint-distance form.
    """
    _require_positive_interior(metric)

    def left_integrand(x, da, db):
        return 1.0 / np.sqrt(metric.gbar_end(-1, da))

    def right_integrand(x, da, db):
        return 1.0 / np.sqrt(metric.gbar_end(+1, db))

    left = tanhsinh(left_integrand, -1.0, 0.0, atol=atol)
    right = tanhsinh(right_integrand, 0.0, 1.0, atol=atol)
    return left.value + right.value


def check_closure(metric: InvariantMetric, tol: Optional[float] = None) -> ClosureReport:
    """Boundary values and one-sided slopes against the closure data.

    Analytic metrics are checked at 1e-6; sampled ones at 10x the
    endpoint grid spacing (one-sided second-order differences).
    """
    if metric.samples is not None:
        x, v = metric.samples
        if tol is None:
            h = max(x[1] - x[0], x[-1] - x[-2])
            tol = 10.0 * h
        g_m1, g_p1 = float(v[0]), float(v[-1])
        d_m1 = _one_sided_slope(x[0], x[1], x[2], v[0], v[1], v[2])
        d_p1 = _one_sided_slope(x[-1], x[-2], x[-3], v[-1], v[-2], v[-3])
        # endpoint values are data, not estimates: hold them to a tight
        # tolerance while the one-sided slopes get the mesh-scaled one
        val_tol = 1e-8 * max(1.0, float(np.max(v)))
    else:
        if tol is None:
            tol = 1e-6
        g_m1 = float(metric.gbar(-1.0))
        g_p1 = float(metric.gbar(1.0))
        d_m1 = float(metric.dgbar(-1.0))
        d_p1 = float(metric.dgbar(1.0))
        val_tol = tol
    ok = bool(abs(g_m1) <= val_tol and abs(g_p1) <= val_tol
              and abs(d_m1 - 2.0) <= tol and abs(d_p1 + 2.0) <= tol)
    return ClosureReport(g_m1, g_p1, d_m1, d_p1, tol, ok)


def _one_sided_slope(x0, x1, x2, y0, y1, y2) -> float:
    # derivative at x0 of the quadratic through three (possibly nonuniform) points
    h1 = x1 - x0
    h2 = x2 - x0
    return float((y1 - y0) * h2 / (h1 * (h2 - h1)) - (y2 - y0) * h1 / (h2 * (h2 - h1)))


def check_embeddable(metric: InvariantMetric) -> EmbeddabilityReport:
    """Surface-of-revolution test: max |gbar'| over a refining grid.

    The grid doubles until the maximum is stable; embeddability requires
    the slope bound together with a passing closure check.  For sampled
    metrics the slack scales with the endpoint cell width: the
    interpolant's one-sided endpoint slope is an extrapolation whose
    error is first order in that width.
    """
    closure = check_closure(metric)
    slack = _EMBED_SLACK
    if metric.samples is not None:
        xg = metric.samples[0]
        slack = max(_EMBED_SLACK, 10.0 * float(max(xg[1] - xg[0], xg[-1] - xg[-2])))
    best = -np.inf
    arg = 0.0
    prev = None
    n = 2049
    for _ in range(8):
        grid = np.linspace(-1.0, 1.0, n)
        slopes = np.abs(metric.dgbar(grid))
        i = int(np.argmax(slopes))
        best, arg = float(slopes[i]), float(grid[i])
        if prev is not None and abs(best - prev) <= 1e-12 * (1.0 + best):
            break
        prev = best
        n = 2 * (n - 1) + 1
    ok = closure.is_smooth_closed and best <= 2.0 + slack
    return EmbeddabilityReport(best, arg, slack, ok)


# ----------------------------------------------------------------------
# profile curve conversions
# ----------------------------------------------------------------------

def profile_from_metric(metric: InvariantMetric, n_samples: int = 2049) -> ProfileCurve:
    """Generating curve of the surface of revolution realizing the metric.

    Uses the radius p = sqrt(gbar), the arclength map dt/dx = 1/sqrt(gbar)
    and dq/dx = sqrt(1 - (gbar'/2)^2)/sqrt(gbar), all integrated on the
    Chebyshev-type substitution x = -cos(theta) which removes the polar
    square-root singularities.
    """
    emb = check_embeddable(metric)
    if emb.max_abs_dgbar > 2.0 + emb.tolerance:
        raise EmbeddabilityError(
            f"max |gbar'| = {emb.max_abs_dgbar:.6g} exceeds 2; no surface of revolution")
    if not check_closure(metric).is_smooth_closed:
        raise ClosureError("profile boundary data does not close the surface")
    _require_positive_interior(metric)
    if n_samples % 2 == 0:
        n_samples += 1
    theta = np.linspace(0.0, math.pi, n_samples)
    x = -np.cos(theta)
    x[0], x[-1] = -1.0, 1.0
    gb = np.asarray(metric.gbar(x), dtype=float)
    gb[0] = gb[-1] = 0.0  # closure verified above
    p = np.sqrt(np.maximum(gb, 0.0))

    sin_t = np.sin(theta)
    # dt/dtheta = sin(theta)/sqrt(gbar); regular at the poles since
    # gbar ~ 2*(1 -+ x) there
    dt_dtheta = np.empty_like(theta)
    dt_dtheta[1:-1] = sin_t[1:-1] / p[1:-1]
    dt_dtheta[0] = _pole_speed(metric, -1)
    dt_dtheta[-1] = _pole_speed(metric, +1)
    splits = _kink_split_indices(metric, x)
    t = _cumint_piecewise(theta, dt_dtheta, splits)

    slope = np.asarray(metric.dgbar(x), dtype=float) / 2.0
    rad = 1.0 - slope**2
    if np.min(rad) < -4.0 * emb.tolerance:
        raise EmbeddabilityError("slope bound violated between grid points")
    dq_dtheta = np.sqrt(np.maximum(rad, 0.0)) * dt_dtheta
    q = _cumint_piecewise(theta, dq_dtheta, splits)
    q -= 0.5 * (q[0] + q[-1])
    return ProfileCurve(t, p, q)


def _kink_split_indices(metric: InvariantMetric, x: np.ndarray):
    # integrating across a profile kink would let the parabolic panels
    # straddle it; split the cumulative integral at the nearest node
    idx = []
    for k in metric.kinks:
        i = int(np.argmin(np.abs(x - k)))
        if 2 < i < x.size - 3:
            idx.append(i)
    return sorted(set(idx))


def _cumint_piecewise(t: np.ndarray, y: np.ndarray, splits) -> np.ndarray:
    out = np.zeros_like(t)
    start = 0
    offset = 0.0
    for i in list(splits) + [t.size - 1]:
        seg = cumulative_integral(t[start:i + 1], y[start:i + 1])
        out[start:i + 1] = offset + seg
        offset = out[i]
        start = i
    return out


def _pole_speed(metric: InvariantMetric, side: int) -> float:
    # limit of sin(theta)/sqrt(gbar(-cos theta)) at the pole:
    # sqrt(2/gbar'(pole)) with the one-sided slope oriented inward
    d = 1e-9
    gb = float(metric.gbar_end(side, d))
    return math.sqrt(2.0 * d / gb) if gb > 0 else 1.0


def metric_from_profile(profile: ProfileCurve) -> InvariantMetric:
    """Sampled metric induced by a generating curve of total area 4*pi.

    The moment coordinate is x(t) = -1 + integral of p, under which the
    profile function is the squared radius.
    """
    profile.validate(tol=1e-4)
    area = profile.area_integral()
    if abs(area - 2.0) > 1e-6:
        raise NormalizationError(
            f"area integral {area:.8f} != 2; call normalize_profile_area first")
    t, p, q = profile.t, profile.p, profile.q
    if abs(area - 2.0) > 1e-8:
        s = math.sqrt(2.0 / area)
        t, p, q = s * t, s * p, s * q
    x = -1.0 + cumulative_integral(t, p)
    x[0] = -1.0
    x[-1] = 1.0
    # drop samples whose moment coordinate fails to advance (can happen
    # where the radius is at rounding level next to the poles)
    keep = np.ones(x.size, dtype=bool)
    running = np.maximum.accumulate(x)
    keep[1:] = x[1:] > running[:-1]
    keep[:-1] &= x[:-1] < 1.0
    keep[0] = keep[-1] = True
    x, pk = x[keep], p[keep]
    if not np.all(np.diff(x) > 0):
        raise DegenerateProfileError("moment coordinate map is not strictly increasing")
    vals = pk**2
    vals[0] = 0.0 if abs(vals[0]) < 1e-12 else vals[0]
    vals[-1] = 0.0 if abs(vals[-1]) < 1e-12 else vals[-1]
    return InvariantMetric.from_samples(x, vals, label="from-profile")


def normalize_profile_area(profile: ProfileCurve) -> ProfileCurve:
    """Uniform rescale of (t, p, q) making the total surface area 4*pi."""
    area = profile.area_integral()
    if not area > 1e-12:
        raise DegenerateProfileError("profile encloses no area")
    s = math.sqrt(2.0 / area)
    return ProfileCurve(s * profile.t, s * profile.p, s * profile.q)


# ----------------------------------------------------------------------
# CSV interfaces
# ----------------------------------------------------------------------

def profile_to_csv(profile: ProfileCurve, path) -> None:
    data = np.column_stack([profile.t, profile.p, profile.q])
    np.savetxt(path, data, delimiter=",", header="t,p,q", comments="", fmt="%.17g")


def profile_from_csv(path) -> ProfileCurve:
    data = _read_csv(path, 3, ("t", "p", "q"))
    return ProfileCurve(data[:, 0], data[:, 1], data[:, 2])


def metric_to_csv(metric: InvariantMetric, path, n: int = 1025) -> None:
    if metric.samples is not None:
        x, v = metric.samples
    else:
        x = np.linspace(-1.0, 1.0, n)
        v = metric.gbar(x)
    np.savetxt(path, np.column_stack([x, v]), delimiter=",",
               header="x,gbar", comments="", fmt="%.17g")


def metric_from_csv(path) -> InvariantMetric:
    data = _read_csv(path, 2, ("x", "gbar"))
    return InvariantMetric.from_samples(data[:, 0], data[:, 1], label="from-csv")


def _read_csv(path, ncols: int, names) -> np.ndarray:
    if hasattr(path, "read"):
        text = path.read()
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise DomainError("empty CSV input")
    header = [h.strip().lower() for h in lines[0].split(",")]
    if header != list(names):
        raise DomainError(f"expected CSV header {','.join(names)!r}, got {lines[0]!r}")
    data = np.loadtxt(io.StringIO("\n".join(lines[1:])), delimiter=",", ndmin=2)
    if data.shape[1] != ncols:
        raise DomainError(f"expected {ncols} columns")
    return data
