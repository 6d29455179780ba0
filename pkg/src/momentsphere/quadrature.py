"""Numerical integration utilities.

Two rules are used throughout the package:

* fixed-order Gauss-Legendre panels for smooth integrands (element
  integrals of the finite-element assembly), and
* a double-exponential (tanh-sinh) rule with level doubling for
  integrals whose integrand has an inverse-square-root or similar
  integrable singularity at one or both endpoints.

The tanh-sinh nodes are generated together with their distances to both
endpoints.  Integrands receive ``(x, dist_left, dist_right)`` so that
quantities like ``1/sqrt(1 - x)`` can be evaluated from the distance
directly, without the catastrophic cancellation of forming ``1 - x``
when ``x`` has rounded to the endpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DivergenceError

# Cutoff in the double-exponential variable: at t = 4 the endpoint
# distance is ~6e-38 and the weight ~1e-37, far below double precision
# relevance for any integrable singularity handled here.
_T_MAX = 4.0
_H0 = 0.5
_MAX_NODES = 2**20


@lru_cache(maxsize=64)
def _level_nodes(level: int):
    """Unit-interval tanh-sinh nodes introduced at refinement ``level``.

    Returns ``(u, v, w)`` where ``u`` is the distance to 0, ``v`` the
    distance to 1 (u + v = 1 analytically) and ``w`` the weight already
    scaled by the step of that level.
    """
    h = _H0 / 2**level
    if level == 0:
        k = np.arange(-int(_T_MAX / h), int(_T_MAX / h) + 1)
        t = k * h
    else:
        kmax = int(_T_MAX / h)
        k = np.arange(-kmax, kmax + 1)
        t = k[k % 2 != 0] * h  # only nodes new at this level
    tau = 0.5 * math.pi * np.sinh(t)
    u = 1.0 / (1.0 + np.exp(-2.0 * tau))
    v = 1.0 / (1.0 + np.exp(2.0 * tau))
    w = h * math.pi * np.cosh(t) * u * v
    return u, v, w


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    levels: int
    nodes: int


def tanhsinh(f, a: float, b: float, *, atol: float = 1e-10, rtol: float = 1e-12,
             max_level: int = 14) -> QuadResult:
    """Integrate ``f(x, dist_a, dist_b)`` over (a, b).

    Level doubling stops when successive values differ by less than
    ``atol + rtol*|I|`` or the node budget (2**20) is exhausted.  The
    integrand may be unbounded at the endpoints as long as the integral
    converges; it is never evaluated at the endpoints themselves.
    """
    if not b > a:
        if b == a:
            return QuadResult(0.0, 0.0, 0, 0)
        raise ValueError("tanhsinh requires a < b")
    span = b - a
    total = 0.0
    nodes = 0
    prev = None
    value = math.nan
    for level in range(max_level + 1):
        u, v, w = _level_nodes(level)
        x = np.where(u <= 0.5, a + span * u, b - span * v)
        fx = np.asarray(f(x, span * u, span * v), dtype=float)
        contrib = float(np.sum(w * fx))
        if not math.isfinite(contrib):
            raise DivergenceError("non-finite integrand contribution in tanh-sinh rule")
        total = total / 2.0 + contrib if level > 0 else contrib
        value = span * total
        nodes += x.size
        if prev is not None:
            err = abs(value - prev)
            if err <= atol + rtol * abs(value) or nodes >= _MAX_NODES:
                return QuadResult(value, err, level, nodes)
        prev = value
    return QuadResult(value, abs(value - prev), max_level, nodes)


def integrate(f, a: float, b: float, **kwargs) -> float:
    """tanh-sinh integral of a plain ``f(x)`` over (a, b)."""
    return tanhsinh(lambda x, da, db: f(x), a, b, **kwargs).value


@lru_cache(maxsize=8)
def gauss_rule(order: int = 8):
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    return np.polynomial.legendre.leggauss(order)


def gauss_panels(f, edges: np.ndarray, order: int = 8) -> np.ndarray:
    """Per-panel Gauss integrals of ``f`` between consecutive ``edges``.

    Returns one value per panel; used for element integrals where the
    integrand is smooth inside each panel.
    """
    xg, wg = gauss_rule(order)
    left = edges[:-1]
    h = np.diff(edges)
    x = left[:, None] + 0.5 * h[:, None] * (xg[None, :] + 1.0)
    vals = f(x)
    return 0.5 * h * np.sum(wg[None, :] * vals, axis=1)


def _parabola_steps(t0, t1, t2, y0, y1, y2, lo, hi):
    """Integrals over [lo, hi] of the parabolas through three samples."""

    def antider(s):
        a0 = (s**3 / 3 - (t1 + t2) * s**2 / 2 + t1 * t2 * s) / ((t0 - t1) * (t0 - t2))
        a1 = (s**3 / 3 - (t0 + t2) * s**2 / 2 + t0 * t2 * s) / ((t1 - t0) * (t1 - t2))
        a2 = (s**3 / 3 - (t0 + t1) * s**2 / 2 + t0 * t1 * s) / ((t2 - t0) * (t2 - t1))
        return y0 * a0 + y1 * a1 + y2 * a2

    return antider(hi) - antider(lo)


def cumulative_integral(t: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Cumulative integral of sampled data by local parabolic panels.

    Fits the quadratic through three neighbouring samples and integrates
    it over each step, which is exact for quadratics on nonuniform grids
    and one order better than the trapezoid rule.  Interior steps average
    the two overlapping parabolas; endpoint steps use the only one.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    n = t.size
    if n < 3:
        out = np.zeros(n)
        if n == 2:
            out[1] = 0.5 * (y[0] + y[1]) * (t[1] - t[0])
        return out
    # work in coordinates local to each triple's middle node, otherwise
    # the cubic antiderivative terms cancel catastrophically
    d0 = t[:-2] - t[1:-1]
    d2 = t[2:] - t[1:-1]
    zero = np.zeros_like(d0)
    # parabola through (i, i+1, i+2) integrated over [t_i, t_{i+1}] ...
    fwd = _parabola_steps(d0, zero, d2, y[:-2], y[1:-1], y[2:], d0, zero)
    # ... and over [t_{i+1}, t_{i+2}]
    bwd = _parabola_steps(d0, zero, d2, y[:-2], y[1:-1], y[2:], zero, d2)
    steps = np.empty(n - 1)
    steps[0] = fwd[0]
    steps[-1] = bwd[-1]
    steps[1:-1] = 0.5 * (fwd[1:] + bwd[:-1])
    out = np.zeros(n)
    out[1:] = np.cumsum(steps)
    return out
