"""Weighted Poincare/Hardy inequalities on the moment interval.

The inequality

    integral_0^1 (1-x^2)^{2p} f'(x)^2 dx  >=  C(p) integral_0^1 f(x)^2 dx

over functions with f(0) = 0 underpins the divergence of the first
invariant eigenvalue along the stretched families.  This module
evaluates the comparison function whose infimum bounds the optimal
constant from below; the trial-function quotient whose limit shows the
bound C(1) = 1 is attained only asymptotically; a discrete minimum
quotient (an upper bound on the optimal constant); and the zero-average
version of the inequality on the full interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigen import Discretization, Mesh, make_mesh, solve_pencil
from .errors import ConsistencyError, DomainError
from .quadrature import gauss_rule, tanhsinh

__all__ = [
    "HardyReport",
    "hardy_F",
    "hardy_m",
    "feps_quotient",
    "hardy_constant_numeric",
    "hardy_check_full",
    "EPS_SCHEDULE",
]

EPS_SCHEDULE = tuple(10.0 ** (-k) for k in range(7))


@dataclass(frozen=True)
class HardyReport:
    """Lower and upper information on the optimal constant at one exponent."""

    p: float
    m: float
    numeric_c_upper: float
    numeric_error: float
    eps_trace: tuple

    def to_dict(self) -> dict:
        return {"p": self.p, "m": self.m,
                "numeric_C_upper": self.numeric_c_upper,
                "numeric_error": self.numeric_error,
                "eps_trace": [{"eps": e, "quotient": q} for e, q in self.eps_trace]}


def _atanh(y: float) -> float:
    y = min(y, 1.0 - 1e-15)
    return 0.5 * math.log((1.0 + y) / (1.0 - y))


def hardy_F(p: float, x) -> float:
    """Comparison function F(x) = 2 + ((1-x^2)/x^2) (1 - (1-x^2)^{1-2p}).

    Its infimum over (0, 1) bounds the optimal constant from below.  The
    singularity at x = 0 is removable; small arguments switch to a
    four-term expansion in x^2 to avoid the cancellation.
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError("exponent p must lie in [0, 1]")
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any((x_arr <= 0.0) | (x_arr >= 1.0)):
        raise DomainError("F is defined on the open interval (0, 1)")
    q = 1.0 - 2.0 * p
    out = np.empty_like(x_arr)
    small = np.abs(x_arr) < 1e-4
    xs = x_arr[~small]
    s = 1.0 - xs * xs
    out[~small] = 2.0 + (s / (xs * xs)) * (1.0 - s**q)
    if np.any(small):
        t = x_arr[small] ** 2
        # (1-t)/t * (1 - (1-t)^q) = q(1-t)(1 - (q-1)/2 t + (q-1)(q-2)/6 t^2
        #                                  - (q-1)(q-2)(q-3)/24 t^3 + ...)
        series = (1.0 - (q - 1.0) / 2.0 * t
                  + (q - 1.0) * (q - 2.0) / 6.0 * t**2
                  - (q - 1.0) * (q - 2.0) * (q - 3.0) / 24.0 * t**3)
        out[small] = 2.0 + q * (1.0 - t) * series
    return float(out[0]) if np.asarray(x).ndim == 0 else out


def hardy_m(p: float) -> float:
    """Infimum of the comparison function over (0, 1).

    Exact values 2 at p = 1/2 and 1 at p = 1; elsewhere a dense scan of
    grid and endpoint limits refined by golden-section search.
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError("exponent p must lie in [0, 1]")
    if p == 0.5:
        return 2.0
    if p == 1.0:
        return 1.0
    grid = np.linspace(1e-6, 1.0 - 1e-12, 4001)
    vals = hardy_F(p, grid)
    i = int(np.argmin(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]
    gold = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = float(lo), float(hi)
    x1 = b - gold * (b - a)
    x2 = a + gold * (b - a)
    f1, f2 = hardy_F(p, x1), hardy_F(p, x2)
    for _ in range(80):
        if b - a < 1e-13:
            break
        if f1 > f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + gold * (b - a)
            f2 = hardy_F(p, x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - gold * (b - a)
            f1 = hardy_F(p, x1)
    interior = hardy_F(p, 0.5 * (a + b))
    # endpoint limits: 3 - 2p at x -> 0, 2 at x -> 1 (p < 1)
    return min(float(interior), float(vals[0]), float(vals[-1]), 3.0 - 2.0 * p, 2.0)


def feps_quotient(eps: float, *, check: bool = True) -> float:
    """Rayleigh quotient of the trial function x/sqrt(1+eps-x^2) at p = 1.

    Closed forms (numerator obtained by integrating the trial function's
    derivative exactly):

        num = (8+8e+3e^2)/(8 sqrt(1+e)) atanh(1/sqrt(1+e)) - 3/4 - 3e/8
        den = -1 + sqrt(1+e) atanh(1/sqrt(1+e))

    With ``check`` the closed forms are re-derived by direct quadrature
    and must agree to 1e-8 relative.  The quotient decreases to 1 as
    eps -> 0, showing the constant 1 is optimal but unattained.
    """
    if not eps > 0:
        raise DomainError("eps must be positive")
    a = 1.0 + eps
    t = _atanh(1.0 / math.sqrt(a))
    num = (8.0 + 8.0 * eps + 3.0 * eps * eps) / (8.0 * math.sqrt(a)) * t \
        - 0.75 - 0.375 * eps
    den = -1.0 + math.sqrt(a) * t
    if check:
        def num_f(x, da, db):
            s = 1.0 - x * x
            return s * s * (a / (a - x * x) ** 1.5) ** 2

        def den_f(x, da, db):
            return x * x / (a - x * x)

        num_q = tanhsinh(num_f, 0.0, 1.0, atol=1e-14, rtol=1e-12).value
        den_q = tanhsinh(den_f, 0.0, 1.0, atol=1e-14, rtol=1e-12).value
        if abs(num_q - num) > 1e-8 * abs(num) or abs(den_q - den) > 1e-8 * abs(den):
            raise ConsistencyError(
                f"closed form vs quadrature mismatch at eps={eps!r}: "
                f"num {num!r} vs {num_q!r}, den {den!r} vs {den_q!r}")
    return num / den


def _half_interval_weight_elements(p: float, mesh: Mesh) -> np.ndarray:
    """Element integrals of (1-x^2)^{2p} on a mesh ending at x = 1."""
    nodes = mesh.nodes
    h = np.diff(nodes)
    xg, wg = gauss_rule(8)
    pts = nodes[:-1, None] + 0.5 * h[:, None] * (xg[None, :] + 1.0)
    vals = (1.0 - pts * pts) ** (2.0 * p)
    out = 0.5 * h * np.sum(wg[None, :] * vals, axis=1)

    def f_last(x, da, db):
        # weight in terms of the distance to 1: (db (2-db))^{2p}
        return (db * (2.0 - db)) ** (2.0 * p)

    out[-1] = tanhsinh(f_last, float(nodes[-2]), 1.0, atol=1e-15, rtol=1e-11).value
    return out


def hardy_constant_numeric(p: float, n: int = 4096) -> float:
    """Discrete minimum of the weighted quotient with f(0) = 0.

    Linear elements on [0, 1], graded into x = 1; the minimum over the
    discrete space is an upper bound on the optimal constant, biased
    high by the mesh's inability to resolve the asymptotic minimizers.
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError("exponent p must lie in [0, 1]")
    if n < 256:
        raise DomainError("need n >= 256 elements")
    mesh = make_mesh(n, "graded", (0.0, 1.0))
    we = _half_interval_weight_elements(p, mesh)
    h = mesh.spacings
    n_nodes = mesh.nodes.size
    a_diag = np.zeros(n_nodes)
    a_off = -we / h**2
    a_diag[:-1] += we / h**2
    a_diag[1:] += we / h**2
    b_diag = np.zeros(n_nodes)
    b_diag[:-1] += h / 3.0
    b_diag[1:] += h / 3.0
    b_off = h / 6.0
    disc = Discretization(0, mesh, a_diag[1:].copy(), a_off[1:].copy(),
                          b_diag[1:].copy(), b_off[1:].copy(), True, False)
    res = solve_pencil(disc, 1, want_vectors=False)
    return float(res.eigenvalues[0])


def hardy_report(p: float, n: int = 4096) -> HardyReport:
    """Bundle the analytic lower bound, discrete upper bound and eps trace."""
    c_n = hardy_constant_numeric(p, n)
    c_2n = hardy_constant_numeric(p, 2 * n)
    trace = tuple((eps, feps_quotient(eps, check=False)) for eps in EPS_SCHEDULE) \
        if p == 1.0 else ()
    return HardyReport(p, hardy_m(p), c_2n, abs(c_n - c_2n), trace)


def hardy_check_full(p: float, trials) -> list[dict]:
    """Zero-average inequality on [-1, 1] for a set of trial functions.

    Each trial is a numpy Polynomial (integrated exactly when 2p is an
    integer) or a pair of callables (f, f').  Returns one record per
    trial with the two integrals and their ratio; the inequality holds
    when ratio >= C(p) = hardy_m(p).
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError("exponent p must lie in [0, 1]")
    two_p = 2.0 * p
    exact = float(two_p).is_integer()
    m_p = hardy_m(p)
    records = []
    for trial in trials:
        if isinstance(trial, np.polynomial.Polynomial):
            mean = trial.integ()(1.0) - trial.integ()(-1.0)
            f = trial - mean / 2.0
            df = f.deriv()
            if exact:
                weight = np.polynomial.Polynomial([1.0, 0.0, -1.0]) ** int(two_p)
                lhs_poly = (weight * df * df).integ()
                lhs = float(lhs_poly(1.0) - lhs_poly(-1.0))
                rhs_poly = (f * f).integ()
                rhs = float(rhs_poly(1.0) - rhs_poly(-1.0))
            else:
                lhs = tanhsinh(lambda x, da, db: (1 - x * x) ** two_p * df(x) ** 2,
                               -1.0, 1.0, atol=1e-13).value
                rhs = tanhsinh(lambda x, da, db: f(x) ** 2, -1.0, 1.0, atol=1e-13).value
        else:
            f0, df0 = trial
            mean = 0.5 * tanhsinh(lambda x, da, db: f0(x), -1.0, 1.0, atol=1e-13).value
            lhs = tanhsinh(lambda x, da, db: (1 - x * x) ** two_p * df0(x) ** 2,
                           -1.0, 1.0, atol=1e-13).value
            rhs = tanhsinh(lambda x, da, db: (f0(x) - mean) ** 2,
                           -1.0, 1.0, atol=1e-13).value
        ratio = math.inf if rhs == 0 else lhs / rhs
        records.append({"p": p, "lhs": lhs, "rhs": rhs, "ratio": ratio,
                        "margin": ratio - m_p})
    return records
