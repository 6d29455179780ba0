"""Self-contained special functions and closed-form reference solutions.

Everything here is independent of the mesh eigensolver so that the two
can check each other: the Bessel function J0 and its derivative with
their zeros, the flat-disc limit spectrum built from those zeros,
Legendre polynomials by recurrence, and the explicit solutions of the
degenerate second-order equation

    -d/dx[(1-x^2)^2 f'] = lambda f

on (-1, 1) for every real lambda, split by the sign of lambda - 1.

J0 is evaluated through the cosine integral representation

    J0(x) = (1/pi) * integral_0^pi cos(x sin a) da

by the midpoint rule, whose error for this entire periodic integrand is
an aliasing term of order J_{2M}(x) -- below 1e-60 for the fixed M used
here on the supported range.  A truncated power series provides a second,
independent route for moderate arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .errors import DomainError

__all__ = [
    "BesselZero",
    "AppendixSolution",
    "bessel_j0",
    "bessel_j0_prime",
    "bessel_j0_series",
    "bessel_zero",
    "tent_spectrum",
    "legendre_eval",
    "legendre_deriv",
    "appendix_solution",
    "el_residual",
]

_M_QUAD = 256  # midpoint-rule points; aliasing error ~ J_{2M}(x), negligible for |x| <= 200
_ANGLES = (np.arange(_M_QUAD) + 0.5) * (math.pi / _M_QUAD)
_SIN_ANGLES = np.sin(_ANGLES)


def bessel_j0(x):
    """J0 by the integral representation; |error| < 1e-14 for |x| <= 200."""
    x = np.asarray(x, dtype=float)
    vals = np.mean(np.cos(x[..., None] * _SIN_ANGLES), axis=-1)
    return float(vals) if vals.ndim == 0 else vals


def bessel_j0_prime(x):
    """J0' = -J1 by the corresponding integral representation."""
    x = np.asarray(x, dtype=float)
    # J1(x) = (1/pi) int_0^pi cos(a - x sin a) da
    j1 = np.mean(np.cos(_ANGLES - x[..., None] * _SIN_ANGLES), axis=-1)
    out = -j1
    return float(out) if out.ndim == 0 else out


def bessel_j0_series(x: float, terms: int = 50) -> float:
    """Power series with compensated summation; accurate for |x| <= 8."""
    z = float(x) * float(x) / 4.0
    term = 1.0
    total = 1.0
    comp = 0.0
    for k in range(1, terms):
        term *= -z / (k * k)
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if abs(term) < 1e-18 * abs(total):
            break
    return total


@dataclass(frozen=True)
class BesselZero:
    kind: Literal["J0", "J0prime"]
    index: int
    value: float


def bessel_zero(kind: str, j: int) -> BesselZero:
    """j-th positive zero of J0 or of J0' (bisection plus Newton polish).

    Consecutive zeros of either kind are separated by more than pi, so
    the window (pi*(j-1/2), pi*(j+1/2)) brackets exactly one of them.
    """
    if j < 1:
        raise DomainError("zero index starts at 1")
    if j > 64:
        raise DomainError("zeros tabulated up to index 64")
    if kind == "J0":
        f, df = bessel_j0, bessel_j0_prime
    elif kind == "J0prime":
        f = bessel_j0_prime

        def df(x):
            # J0'' = -J0 - J0'/x away from 0
            return -bessel_j0(x) - bessel_j0_prime(x) / x
    else:
        raise DomainError("kind must be 'J0' or 'J0prime'")
    lo = math.pi * (j - 0.5)
    hi = math.pi * (j + 0.5)
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return BesselZero(kind, j, lo)
    if flo * fhi > 0:
        raise DomainError("bracketing failed; zero outside the interlacing window")
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            lo = hi = mid
            break
        if flo * fm < 0:
            hi = mid
        else:
            lo, flo = mid, fm
        if hi - lo < 1e-13:
            break
    root = 0.5 * (lo + hi)
    for _ in range(4):
        step = f(root) / df(root)
        root -= step
        if abs(step) < 1e-15 * root:
            break
    return BesselZero(kind, j, root)


def tent_spectrum(k: int) -> list[float]:
    """First k eigenvalues of the flat-disc limit metric.

    lambda_j = xi_j^2 / 2 where xi_j is the ((j+1)/2)-th zero of J0 for
    odd j (odd eigenfunctions, Dirichlet data at the equator) and the
    (j/2)-th zero of J0' for even j (Neumann data).
    """
    if k < 1:
        raise DomainError("need k >= 1")
    out = []
    for j in range(1, k + 1):
        if j % 2 == 1:
            xi = bessel_zero("J0", (j + 1) // 2).value
        else:
            xi = bessel_zero("J0prime", j // 2).value
        out.append(0.5 * xi * xi)
    if any(b <= a for a, b in zip(out, out[1:])):
        raise AssertionError("flat-disc eigenvalues must increase strictly")
    return out


# ----------------------------------------------------------------------
# Legendre polynomials
# ----------------------------------------------------------------------

def legendre_eval(n: int, x):
    """P_n(x) by the three-term recurrence."""
    if n < 0:
        raise DomainError("degree must be nonnegative")
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if n == 0:
        return float(p_prev) if p_prev.ndim == 0 else p_prev
    p = x.copy()
    for m in range(1, n):
        p, p_prev = ((2 * m + 1) * x * p - m * p_prev) / (m + 1), p
    return float(p) if p.ndim == 0 else p


def legendre_deriv(n: int, x):
    """P_n'(x) from (1-x^2) P_n' = n (P_{n-1} - x P_n), series at |x|=1."""
    x = np.asarray(x, dtype=float)
    if n == 0:
        z = np.zeros_like(x)
        return float(z) if z.ndim == 0 else z
    s = 1.0 - x * x
    num = n * (legendre_eval(n - 1, x) - x * legendre_eval(n, x))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(s > 1e-12, num / np.where(s > 1e-12, s, 1.0),
                       np.sign(x) ** (n + 1) * n * (n + 1) / 2.0)
    return float(out) if out.ndim == 0 else out


# ----------------------------------------------------------------------
# explicit solutions of the degenerate Euler-Lagrange equation
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class AppendixSolution:
    """One branch of the closed-form solutions of -((1-x^2)^2 f')' = lambda f."""

    lam: float
    branch: int
    regime: str                       # "oscillatory", "critical", "powerlaw"
    omega: float | None               # sqrt(lambda-1) when lambda > 1
    gamma: float | None               # sqrt(1-lambda) when lambda < 1
    r_plus: complex
    r_minus: complex
    parity: str                       # "odd" or "even"
    fn: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x):
        x = np.asarray(x)
        if np.any(np.abs(np.asarray(x, dtype=float)) > 1.0 - 1e-8):
            raise DomainError("solutions blow up at the poles; require |x| <= 1 - 1e-8")
        out = self.fn(x)
        return float(out) if np.ndim(x) == 0 else out


def appendix_solution(lam: float, branch: int) -> AppendixSolution:
    """Closed-form solution pair, split by the sign of lambda - 1.

    Branch 1 is odd, branch 2 even.  The indicial exponents
    r = (-1 +- sqrt(1-lambda))/2 satisfy r^2 + r + lambda/4 = 0.
    """
    if branch not in (1, 2):
        raise DomainError("branch must be 1 or 2")
    lam = float(lam)
    omega_c = complex(lam - 1.0) ** 0.5  # sqrt(lambda-1), imaginary below 1
    r_plus = (-1.0 + 1j * omega_c) / 2.0
    r_minus = (-1.0 - 1j * omega_c) / 2.0
    if lam > 1.0:
        omega = math.sqrt(lam - 1.0)

        def fn(x):
            x = np.asarray(x)
            half_log = 0.5 * omega * np.log((1.0 - x) / (1.0 + x))
            root = np.sqrt(1.0 - x * x)
            if branch == 1:
                return (x * np.cos(half_log) - omega * np.sin(half_log)) / root
            return (omega * np.cos(half_log) + x * np.sin(half_log)) / root

        return AppendixSolution(lam, branch, "oscillatory", omega, None,
                                r_plus, r_minus, "odd" if branch == 1 else "even", fn)
    if lam == 1.0:

        def fn(x):
            x = np.asarray(x)
            root = np.sqrt(1.0 - x * x)
            if branch == 1:
                return x / root
            return (0.5 * x * np.log((1.0 - x) / (1.0 + x)) + 1.0) / root

        return AppendixSolution(lam, branch, "critical", None, None,
                                r_plus, r_minus, "odd" if branch == 1 else "even", fn)
    gamma = math.sqrt(1.0 - lam)
    rp = (-1.0 - gamma) / 2.0
    rm = (-1.0 + gamma) / 2.0

    def fn(x):
        # prefactors carry gamma opposite to the power pairing: (x - gamma)
        # multiplies (1+x)^{r-}(1-x)^{r+}; the equation's residual fixes
        # the pairing unambiguously
        x = np.asarray(x)
        first = (x - gamma) * (1.0 + x) ** rm * (1.0 - x) ** rp
        second = (x + gamma) * (1.0 + x) ** rp * (1.0 - x) ** rm
        return first + second if branch == 1 else first - second

    return AppendixSolution(lam, branch, "powerlaw", None, gamma,
                            r_plus, r_minus, "odd" if branch == 1 else "even", fn)


_STENCIL_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_STENCIL_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


def el_residual(lam: float, f, xs=None, df=None, d2f=None, h: float = 4e-4) -> float:
    """Max residual of (1-x^2)^2 f'' - 4x(1-x^2) f' + lambda f over ``xs``.

    Derivatives come from the caller when available; otherwise five-point
    stencils evaluated in extended precision.  The default step balances
    truncation against rounding in the extended-precision evaluations,
    keeping residuals of the closed-form solutions below 5e-9 on
    |x| <= 0.9.
    """
    if xs is None:
        xs = np.linspace(-0.9, 0.9, 101)
    xs = np.asarray(xs, dtype=float)
    if df is not None and d2f is not None:
        f0 = np.asarray(f(xs), dtype=float)
        f1 = np.asarray(df(xs), dtype=float)
        f2 = np.asarray(d2f(xs), dtype=float)
    else:
        xl = xs.astype(np.longdouble)
        hl = np.longdouble(h)
        offsets = np.arange(-2, 3, dtype=np.longdouble) * hl
        grid = xl[:, None] + offsets[None, :]
        vals = np.asarray(f(grid), dtype=np.longdouble)
        f0 = np.asarray(vals[:, 2], dtype=float)
        f1 = np.asarray(vals @ _STENCIL_D1.astype(np.longdouble) / hl, dtype=float)
        f2 = np.asarray(vals @ _STENCIL_D2.astype(np.longdouble) / (hl * hl), dtype=float)
    s = 1.0 - xs * xs
    res = s * s * f2 - 4.0 * xs * s * f1 + lam * f0
    return float(np.max(np.abs(res)))
