"""Discretization and spectra of the invariant Laplacian and its Fourier modes.

The invariant Laplacian in the moment coordinate is the Sturm-Liouville
operator -(gbar f')', with weak form weights gbar (stiffness) and 1
(mass).  The angular-frequency-m sector adds the zeroth-order weight
m^2 * g, which diverges integrably at the poles and forces Dirichlet
values there; the invariant sector (m = 0) takes natural conditions,
matching the bounded eigenfunctions of the limit problem.

Linear elements on a mesh graded quadratically into the poles give
second-order eigenvalue convergence; reported spectra combine two mesh
levels by Richardson extrapolation and carry the level difference as an
error estimate.  The generalized tridiagonal pencil is solved by
bisection on its Sturm sequence plus inverse iteration, backed by the
compiled kernels when available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import backend
from .errors import ConvergenceError, DomainError, ParityError, TailSafetyError
from .geometry import InvariantMetric
from .quadrature import gauss_rule, tanhsinh

__all__ = [
    "Mesh",
    "Discretization",
    "SpectrumResult",
    "make_mesh",
    "assemble",
    "solve_pencil",
    "invariant_spectrum",
    "mode_spectrum",
    "parity_spectrum",
    "full_spectrum",
    "rayleigh_quotient",
]


@dataclass(frozen=True)
class Mesh:
    """Strictly increasing node coordinates with a grading tag."""

    nodes: np.ndarray
    grading: str

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or nodes.size < 3 or not np.all(np.diff(nodes) > 0):
            raise DomainError("mesh nodes must be strictly increasing")

    @property
    def n_elements(self) -> int:
        return self.nodes.size - 1

    @property
    def spacings(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.nodes[0]), float(self.nodes[-1])


def make_mesh(n: int, grading: str = "graded", domain=(-1.0, 1.0)) -> Mesh:
    """Mesh with ``n`` elements on the moment interval or its right half.

    ``graded`` clusters nodes quadratically into the singular endpoints
    (both poles on [-1, 1], the pole at 1 on [0, 1]); the full-interval
    mesh is symmetric with a node exactly at 0, so even/odd structure and
    the flat-disc kink are resolved.  Refining n -> 2n nests the meshes,
    which Richardson extrapolation relies on.
    """
    a, b = float(domain[0]), float(domain[1])
    if (a, b) == (-1.0, 1.0):
        if n % 2 != 0 or n < 4:
            raise DomainError("full-interval mesh needs an even element count >= 4")
        half = n // 2
        if grading == "uniform":
            right = np.linspace(0.0, 1.0, half + 1)
        elif grading == "graded":
            j = np.arange(half + 1)
            right = 1.0 - ((half - j) / half) ** 2
        else:
            raise DomainError(f"unknown grading {grading!r}")
        nodes = np.concatenate([-right[::-1], right[1:]])
        nodes[0], nodes[half], nodes[-1] = -1.0, 0.0, 1.0
        return Mesh(nodes, grading)
    if (a, b) == (0.0, 1.0):
        if n < 3:
            raise DomainError("half-interval mesh needs >= 3 elements")
        if grading == "uniform":
            nodes = np.linspace(0.0, 1.0, n + 1)
        elif grading == "graded":
            j = np.arange(n + 1)
            nodes = 1.0 - ((n - j) / n) ** 2
        else:
            raise DomainError(f"unknown grading {grading!r}")
        nodes[0], nodes[-1] = 0.0, 1.0
        return Mesh(nodes, grading)
    raise DomainError("supported domains are (-1, 1) and (0, 1)")


@dataclass(frozen=True)
class Discretization:
    """Symmetric tridiagonal stiffness/mass pencil for one Fourier mode.

    Matrices are stored as diagonals; for constrained problems they are
    already reduced to the retained nodes.
    """

    mode: int
    mesh: Mesh
    a_diag: np.ndarray
    a_off: np.ndarray
    b_diag: np.ndarray
    b_off: np.ndarray
    dirichlet_left: bool
    dirichlet_right: bool

    @property
    def size(self) -> int:
        return self.a_diag.size

    def retained_nodes(self) -> np.ndarray:
        lo = 1 if self.dirichlet_left else 0
        hi = -1 if self.dirichlet_right else None
        return self.mesh.nodes[lo:hi]

    def a_matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.a_diag * v
        out[:-1] += self.a_off * v[1:]
        out[1:] += self.a_off * v[:-1]
        return out

    def b_matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.b_diag * v
        out[:-1] += self.b_off * v[1:]
        out[1:] += self.b_off * v[:-1]
        return out


@dataclass(frozen=True)
class SpectrumResult:
    """Ordered eigenvalues with eigenfunction samples and diagnostics."""

    mode: int
    eigenvalues: np.ndarray
    vectors: np.ndarray            # rows = eigenfunctions on mesh nodes
    mesh: Mesh
    parities: tuple
    error_estimates: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        object.__setattr__(self, "eigenvalues", ev)
        if ev.size > 1 and not np.all(np.diff(ev) > 0):
            raise ConvergenceError("eigenvalues are not strictly increasing")


# ----------------------------------------------------------------------
# assembly
# ----------------------------------------------------------------------

def _element_gbar_integrals(metric_gbar: Callable, nodes: np.ndarray,
                            order: int = 8) -> np.ndarray:
    xg, wg = gauss_rule(order)
    left = nodes[:-1]
    h = np.diff(nodes)
    pts = left[:, None] + 0.5 * h[:, None] * (xg[None, :] + 1.0)
    vals = metric_gbar(pts)
    return 0.5 * h * np.sum(wg[None, :] * vals, axis=1)


def assemble(metric: InvariantMetric, m: int, mesh: Mesh) -> Discretization:
    """Stiffness/mass pencil of the mode-m operator on the mesh.

    Element integrals use a fixed 8-point Gauss rule; the endpoint
    elements of the singular m^2*g weight switch to the double-
    exponential rule in endpoint-distance form.
    """
    if m < 0:
        raise DomainError("Fourier mode must be nonnegative")
    nodes = mesh.nodes
    a_dom, b_dom = mesh.domain
    h = np.diff(nodes)
    n_nodes = nodes.size

    ge = _element_gbar_integrals(metric.gbar, nodes)
    a_diag = np.zeros(n_nodes)
    a_off = -ge / h**2
    a_diag[:-1] += ge / h**2
    a_diag[1:] += ge / h**2

    b_diag = np.zeros(n_nodes)
    b_diag[:-1] += h / 3.0
    b_diag[1:] += h / 3.0
    b_off = h / 6.0

    dirichlet = m >= 1
    if dirichlet:
        singular_left = math.isclose(a_dom, -1.0)
        singular_right = math.isclose(b_dom, 1.0)
        p00, p01, p11 = _potential_integrals(metric, nodes,
                                             singular_left, singular_right)
        mm = float(m * m)
        a_diag[:-1] += mm * p00
        a_diag[1:] += mm * p11
        a_off = a_off + mm * p01
        return Discretization(m, mesh, a_diag[1:-1].copy(), a_off[1:-1].copy(),
                              b_diag[1:-1].copy(), b_off[1:-1].copy(), True, True)
    return Discretization(m, mesh, a_diag, a_off, b_diag, b_off, False, False)


def _potential_integrals(metric: InvariantMetric, nodes: np.ndarray,
                         singular_left: bool, singular_right: bool):
    """Per-element integrals of g*phi_a*phi_b for the hat-function pairs."""
    h = np.diff(nodes)
    xg, wg = gauss_rule(8)
    left = nodes[:-1]
    pts = left[:, None] + 0.5 * h[:, None] * (xg[None, :] + 1.0)
    s = (pts - left[:, None]) / h[:, None]      # local coordinate in [0, 1]
    with np.errstate(divide="ignore"):
        gv = 1.0 / metric.gbar(pts)
    scale = 0.5 * h[:, None] * wg[None, :]
    p00 = np.sum(scale * gv * (1.0 - s) ** 2, axis=1)
    p01 = np.sum(scale * gv * (1.0 - s) * s, axis=1)
    p11 = np.sum(scale * gv * s**2, axis=1)

    # endpoint elements: g blows up like 1/distance; only the interior
    # hat survives the Dirichlet constraint there
    if singular_left:
        h0 = h[0]

        def f_left(x, da, db):
            # da is the distance to the pole at -1
            return (da / h0) ** 2 / metric.gbar_end(-1, da)

        p11[0] = tanhsinh(f_left, nodes[0], nodes[1], atol=1e-15, rtol=1e-11).value
        p00[0] = 0.0
        p01[0] = 0.0
    if singular_right:
        hn = h[-1]

        def f_right(x, da, db):
            return (db / hn) ** 2 / metric.gbar_end(+1, db)

        p00[-1] = tanhsinh(f_right, nodes[-2], nodes[-1], atol=1e-15, rtol=1e-11).value
        p11[-1] = 0.0
        p01[-1] = 0.0
    return p00, p01, p11


# ----------------------------------------------------------------------
# pencil eigenvalues
# ----------------------------------------------------------------------

def _pencil_bracket(disc: Discretization):
    ad, ae, bd, be = disc.a_diag, disc.a_off, disc.b_diag, disc.b_off
    ra = np.zeros_like(ad)
    ra[:-1] += np.abs(ae)
    ra[1:] += np.abs(ae)
    rb = np.zeros_like(bd)
    rb[:-1] += np.abs(be)
    rb[1:] += np.abs(be)
    denom = bd - rb
    if np.any(denom <= 0):
        raise ConvergenceError("mass matrix is not strictly diagonally dominant")
    hi = float(np.max((ad + ra) / denom))
    lo = float(min(np.min((ad - ra) / denom), np.min((ad - ra) / (bd + rb)), 0.0))
    span = max(hi - lo, 1.0)
    return lo - 1e-12 * span, hi + 1e-12 * span


def _pivmin(disc: Discretization) -> float:
    scale = max(float(np.max(np.abs(disc.a_diag))), float(np.max(np.abs(disc.b_diag))), 1.0)
    return 2.2e-308 * scale * scale / 2.2e-16


def solve_pencil(disc: Discretization, k: int, *, want_vectors: bool = True,
                 rtol: float = 1e-13, atol: float = 1e-12) -> SpectrumResult:
    """k smallest eigenpairs of the pencil by Sturm bisection.

    Deterministic: eigenvalues are bisection limits of the Sturm count,
    eigenvectors come from inverse iteration started from a fixed seed
    and are mass-normalized with a sign convention.
    """
    n = disc.size
    if not 1 <= k <= n:
        raise DomainError("need 1 <= k <= pencil size")
    ad, ae, bd, be = (np.ascontiguousarray(disc.a_diag), np.ascontiguousarray(disc.a_off),
                      np.ascontiguousarray(disc.b_diag), np.ascontiguousarray(disc.b_off))
    pivmin = _pivmin(disc)
    lo0, hi0 = _pencil_bracket(disc)
    count_hi = backend.sturm_counts(np.array([hi0]), ad, ae, bd, be, pivmin)
    guard = 0
    while int(np.atleast_1d(count_hi)[0]) < k:
        hi0 = hi0 + max(1.0, abs(hi0))
        count_hi = backend.sturm_counts(np.array([hi0]), ad, ae, bd, be, pivmin)
        guard += 1
        if guard > 60:
            raise ConvergenceError("could not bracket the requested eigenvalues")

    lo = np.full(k, lo0)
    hi = np.full(k, hi0)
    targets = np.arange(1, k + 1)
    for it in range(200):
        width = hi - lo
        tol = atol + rtol * np.maximum(np.abs(lo), np.abs(hi))
        active = width > tol
        if not np.any(active):
            break
        mid = 0.5 * (lo + hi)
        counts = np.asarray(backend.sturm_counts(mid[active], ad, ae, bd, be, pivmin))
        below = counts >= targets[active]
        hi_active = hi[active]
        lo_active = lo[active]
        hi_active[below] = mid[active][below]
        lo_active[~below] = mid[active][~below]
        hi[active] = hi_active
        lo[active] = lo_active
    else:
        raise ConvergenceError(
            f"bisection failed to converge: widths {list(hi - lo)}, 200 iterations")
    lam = 0.5 * (lo + hi)

    vectors = None
    if want_vectors:
        vectors = _inverse_iteration(disc, lam, pivmin)
    full_vectors = _expand_vectors(disc, vectors) if want_vectors else np.zeros((k, 0))
    parities = tuple(_parity_tag(disc.mesh, full_vectors[i]) for i in range(k)) \
        if want_vectors else tuple(None for _ in range(k))
    return SpectrumResult(disc.mode, lam, full_vectors, disc.mesh, parities,
                          meta={"n_elements": disc.mesh.n_elements,
                                "backend": backend.BACKEND})


def _inverse_iteration(disc: Discretization, lam: np.ndarray, pivmin: float,
                       max_steps: int = 6) -> np.ndarray:
    n = disc.size
    k = lam.size
    rng = np.random.Generator(np.random.PCG64(0x5EED))
    start = rng.standard_normal(n)
    out = np.empty((k, n))
    spacing = np.diff(lam) if k > 1 else np.array([1.0])
    scale = max(float(np.max(np.abs(lam))), 1e-30)
    anorm = float(np.max(np.abs(disc.a_diag))) + 2.0 * float(np.max(np.abs(disc.a_off)))
    bnorm = float(np.max(np.abs(disc.b_diag))) + 2.0 * float(np.max(np.abs(disc.b_off)))
    for i, lv in enumerate(lam):
        local_gap = float(spacing.min()) if spacing.size else 1.0
        sigma = lv + max(1e-8 * max(abs(lv), 1e-3 * scale), 1e-11 * scale)
        v = start.copy()
        ok = False
        for attempt in range(3):
            for _ in range(max_steps):
                rhs = disc.b_matvec(v)
                v = backend.solve_shifted(disc.a_diag, disc.a_off,
                                          disc.b_diag, disc.b_off, sigma, rhs)
                bn = math.sqrt(abs(float(v @ disc.b_matvec(v))))
                if bn == 0.0 or not math.isfinite(bn):
                    v = rng.standard_normal(n)
                    continue
                v /= bn
                res = disc.a_matvec(v) - lv * disc.b_matvec(v)
                res_tol = 1e-12 * (anorm + abs(lv) * bnorm) * float(np.linalg.norm(v))
                if float(np.linalg.norm(res)) <= res_tol:
                    ok = True
                    break
            if ok:
                break
            sigma = lv + 10.0 ** (attempt - 6) * max(abs(lv), local_gap)
            v = rng.standard_normal(n)
        if not ok:
            raise ConvergenceError(
                f"inverse iteration stalled at eigenvalue {lv!r} (mode {disc.mode}, "
                f"n={n}); residual above tolerance after 3 shifted restarts")
        j = int(np.argmax(np.abs(v)))
        if v[j] < 0:
            v = -v
        out[i] = v
    return out


def _expand_vectors(disc: Discretization, vectors: np.ndarray) -> np.ndarray:
    if not disc.dirichlet_left and not disc.dirichlet_right:
        return vectors
    k = vectors.shape[0]
    full = np.zeros((k, disc.mesh.nodes.size))
    lo = 1 if disc.dirichlet_left else 0
    hi = full.shape[1] - (1 if disc.dirichlet_right else 0)
    full[:, lo:hi] = vectors
    return full


def _parity_tag(mesh: Mesh, v: np.ndarray, tol: float = 1e-6):
    nodes = mesh.nodes
    if not math.isclose(nodes[0], -nodes[-1]):
        return None
    if not np.allclose(nodes, -nodes[::-1], atol=1e-14):
        return None
    rv = v[::-1]
    scale = float(np.max(np.abs(v))) or 1.0
    if float(np.max(np.abs(v - rv))) <= tol * scale:
        return "even"
    if float(np.max(np.abs(v + rv))) <= tol * scale:
        return "odd"
    return None


# ----------------------------------------------------------------------
# two-level spectra
# ----------------------------------------------------------------------

def _two_level(metric: InvariantMetric, m: int, k_solve: int, n: int,
               grading: str = "graded"):
    results = []
    for nn in (n, 2 * n):
        mesh = make_mesh(nn, grading, (-1.0, 1.0))
        disc = assemble(metric, m, mesh)
        results.append(solve_pencil(disc, k_solve))
    coarse, fine = results
    extrap = (4.0 * fine.eigenvalues - coarse.eigenvalues) / 3.0
    err = np.abs(fine.eigenvalues - coarse.eigenvalues) / 3.0
    return coarse, fine, extrap, err


def invariant_spectrum(metric: InvariantMetric, k: int, n: int = 4096) -> SpectrumResult:
    """First k nonzero invariant eigenvalues, Richardson-extrapolated.

    Solves at n and 2n elements; the zero eigenvalue (constants) is
    verified and dropped.  Parities are tagged for even metrics.
    """
    if k < 1:
        raise DomainError("need k >= 1")
    if n < 64:
        raise DomainError("need n >= 64 elements")
    coarse, fine, extrap, err = _two_level(metric, 0, k + 1, n)
    lam0 = float(fine.eigenvalues[0])
    scale = max(1.0, float(np.abs(fine.eigenvalues).max()))
    if abs(lam0) > 1e-9 * scale:
        raise ConvergenceError(f"constant-mode eigenvalue {lam0!r} did not vanish")
    parities = fine.parities[1:] if metric.is_even else tuple(None for _ in range(k))
    return SpectrumResult(0, extrap[1:], fine.vectors[1:], fine.mesh, parities,
                          error_estimates=err[1:],
                          meta={"raw": {fine.mesh.n_elements // 2: coarse.eigenvalues[1:],
                                        fine.mesh.n_elements: fine.eigenvalues[1:]},
                                "zero_mode": lam0,
                                "backend": backend.BACKEND})


def mode_spectrum(metric: InvariantMetric, m: int, k: int, n: int = 4096) -> SpectrumResult:
    """First k eigenvalues of the angular-frequency-m sector."""
    if m < 1:
        raise DomainError("mode_spectrum requires m >= 1 (use invariant_spectrum)")
    if k < 1:
        raise DomainError("need k >= 1")
    coarse, fine, extrap, err = _two_level(metric, m, k, n)
    if extrap[0] <= 0:
        raise ConvergenceError("mode eigenvalues must be strictly positive")
    parities = fine.parities if metric.is_even else tuple(None for _ in range(k))
    return SpectrumResult(m, extrap, fine.vectors, fine.mesh, parities,
                          error_estimates=err,
                          meta={"raw": {fine.mesh.n_elements // 2: coarse.eigenvalues,
                                        fine.mesh.n_elements: fine.eigenvalues},
                                "backend": backend.BACKEND})


def parity_spectrum(metric: InvariantMetric, parity: str, k: int,
                    n: int = 2048) -> SpectrumResult:
    """Invariant eigenvalues of fixed parity via the half-interval problem.

    Even metrics only: odd eigenfunctions vanish at the equator
    (Dirichlet at 0), even ones have vanishing slope there (natural);
    the union over both parities is the invariant spectrum.
    """
    if parity not in ("odd", "even"):
        raise DomainError("parity must be 'odd' or 'even'")
    if not metric.is_even:
        raise ParityError("parity reduction requires an even metric")
    results = []
    for nn in (n, 2 * n):
        mesh = make_mesh(nn, "graded", (0.0, 1.0))
        disc = assemble(metric, 0, mesh)
        if parity == "odd":
            disc = Discretization(0, mesh, disc.a_diag[1:].copy(), disc.a_off[1:].copy(),
                                  disc.b_diag[1:].copy(), disc.b_off[1:].copy(),
                                  True, False)
            results.append(solve_pencil(disc, k))
        else:
            results.append(solve_pencil(disc, k + 1))
    coarse, fine = results
    if parity == "even":
        lam0 = float(fine.eigenvalues[0])
        if abs(lam0) > 1e-9 * max(1.0, float(np.abs(fine.eigenvalues).max())):
            raise ConvergenceError("even sector lost its zero eigenvalue")
        sel = slice(1, None)
    else:
        sel = slice(None)
    extrap = (4.0 * fine.eigenvalues[sel] - coarse.eigenvalues[sel]) / 3.0
    err = np.abs(fine.eigenvalues[sel] - coarse.eigenvalues[sel]) / 3.0
    return SpectrumResult(0, extrap, fine.vectors[sel], fine.mesh,
                          tuple(parity for _ in range(k)),
                          error_estimates=err,
                          meta={"parity": parity, "backend": backend.BACKEND})


def full_spectrum(metric: InvariantMetric, m_max: int, count: int,
                  n: int = 2048) -> list[tuple[float, int, int]]:
    """Merged nonzero spectrum across modes 0..m_max.

    Returns (value, mode, multiplicity) sorted ascending, truncated to
    ``count`` values counted with multiplicity (modes >= 1 carry
    multiplicity two).  Near-coincident values (1e-7 relative) are
    ordered by mode index.  A tail-safety check requires the smallest
    mode-m_max eigenvalue to exceed the last merged value, since higher
    modes only move up.
    """
    if m_max < 2:
        raise DomainError("need m_max >= 2 for a trustworthy merge")
    if count < 1:
        raise DomainError("need count >= 1")
    entries = []
    inv = invariant_spectrum(metric, count, n)
    entries.extend((float(v), 0, 1) for v in inv.eigenvalues)
    min_last_mode = math.inf
    for m in range(1, m_max + 1):
        k_m = max(1, (count + 1) // 2)
        spec = mode_spectrum(metric, m, k_m, n)
        entries.extend((float(v), m, 2) for v in spec.eigenvalues)
        if m == m_max:
            min_last_mode = float(spec.eigenvalues[0])
    entries.sort(key=lambda e: (e[0], e[1]))
    merged = _order_with_ties(entries)
    out = []
    total = 0
    for value, m, mult in merged:
        if total >= count:
            break
        out.append((value, m, mult))
        total += mult
    tail_value = out[-1][0]
    if min_last_mode <= tail_value * (1.0 + 1e-9):
        raise TailSafetyError(
            f"mode {m_max} reaches down to {min_last_mode:.6g} <= merged tail "
            f"{tail_value:.6g}; raise m_max to trust the first {count} values")
    return out


def _order_with_ties(entries, rel: float = 1e-7):
    entries = sorted(entries, key=lambda e: e[0])
    out = []
    i = 0
    while i < len(entries):
        j = i + 1
        ref = entries[i][0]
        while j < len(entries) and abs(entries[j][0] - ref) <= rel * max(abs(ref), 1.0):
            j += 1
        group = sorted(entries[i:j], key=lambda e: e[1])
        out.extend(group)
        i = j
    return out


def rayleigh_quotient(metric: InvariantMetric, trial, n: int = 2048,
                      mesh: Optional[Mesh] = None) -> float:
    """Quotient (integral gbar f'^2) / (integral f^2) for a trial function.

    ``trial`` is a callable or node samples; the mass-weighted mean is
    projected out so the value upper-bounds the first nonzero invariant
    eigenvalue up to discretization error.
    """
    if mesh is None:
        mesh = make_mesh(n, "graded", (-1.0, 1.0))
    disc = assemble(metric, 0, mesh)
    f = np.asarray(trial(mesh.nodes) if callable(trial) else trial, dtype=float)
    if f.shape != mesh.nodes.shape:
        raise DomainError("trial samples must match the mesh nodes")
    ones = np.ones_like(f)
    bf = disc.b_matvec(f)
    f = f - (ones @ bf) / (ones @ disc.b_matvec(ones)) * ones
    den = float(f @ disc.b_matvec(f))
    if den <= 0.0:
        raise DomainError("trial function is zero after projection")
    num = float(f @ disc.a_matvec(f))
    return num / den
