"""Mesh, assembly, pencil solver and the spectrum drivers."""

import math

import numpy as np
import pytest

from momentsphere.eigen import (
    Discretization,
    assemble,
    full_spectrum,
    invariant_spectrum,
    make_mesh,
    mode_spectrum,
    parity_spectrum,
    rayleigh_quotient,
    solve_pencil,
)
from momentsphere.errors import DomainError, ParityError, TailSafetyError
from momentsphere.families import (
    ellipsoid_metric,
    mu_metric,
    nu_metric,
    random_embeddable,
    rho_metric,
    standard_metric,
    tent_metric,
)
from momentsphere.oracles import tent_spectrum


class TestMesh:
    def test_graded_full_interval(self):
        mesh = make_mesh(64)
        nodes = mesh.nodes
        assert nodes[0] == -1.0 and nodes[-1] == 1.0
        assert 0.0 in nodes
        assert np.all(np.diff(nodes) > 0)
        # symmetric, clustered into the poles
        assert np.allclose(nodes, -nodes[::-1])
        h = np.diff(nodes)
        assert h[0] < h[len(h) // 2] / 4

    def test_uniform_option(self):
        mesh = make_mesh(16, "uniform")
        assert np.allclose(np.diff(mesh.nodes), 2.0 / 16)

    def test_nested_refinement(self):
        coarse = make_mesh(32).nodes
        fine = make_mesh(64).nodes
        assert np.all(np.isin(np.round(coarse, 15), np.round(fine, 15)))

    def test_half_interval(self):
        mesh = make_mesh(32, domain=(0.0, 1.0))
        assert mesh.nodes[0] == 0.0 and mesh.nodes[-1] == 1.0

    def test_validation(self):
        with pytest.raises(DomainError):
            make_mesh(5)  # odd element count cannot place a node at 0
        with pytest.raises(DomainError):
            make_mesh(64, "exotic")


class TestAssembly:
    def test_stiffness_kernel_contains_constants(self):
        disc = assemble(standard_metric(), 0, make_mesh(8, "uniform"))
        ones = np.ones(disc.size)
        assert np.max(np.abs(disc.a_matvec(ones))) < 1e-14

    def test_mass_is_total_length(self):
        disc = assemble(standard_metric(), 0, make_mesh(64))
        ones = np.ones(disc.size)
        assert abs(ones @ disc.b_matvec(ones) - 2.0) < 1e-13

    def test_zero_mode_eigenvalue(self):
        for metric in (standard_metric(), tent_metric(), nu_metric(3.0)):
            disc = assemble(metric, 0, make_mesh(128))
            lam0 = solve_pencil(disc, 1, want_vectors=False).eigenvalues[0]
            assert abs(lam0) < 1e-10

    def test_mode_matrices_reduced(self):
        mesh = make_mesh(64)
        disc = assemble(standard_metric(), 2, mesh)
        assert disc.size == mesh.nodes.size - 2
        assert disc.dirichlet_left and disc.dirichlet_right


class TestSolvePencil:
    def test_discrete_sine_eigenvalues(self):
        # pure stiffness with identity mass on a uniform mesh has the
        # closed-form sine eigenvalues of the second-difference matrix
        n = 40
        h = 1.0 / (n + 1)
        a_d = np.full(n, 2.0) / h**2
        a_e = np.full(n - 1, -1.0) / h**2
        disc = Discretization(0, make_mesh(n + 1 if (n + 1) % 2 == 0 else n + 2,
                                           "uniform", (0.0, 1.0)),
                              a_d, a_e, np.ones(n), np.zeros(n - 1), True, True)
        got = solve_pencil(disc, 6, want_vectors=False).eigenvalues
        expect = [(2 - 2 * math.cos(k * math.pi * h)) / h**2 for k in range(1, 7)]
        assert np.allclose(got, expect, rtol=1e-12)

    def test_legendre_pencil(self):
        disc = assemble(standard_metric(), 0, make_mesh(512))
        got = solve_pencil(disc, 4, want_vectors=False).eigenvalues
        assert np.allclose(got[1:], [2, 6, 12], rtol=1e-3)

    def test_deterministic_repeat(self):
        disc = assemble(nu_metric(2.0), 0, make_mesh(256))
        a = solve_pencil(disc, 3)
        b = solve_pencil(disc, 3)
        assert np.array_equal(a.eigenvalues, b.eigenvalues)
        assert np.array_equal(a.vectors, b.vectors)

    @pytest.mark.parametrize("metric,m", [(nu_metric(1.0), 0), (mu_metric(5.0), 0),
                                          (standard_metric(), 1)])
    def test_against_dense_lapack(self, metric, m):
        # independent eigen-algorithm on the same assembled pencil
        from scipy.linalg import eigh
        disc = assemble(metric, m, make_mesh(256))
        res = solve_pencil(disc, 5, want_vectors=False)
        a = (np.diag(disc.a_diag) + np.diag(disc.a_off, 1) + np.diag(disc.a_off, -1))
        b = (np.diag(disc.b_diag) + np.diag(disc.b_off, 1) + np.diag(disc.b_off, -1))
        dense = eigh(a, b, eigvals_only=True, subset_by_index=[0, 4])
        # atol covers the dense solver's own rounding near the zero mode,
        # where the stiffness scale is ~1e5 on the graded mesh
        assert np.allclose(res.eigenvalues, dense, rtol=1e-10, atol=1e-9)

    def test_orthonormality(self):
        disc = assemble(standard_metric(), 0, make_mesh(512))
        res = solve_pencil(disc, 5)
        gram = np.array([[v @ disc.b_matvec(w) for w in res.vectors]
                         for v in res.vectors])
        assert np.max(np.abs(gram - np.eye(5))) < 1e-8


class TestInvariantSpectrum:
    def test_round_sphere_legendre(self):
        spec = invariant_spectrum(standard_metric(), 4, 1024)
        for i, expect in enumerate([2.0, 6.0, 12.0, 20.0]):
            assert abs(spec.eigenvalues[i] / expect - 1) < 1e-5
        assert spec.parities == ("odd", "even", "odd", "even")

    def test_error_estimates_bound_true_error(self):
        spec = invariant_spectrum(standard_metric(), 3, 512)
        true = np.array([2.0, 6.0, 12.0])
        # Richardson error estimates are of the coarse-fine gap scale
        assert np.all(np.abs(spec.eigenvalues - true) < spec.error_estimates + 1e-9)

    def test_flat_disc_limit(self):
        spec = invariant_spectrum(tent_metric(), 2, 1024)
        ref = tent_spectrum(2)
        assert abs(spec.eigenvalues[0] / ref[0] - 1) < 1e-5
        assert abs(spec.eigenvalues[1] / ref[1] - 1) < 1e-5

    def test_mu_bound_realized(self):
        spec = invariant_spectrum(mu_metric(10.0), 1, 512)
        assert spec.eigenvalues[0] >= 12.0

    def test_mesh_convergence_order(self):
        errs = []
        for n in (128, 256, 512):
            disc = assemble(standard_metric(), 0, make_mesh(n))
            lam = solve_pencil(disc, 3, want_vectors=False).eigenvalues[2]
            errs.append(abs(lam - 6.0))
        assert errs[0] / errs[1] > 3.5
        assert errs[1] / errs[2] > 3.5

    def test_monotone_in_profile(self):
        # pointwise larger profiles push every eigenvalue up
        pairs = [(standard_metric(), mu_metric(1.0)),
                 (standard_metric(), ellipsoid_metric(0.6)),
                 (ellipsoid_metric(0.6), tent_metric())]
        for small, big in pairs:
            xs = np.linspace(-1, 1, 501)
            assert np.all(small.gbar(xs) <= big.gbar(xs) + 1e-7)
            s = invariant_spectrum(small, 3, 512).eigenvalues
            b = invariant_spectrum(big, 3, 512).eigenvalues
            assert np.all(s <= b + 1e-6)


class TestModeSpectrum:
    def test_first_sector_legendre(self):
        spec = mode_spectrum(standard_metric(), 1, 3, 1024)
        assert np.allclose(spec.eigenvalues, [2, 6, 12], rtol=1e-4)

    def test_second_sector_legendre(self):
        spec = mode_spectrum(standard_metric(), 2, 2, 1024)
        assert np.allclose(spec.eigenvalues, [6, 12], rtol=1e-4)

    def test_eigenfunctions_vanish_at_poles(self):
        spec = mode_spectrum(nu_metric(1.0), 1, 2, 256)
        for v in spec.vectors:
            assert v[0] == 0.0 and v[-1] == 0.0
            assert np.max(np.abs(v)) < np.inf

    def test_requires_positive_mode(self):
        with pytest.raises(DomainError):
            mode_spectrum(standard_metric(), 0, 1, 256)

    def test_full_first_eigenvalue_at_most_round_sphere(self):
        # the lowest eigenvalue across all sectors stays below the round
        # sphere's 2 for every smooth area-normalized metric
        for metric in (standard_metric(), mu_metric(1.0), nu_metric(1.0),
                       rho_metric(6.0), random_embeddable(2), ellipsoid_metric(0.8)):
            inv = invariant_spectrum(metric, 1, 512).eigenvalues[0]
            m1 = mode_spectrum(metric, 1, 1, 512).eigenvalues[0]
            assert min(inv, m1) <= 2.0 + 1e-4, metric.label

    def test_invariant_first_alone_can_exceed_two(self):
        assert invariant_spectrum(mu_metric(1.0), 1, 512).eigenvalues[0] > 2.0


class TestParitySpectrum:
    def test_round_sphere_sectors(self):
        odd = parity_spectrum(standard_metric(), "odd", 2, 512)
        even = parity_spectrum(standard_metric(), "even", 2, 512)
        assert np.allclose(odd.eigenvalues, [2, 12], rtol=1e-4)
        assert np.allclose(even.eigenvalues, [6, 20], rtol=1e-4)

    def test_flat_disc_odd_sector(self):
        spec = parity_spectrum(tent_metric(), "odd", 1, 512)
        assert abs(spec.eigenvalues[0] / tent_spectrum(1)[0] - 1) < 1e-5

    def test_union_is_invariant_spectrum(self):
        for metric in (standard_metric(), ellipsoid_metric(0.7)):
            odd = parity_spectrum(metric, "odd", 2, 512).eigenvalues
            even = parity_spectrum(metric, "even", 2, 512).eigenvalues
            union = np.sort(np.concatenate([odd, even]))
            inv = invariant_spectrum(metric, 4, 1024).eigenvalues
            assert np.allclose(union, inv, rtol=1e-4)

    def test_interleaving(self):
        odd = parity_spectrum(ellipsoid_metric(0.6), "odd", 3, 512).eigenvalues
        even = parity_spectrum(ellipsoid_metric(0.6), "even", 2, 512).eigenvalues
        assert odd[0] < even[0] < odd[1] < even[1] < odd[2]

    def test_requires_even_metric(self):
        m = random_embeddable(0)
        if not m.is_even:
            with pytest.raises(ParityError):
                parity_spectrum(m, "odd", 1, 256)


class TestFullSpectrum:
    def test_round_sphere_multiplicities(self):
        entries = full_spectrum(standard_metric(), 3, 8, 512)
        flat = [v for v, m, mult in entries for _ in range(mult)][:8]
        assert np.allclose(flat, [2, 2, 2, 6, 6, 6, 6, 6], rtol=1e-4)

    def test_first_merged_value(self):
        entries = full_spectrum(tent_metric(), 3, 1, 512)
        first = entries[0][0]
        inv = invariant_spectrum(tent_metric(), 1, 512).eigenvalues[0]
        m1 = mode_spectrum(tent_metric(), 1, 1, 512).eigenvalues[0]
        assert abs(first - min(inv, m1)) < 1e-9

    def test_squeezed_ellipsoid_third_exceeds_round(self):
        entries = full_spectrum(ellipsoid_metric(0.8), 3, 3, 512)
        flat = [v for v, m, mult in entries for _ in range(mult)][:3]
        inv = invariant_spectrum(ellipsoid_metric(0.8), 1, 512).eigenvalues[0]
        assert flat[2] > 2.0
        assert abs(flat[2] - inv) < 1e-9

    def test_tail_safety(self):
        with pytest.raises(TailSafetyError):
            full_spectrum(standard_metric(), 2, 12, 256)

    def test_requires_mode_range(self):
        with pytest.raises(DomainError):
            full_spectrum(standard_metric(), 1, 4, 256)


class TestRayleighQuotient:
    def test_linear_trial_round_sphere(self):
        assert abs(rayleigh_quotient(standard_metric(), lambda x: x) - 2.0) < 1e-10

    def test_quadratic_trial_round_sphere(self):
        # oracle: exact polynomial integrals give exactly 6
        val = rayleigh_quotient(standard_metric(), lambda x: x**2 - 1.0 / 3.0)
        assert abs(val - 6.0) < 2e-5

    def test_linear_trial_flat_disc(self):
        assert abs(rayleigh_quotient(tent_metric(), lambda x: x) - 3.0) < 1e-10

    def test_upper_bounds_first_eigenvalue(self):
        lam1 = invariant_spectrum(nu_metric(2.0), 1, 512).eigenvalues[0]
        for trial in (lambda x: x, lambda x: np.sin(1.5 * x), lambda x: x**3):
            assert rayleigh_quotient(nu_metric(2.0), trial) >= lam1 - 1e-6

    def test_constant_trial_rejected(self):
        with pytest.raises(DomainError):
            rayleigh_quotient(standard_metric(), lambda x: np.ones_like(x))
