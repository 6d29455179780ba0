"""Special-function oracles: Bessel, Legendre, flat-disc spectrum, ODE solutions."""

import numpy as np
import pytest
import scipy.special

from momentsphere.errors import DomainError
from momentsphere.oracles import (
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


class TestBessel:
    def test_value_at_zero(self):
        assert bessel_j0(0.0) == 1.0
        assert abs(bessel_j0_prime(0.0)) < 1e-15

    def test_against_series_route(self):
        for x in np.linspace(0.0, 8.0, 33):
            assert abs(bessel_j0(float(x)) - bessel_j0_series(float(x))) < 1e-13

    def test_against_scipy_on_working_range(self):
        xs = np.linspace(0.0, 30.0, 3001)
        assert np.max(np.abs(bessel_j0(xs) - scipy.special.j0(xs))) < 1e-14
        assert np.max(np.abs(bessel_j0_prime(xs) + scipy.special.j1(xs))) < 1e-14

    def test_even_function(self):
        xs = np.linspace(0.1, 20.0, 7)
        assert np.allclose(bessel_j0(xs), bessel_j0(-xs), atol=1e-15)


class TestBesselZeros:
    def test_first_zero_bisection_refined(self):
        z = bessel_zero("J0", 1)
        assert abs(z.value - 2.404825557695773) < 1e-12
        assert abs(bessel_j0(z.value)) < 1e-12
        # cross-validated by the power-series route
        assert abs(bessel_j0_series(z.value)) < 1e-12

    def test_known_values(self):
        assert abs(bessel_zero("J0", 2).value - 5.520078110286311) < 1e-12
        assert abs(bessel_zero("J0prime", 1).value - 3.831705970207512) < 1e-12

    def test_zero_quality_and_monotone(self):
        prev = 0.0
        for j in range(1, 25):
            z = bessel_zero("J0", j)
            assert abs(bessel_j0(z.value)) < 1e-12
            assert z.value > prev
            prev = z.value
        prev = 0.0
        for j in range(1, 25):
            z = bessel_zero("J0prime", j)
            assert abs(bessel_j0_prime(z.value)) < 1e-12
            assert z.value > prev
            prev = z.value

    def test_supported_range_limit(self):
        assert bessel_zero("J0", 64).value > 0
        with pytest.raises(DomainError):
            bessel_zero("J0", 65)
        with pytest.raises(DomainError):
            bessel_zero("J0", 0)
        with pytest.raises(DomainError):
            bessel_zero("J2", 1)


class TestTentSpectrum:
    def test_first_value(self):
        lam = tent_spectrum(1)
        assert abs(lam[0] - 2.891592981473392) < 1e-12
        assert abs(lam[0] - 2.89) < 2e-3

    def test_first_three_frozen(self):
        lam = tent_spectrum(3)
        assert np.allclose(lam, [2.891592981473392, 7.340985321061948,
                                 15.235631171831043], atol=1e-10)

    def test_parity_rule_interlaces(self):
        # odd slots from J0 zeros, even slots from J0' zeros, strictly mixed
        lam = tent_spectrum(8)
        assert all(b > a for a, b in zip(lam, lam[1:]))
        for j, v in enumerate(lam, start=1):
            kind = "J0" if j % 2 == 1 else "J0prime"
            idx = (j + 1) // 2 if j % 2 == 1 else j // 2
            assert abs(v - 0.5 * bessel_zero(kind, idx).value ** 2) < 1e-12


class TestLegendre:
    def test_low_degrees(self):
        xs = np.linspace(-1, 1, 11)
        assert np.allclose(legendre_eval(0, xs), 1.0)
        assert np.allclose(legendre_eval(1, xs), xs)
        assert np.allclose(legendre_eval(2, xs), 1.5 * xs**2 - 0.5, atol=1e-14)

    def test_value_at_one(self):
        for n in range(8):
            assert abs(legendre_eval(n, 1.0) - 1.0) < 1e-13

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 6])
    def test_sturm_liouville_residual(self, n):
        # -((1-x^2) P_n')' = n(n+1) P_n, derivative by recurrence, second
        # derivative from the defining equation rearranged
        xs = np.linspace(-0.95, 0.95, 21)
        p = legendre_eval(n, xs)
        dp = legendre_deriv(n, xs)
        h = 1e-6
        d2p = (legendre_deriv(n, xs + h) - legendre_deriv(n, xs - h)) / (2 * h)
        residual = -( (1 - xs**2) * d2p - 2 * xs * dp ) - n * (n + 1) * p
        assert np.max(np.abs(residual)) < 1e-7

    def test_derivative_against_scipy(self):
        xs = np.linspace(-0.99, 0.99, 101)
        for n in (1, 3, 5):
            ref = scipy.special.lpmv(0, n, xs)
            assert np.allclose(legendre_eval(n, xs), ref, atol=1e-12)


class TestAppendixSolutions:
    @pytest.mark.parametrize("lam", [0.5, 1.0, 2.0, 5.0])
    @pytest.mark.parametrize("branch", [1, 2])
    def test_equation_residual(self, lam, branch):
        sol = appendix_solution(lam, branch)
        assert el_residual(lam, sol) <= 1e-8

    def test_critical_odd_branch_closed_form(self):
        sol = appendix_solution(1.0, 1)
        xs = np.linspace(-0.9, 0.9, 181)
        assert np.max(np.abs(sol(xs) - xs / np.sqrt(1 - xs**2))) < 1e-12
        assert abs(sol(0.6) - 0.75) < 1e-14
        assert sol(0.0) == 0.0

    def test_parities(self):
        xs = np.linspace(0.05, 0.85, 9)
        for lam in (0.5, 1.0, 3.0):
            odd = appendix_solution(lam, 1)
            even = appendix_solution(lam, 2)
            assert np.allclose(odd(-xs), -odd(xs), rtol=1e-12, atol=1e-12)
            assert np.allclose(even(-xs), even(xs), rtol=1e-12, atol=1e-12)

    def test_indicial_identity(self):
        for lam in (0.25, 0.5, 1.0, 2.0, 7.5):
            sol = appendix_solution(lam, 1)
            for r in (sol.r_plus, sol.r_minus):
                assert abs(r * r + r + lam / 4.0) <= 1e-14

    def test_oscillatory_branch_sign_changes(self):
        # high-frequency branch oscillates without bound toward the poles,
        # so no such solution stays square-summable with derivative weight
        sol = appendix_solution(5.0, 1)
        xs = np.linspace(1e-6, 1.0 - 1e-6, 400001)
        vals = sol(xs)
        changes = int(np.sum(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0))
        assert changes >= 3

    def test_domain_guard(self):
        sol = appendix_solution(2.0, 1)
        with pytest.raises(DomainError):
            sol(1.0 - 1e-12)

    def test_el_residual_accepts_analytic_derivatives(self):
        lam = 1.0

        def f(x):
            return x / np.sqrt(1 - x**2)

        def df(x):
            return (1 - x**2) ** -1.5

        def d2f(x):
            return 3 * x * (1 - x**2) ** -2.5

        assert el_residual(lam, f, df=df, d2f=d2f) < 1e-11
