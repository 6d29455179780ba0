"""Weighted inequality machinery: comparison function, trial quotients, constants."""

import numpy as np
import pytest

from momentsphere.errors import DomainError
from momentsphere.hardy import (
    EPS_SCHEDULE,
    feps_quotient,
    hardy_F,
    hardy_check_full,
    hardy_constant_numeric,
    hardy_m,
    hardy_report,
)
from momentsphere.quadrature import tanhsinh


class TestComparisonFunction:
    def test_constant_two_at_half(self):
        xs = np.linspace(0.01, 0.99, 23)
        assert np.allclose(hardy_F(0.5, xs), 2.0, atol=1e-13)

    def test_constant_one_at_one(self):
        xs = np.linspace(0.01, 0.99, 23)
        assert np.allclose(hardy_F(1.0, xs), 1.0, atol=1e-12)

    def test_zero_exponent_value(self):
        assert abs(hardy_F(0.0, 0.6) - 2.64) < 1e-12

    def test_small_argument_series(self):
        # series branch must join the direct formula within the latter's
        # cancellation level (~eps/x^2 at the switch point)
        for p in (0.0, 0.3, 0.8, 1.0):
            direct = hardy_F(p, 1.0001e-4)
            series = hardy_F(p, 0.9999e-4)
            assert abs(direct - series) < 2e-8
        assert abs(hardy_F(0.25, 1e-6) - (3 - 2 * 0.25)) < 1e-9
        # the series branch agrees with an extended-precision direct
        # evaluation (itself good to ~eps_ld/x^2 here) where the
        # double-precision formula has already lost digits
        x = np.longdouble("3e-5")
        q = np.longdouble(1.0 - 2 * 0.3)
        s = 1 - x * x
        direct_ld = float(2 + (s / (x * x)) * (1 - s**q))
        assert abs(hardy_F(0.3, 3e-5) - direct_ld) < 1e-9

    def test_domain(self):
        with pytest.raises(DomainError):
            hardy_F(0.5, 0.0)
        with pytest.raises(DomainError):
            hardy_F(2.0, 0.5)


class TestInfimum:
    def test_exact_constants(self):
        assert hardy_m(0.5) == 2.0
        assert hardy_m(1.0) == 1.0

    def test_between_for_intermediate_exponent(self):
        m = hardy_m(0.75)
        assert 1.0 < m < 2.0
        # dense-grid oracle
        xs = np.linspace(1e-7, 1 - 1e-10, 2_000_001)
        oracle = min(float(np.min(hardy_F(0.75, xs))), 3.0 - 2 * 0.75)
        assert abs(m - oracle) < 1e-6

    def test_flat_region_below_half(self):
        for p in (0.0, 0.2, 0.4):
            assert abs(hardy_m(p) - 2.0) < 1e-9

    def test_lower_bounds_numeric_constant(self):
        for p in np.linspace(0.0, 1.0, 11):
            assert hardy_m(float(p)) <= hardy_constant_numeric(float(p), 512) + 1e-6


class TestTrialQuotient:
    def test_closed_form_matches_quadrature(self):
        # the cross-check is part of the call contract
        for eps in (1.0, 0.25, 1e-3):
            feps_quotient(eps, check=True)

    def test_quadrature_oracle_directly(self):
        eps = 1.0
        a = 1 + eps
        num = tanhsinh(lambda x, da, db: (1 - x * x) ** 2 * (a / (a - x * x) ** 1.5) ** 2,
                       0.0, 1.0, atol=1e-14).value
        den = tanhsinh(lambda x, da, db: x * x / (a - x * x), 0.0, 1.0, atol=1e-14).value
        assert abs(feps_quotient(eps) - num / den) < 1e-10

    def test_trace_decreases_toward_one(self):
        trace = [feps_quotient(e) for e in EPS_SCHEDULE]
        assert all(b < a + 1e-10 for a, b in zip(trace, trace[1:]))
        assert trace[-1] > 1.0

    def test_moderate_epsilon_value(self):
        # frozen from the closed form (also the quadrature oracle above)
        assert abs(feps_quotient(1e-4) - 1.0581497) < 1e-6

    def test_positive_epsilon_required(self):
        with pytest.raises(DomainError):
            feps_quotient(0.0)


class TestNumericConstant:
    def test_legendre_weight_attained(self):
        # the linear function sits in the discrete space, so the discrete
        # minimum equals the optimal constant 2 up to quadrature error
        assert abs(hardy_constant_numeric(0.5, 1024) - 2.0) < 1e-6

    def test_degenerate_weight_unattained(self):
        c1 = hardy_constant_numeric(1.0, 512)
        c2 = hardy_constant_numeric(1.0, 1024)
        c3 = hardy_constant_numeric(1.0, 2048)
        assert 1.0 < c3 < c2 < c1 <= 1.1

    def test_zero_exponent_above_infimum(self):
        assert hardy_constant_numeric(0.0, 512) >= hardy_m(0.0) - 1e-6

    def test_mesh_size_guard(self):
        with pytest.raises(DomainError):
            hardy_constant_numeric(0.5, 128)


class TestZeroAverageInequality:
    def test_linear_trial_degenerate_weight(self):
        rec = hardy_check_full(1.0, [np.polynomial.Polynomial([0.0, 1.0])])[0]
        assert abs(rec["ratio"] - 1.6) < 1e-12

    def test_linear_trial_legendre_weight(self):
        rec = hardy_check_full(0.5, [np.polynomial.Polynomial([0.0, 1.0])])[0]
        assert abs(rec["ratio"] - 2.0) < 1e-12
        assert abs(rec["margin"]) < 1e-12

    def test_random_polynomials_respect_constant(self):
        rng = np.random.default_rng(7)
        trials = [np.polynomial.Polynomial(rng.uniform(-1, 1, 7)) for _ in range(100)]
        for rec in hardy_check_full(1.0, trials):
            assert rec["ratio"] >= 1.0 - 1e-12

    def test_callable_trials(self):
        rec = hardy_check_full(1.0, [(np.sin, np.cos)])[0]
        assert rec["ratio"] >= 1.0


def test_report_bundle():
    rep = hardy_report(1.0, 512)
    assert rep.p == 1.0
    assert rep.m == 1.0
    assert rep.m <= rep.numeric_c_upper + 1e-9
    assert len(rep.eps_trace) == len(EPS_SCHEDULE)
    values = [q for _, q in rep.eps_trace]
    assert all(b < a for a, b in zip(values, values[1:]))
