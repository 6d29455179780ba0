import numpy as np
import pytest

from momentsphere.errors import DivergenceError
from momentsphere.quadrature import (
    cumulative_integral,
    gauss_panels,
    integrate,
    tanhsinh,
)


def test_smooth_polynomial():
    res = tanhsinh(lambda x, da, db: 3 * x**2, 0.0, 2.0)
    assert abs(res.value - 8.0) < 1e-12


def test_inverse_sqrt_left_endpoint():
    res = tanhsinh(lambda x, da, db: 1.0 / np.sqrt(da), 0.0, 1.0)
    assert abs(res.value - 2.0) < 1e-12


def test_inverse_sqrt_both_endpoints():
    res = tanhsinh(lambda x, da, db: 1.0 / np.sqrt(da * db), -1.0, 1.0)
    assert abs(res.value - np.pi) < 1e-12


def test_log_singularity():
    res = tanhsinh(lambda x, da, db: np.log(da), 0.0, 1.0)
    assert abs(res.value - (-1.0)) < 1e-12


def test_error_estimate_and_levels():
    res = tanhsinh(lambda x, da, db: np.exp(x), 0.0, 1.0)
    assert abs(res.value - (np.e - 1.0)) < 1e-13
    assert res.error < 1e-10
    assert res.nodes < 2**20


def test_empty_interval():
    assert tanhsinh(lambda x, da, db: x, 1.0, 1.0).value == 0.0


def test_divergent_integrand_flagged():
    with pytest.raises(DivergenceError):
        tanhsinh(lambda x, da, db: np.full_like(np.asarray(x), np.inf), 0.0, 1.0)


def test_integrate_plain_wrapper():
    assert abs(integrate(np.sin, 0.0, np.pi) - 2.0) < 1e-12


def test_gauss_panels_polynomial_exact():
    edges = np.array([0.0, 0.3, 1.1, 2.0])
    vals = gauss_panels(lambda x: x**5 - x, edges)
    exact = [(b**6 / 6 - b**2 / 2) - (a**6 / 6 - a**2 / 2)
             for a, b in zip(edges[:-1], edges[1:])]
    assert np.allclose(vals, exact, atol=1e-14)


@pytest.mark.parametrize("n", [101, 1001, 4097])
def test_cumulative_integral_fourth_order(n):
    t = np.linspace(0.0, np.pi, n)
    res = cumulative_integral(t, np.sin(t))
    assert abs(res[-1] - 2.0) < 50.0 / n**4 + 1e-13
    mid = np.searchsorted(t, np.pi / 2)
    assert abs(res[mid] - (1.0 - np.cos(t[mid]))) < 50.0 / n**4 + 1e-13


def test_cumulative_integral_nonuniform_grid():
    t = np.pi * np.linspace(0.0, 1.0, 3001) ** 1.5
    res = cumulative_integral(t, np.sin(t))
    assert abs(res[-1] - 2.0) < 1e-10


def test_cumulative_integral_quadratic_exact():
    t = np.array([0.0, 0.1, 0.5, 0.6, 1.4, 2.0])
    y = 3 * t**2 - t + 2
    res = cumulative_integral(t, y)
    exact = t**3 - t**2 / 2 + 2 * t
    assert np.allclose(res, exact, atol=1e-13)
