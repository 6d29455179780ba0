"""Both kernel backends against dense linear algebra and each other."""

import numpy as np
import pytest
from scipy.linalg import eigh

from momentsphere import backend

BACKENDS = backend.available_backends()


def _random_pencil(rng, n):
    a_d = rng.uniform(1.0, 3.0, n)
    a_e = rng.uniform(-0.8, 0.8, n - 1)
    b_d = rng.uniform(1.0, 2.0, n)
    b_e = rng.uniform(-0.2, 0.2, n - 1)
    return a_d, a_e, b_d, b_e


def _dense(d, e):
    return np.diag(d) + np.diag(e, 1) + np.diag(e, -1)


@pytest.mark.parametrize("name", BACKENDS)
def test_sturm_counts_match_dense_eigenvalues(name):
    impl = backend.get_backend(name)
    rng = np.random.default_rng(42)
    for n in (5, 37, 128):
        a_d, a_e, b_d, b_e = _random_pencil(rng, n)
        w = eigh(_dense(a_d, a_e), _dense(b_d, b_e), eigvals_only=True)
        shifts = np.concatenate([[w[0] - 1.0], 0.5 * (w[:-1] + w[1:]), [w[-1] + 1.0]])
        counts = impl.sturm_counts(shifts, a_d, a_e, b_d, b_e, 1e-280)
        assert list(counts) == list(range(n + 1))


@pytest.mark.parametrize("name", BACKENDS)
def test_sturm_counts_scalar_shift(name):
    impl = backend.get_backend(name)
    rng = np.random.default_rng(3)
    a_d, a_e, b_d, b_e = _random_pencil(rng, 12)
    w = eigh(_dense(a_d, a_e), _dense(b_d, b_e), eigvals_only=True)
    c = impl.sturm_counts(float(w[4] + 1e-9), a_d, a_e, b_d, b_e, 1e-280)
    assert c == 5


@pytest.mark.parametrize("name", BACKENDS)
def test_solve_shifted_matches_dense_solve(name):
    impl = backend.get_backend(name)
    rng = np.random.default_rng(7)
    for n in (4, 33, 200):
        a_d, a_e, b_d, b_e = _random_pencil(rng, n)
        sigma = 0.37
        rhs = rng.standard_normal(n)
        x = impl.solve_shifted(a_d, a_e, b_d, b_e, sigma, rhs)
        mat = _dense(a_d, a_e) - sigma * _dense(b_d, b_e)
        assert np.allclose(mat @ x, rhs, atol=1e-9 * np.abs(rhs).max() + 1e-12)


@pytest.mark.parametrize("name", BACKENDS)
def test_solve_shifted_needs_pivoting(name):
    # leading principal minor vanishes: fails without row interchanges
    impl = backend.get_backend(name)
    a_d = np.array([0.0, 1.0, 2.0])
    a_e = np.array([1.0, 0.5])
    b_d = np.zeros(3)
    b_e = np.zeros(2)
    rhs = np.array([1.0, 2.0, 3.0])
    x = impl.solve_shifted(a_d, a_e, b_d, b_e, 0.0, rhs)
    mat = _dense(a_d, a_e)
    assert np.allclose(mat @ x, rhs, atol=1e-12)


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled backend not built")
def test_backends_agree():
    c = backend.get_backend("c")
    py = backend.get_backend("python")
    rng = np.random.default_rng(11)
    a_d, a_e, b_d, b_e = _random_pencil(rng, 257)
    shifts = np.linspace(0.0, 4.0, 23)
    assert np.array_equal(c.sturm_counts(shifts, a_d, a_e, b_d, b_e, 1e-280),
                          py.sturm_counts(shifts, a_d, a_e, b_d, b_e, 1e-280))
    rhs = rng.standard_normal(257)
    xc = c.solve_shifted(a_d, a_e, b_d, b_e, 0.9, rhs)
    xp = py.solve_shifted(a_d, a_e, b_d, b_e, 0.9, rhs)
    assert np.allclose(xc, xp, rtol=1e-10, atol=1e-12)


def test_selected_backend_exposed():
    assert backend.BACKEND in ("c", "python")
    assert callable(backend.sturm_counts)
    assert callable(backend.solve_shifted)
