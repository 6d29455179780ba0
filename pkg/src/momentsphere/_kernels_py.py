"""NumPy reference implementation of the tridiagonal pencil kernels.

Mirrors the compiled extension `_kernels`: the Sturm-sequence eigenvalue
count for the symmetric tridiagonal pencil (A, B) and a shifted
tridiagonal solve.  The count loop is sequential in the matrix dimension
but vectorized over shifts, which keeps the fallback usable; the solve
delegates to LAPACK's pivoting tridiagonal solver via SciPy.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_banded

BACKEND = "python"


def sturm_counts(sigmas, a_d, a_e, b_d, b_e, pivmin: float):
    """Number of pencil eigenvalues strictly below each shift.

    Counts negative pivots of the LDL^T factorization of A - sigma*B.
    ``pivmin`` replaces vanishing pivots, as in LAPACK's bisection.
    """
    sig = np.asarray(sigmas, dtype=float)
    scalar = sig.ndim == 0
    sig = np.atleast_1d(sig).astype(float)
    n = a_d.shape[0]
    counts = np.zeros(sig.shape, dtype=np.int64)
    d = a_d[0] - sig * b_d[0]
    d = np.where(np.abs(d) < pivmin, -pivmin, d)
    counts += d < 0
    for i in range(1, n):
        off = a_e[i - 1] - sig * b_e[i - 1]
        d = (a_d[i] - sig * b_d[i]) - off * off / d
        d = np.where(np.abs(d) < pivmin, -pivmin, d)
        counts += d < 0
    return int(counts[0]) if scalar else counts


def solve_shifted(a_d, a_e, b_d, b_e, sigma: float, rhs):
    """Solve (A - sigma*B) x = rhs for the symmetric tridiagonal pencil."""
    n = a_d.shape[0]
    e = a_e - sigma * b_e
    ab = np.zeros((3, n))
    ab[0, 1:] = e
    ab[1, :] = a_d - sigma * b_d
    ab[2, :-1] = e
    return solve_banded((1, 1), ab, rhs)
