# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the symmetric tridiagonal pencil eigensolver.

Same interface as `_kernels_py`: Sturm-sequence counts and a shifted
tridiagonal solve (LU with partial pivoting, dgtsv-style).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()

BACKEND = "c"


def sturm_counts(sigmas, double[::1] a_d, double[::1] a_e,
                 double[::1] b_d, double[::1] b_e, double pivmin):
    sig_arr = np.atleast_1d(np.asarray(sigmas, dtype=np.float64))
    scalar = np.asarray(sigmas).ndim == 0
    cdef double[::1] sig = np.ascontiguousarray(sig_arr)
    cdef Py_ssize_t n = a_d.shape[0]
    cdef Py_ssize_t m = sig.shape[0]
    out_arr = np.zeros(m, dtype=np.int64)
    cdef long long[::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double s, d, off
    cdef long long c
    with nogil:
        for j in range(m):
            s = sig[j]
            c = 0
            d = a_d[0] - s * b_d[0]
            if fabs(d) < pivmin:
                d = -pivmin
            if d < 0.0:
                c += 1
            for i in range(1, n):
                off = a_e[i - 1] - s * b_e[i - 1]
                d = (a_d[i] - s * b_d[i]) - off * off / d
                if fabs(d) < pivmin:
                    d = -pivmin
                if d < 0.0:
                    c += 1
            out[j] = c
    if scalar:
        return int(out_arr[0])
    return out_arr


def solve_shifted(double[::1] a_d, double[::1] a_e,
                  double[::1] b_d, double[::1] b_e, double sigma, rhs):
    """Solve (A - sigma*B) x = rhs via LU with partial pivoting."""
    cdef Py_ssize_t n = a_d.shape[0]
    d_arr = np.empty(n, dtype=np.float64)
    dl_arr = np.empty(max(n - 1, 0), dtype=np.float64)
    du_arr = np.empty(max(n - 1, 0), dtype=np.float64)
    x_arr = np.array(rhs, dtype=np.float64)
    cdef double[::1] d = d_arr
    cdef double[::1] dl = dl_arr
    cdef double[::1] du = du_arr
    cdef double[::1] x = x_arr
    cdef Py_ssize_t i
    cdef double fact, temp, tiny
    tiny = 1e-300
    with nogil:
        for i in range(n):
            d[i] = a_d[i] - sigma * b_d[i]
        for i in range(n - 1):
            dl[i] = a_e[i] - sigma * b_e[i]
            du[i] = dl[i]
        # forward elimination; dl[i] is reused for the second
        # superdiagonal fill-in created by row interchanges
        for i in range(n - 1):
            if fabs(d[i]) >= fabs(dl[i]):
                if d[i] == 0.0:
                    d[i] = tiny
                fact = dl[i] / d[i]
                d[i + 1] -= fact * du[i]
                x[i + 1] -= fact * x[i]
                dl[i] = 0.0
            else:
                fact = d[i] / dl[i]
                d[i] = dl[i]
                temp = d[i + 1]
                d[i + 1] = du[i] - fact * temp
                if i < n - 2:
                    dl[i] = du[i + 1]
                    du[i + 1] = -fact * dl[i]
                else:
                    dl[i] = 0.0
                du[i] = temp
                temp = x[i]
                x[i] = x[i + 1]
                x[i + 1] = temp - fact * x[i + 1]
        if n > 0 and d[n - 1] == 0.0:
            d[n - 1] = tiny
        # back substitution
        if n > 0:
            x[n - 1] = x[n - 1] / d[n - 1]
        if n > 1:
            x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2]
        for i in range(n - 3, -1, -1):
            x[i] = (x[i] - du[i] * x[i + 1] - dl[i] * x[i + 2]) / d[i]
    return x_arr
