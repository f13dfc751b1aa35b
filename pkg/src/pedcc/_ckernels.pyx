# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels. Same contracts as ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, INFINITY
from scipy.linalg.cython_blas cimport dgemm, ddot, daxpy, dscal

cnp.import_array()

cdef double COINCIDENT_SQ = 1e-24
cdef double ENERGY_RTOL = 1e-14
CONVERGED = 1
BUDGET = 0
DEGENERATE = 2


def mgs_rows(double[:, ::1] v, double tol):
    cdef int m = v.shape[0]
    cdef int n = v.shape[1]
    cdef int one = 1
    cdef int j, l
    cdef double norm, r, scale
    for j in range(m):
        norm = sqrt(ddot(&n, &v[j, 0], &one, &v[j, 0], &one))
        if norm < tol:
            return j, norm
        scale = 1.0 / norm
        dscal(&n, &scale, &v[j, 0], &one)
        for l in range(j + 1, m):
            r = -ddot(&n, &v[j, 0], &one, &v[l, 0], &one)
            daxpy(&n, &r, &v[j, 0], &one, &v[l, 0], &one)
    return -1, 0.0


cdef void _gram(double[:, ::1] a, double[:, ::1] g) noexcept nogil:
    # row-major (k, n) is column-major (n, k); G = M^T M
    cdef int k = a.shape[0]
    cdef int n = a.shape[1]
    cdef double alpha = 1.0, beta = 0.0
    cdef char tr = b'T', nt = b'N'
    dgemm(&tr, &nt, &k, &k, &n, &alpha, &a[0, 0], &n, &a[0, 0], &n, &beta, &g[0, 0], &k)


def charge_energy(double[:, ::1] a):
    cdef int k = a.shape[0]
    cdef double[:, ::1] g = np.empty((k, k))
    cdef int i, j
    cdef double e = 0.0
    _gram(a, g)
    for i in range(k):
        for j in range(i + 1, k):
            e += 1.0 / sqrt(g[i, i] + g[j, j] - 2.0 * g[i, j])
    return e


cdef bint _any_nonzero(double[:, ::1] v) noexcept nogil:
    cdef Py_ssize_t i, c
    for i in range(v.shape[0]):
        for c in range(v.shape[1]):
            if v[i, c] != 0.0:
                return True
    return False


def charge_relax(double[:, ::1] a, double[:, ::1] v, double step, double damping,
                 long max_iters, double stop_displacement, energies=None):
    cdef int k = a.shape[0]
    cdef int n = a.shape[1]
    cdef double[:, ::1] g = np.empty((k, k))
    cdef double[:, ::1] w = np.empty((k, k))
    cdef double[:, ::1] wa = np.empty((k, n))
    cdef double[:, ::1] prev = np.array(a, copy=True)
    cdef double[::1] rowsum = np.empty(k)
    cdef double[::1] trace
    cdef bint record = energies is not None
    if record:
        trace = energies
    cdef double alpha = 1.0, beta = 0.0
    cdef char nt = b'N'
    cdef long it
    cdef long iterations = max_iters
    cdef int status = BUDGET
    cdef int i, j, c
    cdef double d2, inv, e, radial, norm, diff, disp2, maxdisp2, x
    cdef double disp = INFINITY
    cdef double prev_energy = INFINITY
    cdef bint from_rest = True
    for it in range(max_iters):
        _gram(a, g)
        e = 0.0
        for i in range(k):
            rowsum[i] = 0.0
            w[i, i] = 0.0
        for i in range(k):
            for j in range(i + 1, k):
                d2 = g[i, i] + g[j, j] - 2.0 * g[i, j]
                if d2 < COINCIDENT_SQ:
                    return it, DEGENERATE, disp
                inv = 1.0 / sqrt(d2)
                e += inv
                inv = inv * inv * inv
                w[i, j] = inv
                w[j, i] = inv
                rowsum[i] += inv
                rowsum[j] += inv
        if not from_rest and e > prev_energy * (1.0 + ENERGY_RTOL):
            a[...] = prev
            v[...] = 0.0
            from_rest = True
            if record:
                trace[it] = prev_energy
            continue
        if record:
            trace[it] = e
        prev[...] = a
        prev_energy = e
        from_rest = not _any_nonzero(v)
        # (W A) in row-major is (A^T W) in column-major; W is symmetric
        dgemm(&nt, &nt, &n, &k, &k, &alpha, &a[0, 0], &n, &w[0, 0], &k, &beta, &wa[0, 0], &n)
        maxdisp2 = 0.0
        for i in range(k):
            radial = 0.0
            for c in range(n):
                x = a[i, c] * rowsum[i] - wa[i, c]
                wa[i, c] = x
                radial += x * a[i, c]
            norm = 0.0
            for c in range(n):
                v[i, c] = damping * v[i, c] + step * (wa[i, c] - radial * a[i, c])
                x = a[i, c] + v[i, c]
                wa[i, c] = x
                norm += x * x
            norm = 1.0 / sqrt(norm)
            disp2 = 0.0
            for c in range(n):
                x = wa[i, c] * norm
                diff = x - a[i, c]
                disp2 += diff * diff
                a[i, c] = x
            if disp2 > maxdisp2:
                maxdisp2 = disp2
        disp = sqrt(maxdisp2)
        if disp < stop_displacement:
            iterations = it + 1
            status = CONVERGED
            break
    if not from_rest and charge_energy(a) > prev_energy * (1.0 + ENERGY_RTOL):
        a[...] = prev
        v[...] = 0.0
    return iterations, status, disp
