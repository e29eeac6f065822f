# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels.

Same algorithms and operation order as ``_pykernels``; see that module for
the documentation of each function.
"""
import numpy as np

from libc.math cimport fabs, sqrt
from libc.stdlib cimport malloc, free

cdef double EPS = np.finfo(float).eps


cdef inline double cabs_(double complex z) nogil:
    # hypot-free magnitude is fine at these scales
    return sqrt(z.real * z.real + z.imag * z.imag)


def charpoly(m):
    cdef double complex[:, ::1] h = np.array(m, dtype=complex, order="C")
    cdef Py_ssize_t n = h.shape[0]
    cdef Py_ssize_t i, j, k, p, d
    cdef double best
    cdef double complex piv, mult, tmp, hkk, prod, f
    for k in range(n - 2):
        p = k + 1
        best = cabs_(h[p, k])
        for i in range(k + 2, n):
            if cabs_(h[i, k]) > best:
                p = i
                best = cabs_(h[i, k])
        if best == 0.0:
            continue
        if p != k + 1:
            for j in range(n):
                tmp = h[p, j]
                h[p, j] = h[k + 1, j]
                h[k + 1, j] = tmp
            for j in range(n):
                tmp = h[j, p]
                h[j, p] = h[j, k + 1]
                h[j, k + 1] = tmp
        piv = h[k + 1, k]
        for i in range(k + 2, n):
            mult = h[i, k] / piv
            if mult == 0:
                continue
            for j in range(n):
                h[i, j] = h[i, j] - mult * h[k + 1, j]
            for j in range(n):
                h[j, k + 1] = h[j, k + 1] + mult * h[j, i]

    # polys[k, d]: coefficient of z^d in det(z I - H[:k, :k])
    cdef double complex[:, ::1] polys = np.zeros((n + 1, n + 1), dtype=complex)
    polys[0, 0] = 1
    for k in range(1, n + 1):
        hkk = h[k - 1, k - 1]
        for d in range(k):
            polys[k, d + 1] = polys[k, d + 1] + polys[k - 1, d]
            polys[k, d] = polys[k, d] - hkk * polys[k - 1, d]
        prod = 1
        for i in range(k - 1, 0, -1):
            prod = prod * h[i, i - 1]
            f = h[i - 1, k - 1] * prod
            if f == 0:
                continue
            for d in range(i):
                polys[k, d] = polys[k, d] - f * polys[i - 1, d]
    out = np.empty(n + 1, dtype=complex)
    for d in range(n + 1):
        out[n - d] = polys[n, d]
    return out


cdef inline void horner(double complex* c, Py_ssize_t deg, double complex z,
                        double complex* p, double complex* dp) nogil:
    cdef double complex pp = c[0]
    cdef double complex dd = 0
    cdef Py_ssize_t i
    for i in range(1, deg + 1):
        dd = dd * z + pp
        pp = pp * z + c[i]
    p[0] = pp
    dp[0] = dd


cdef inline double noise(double complex* c, Py_ssize_t deg, double az) nogil:
    cdef double b = cabs_(c[0])
    cdef Py_ssize_t i
    for i in range(1, deg + 1):
        b = b * az + cabs_(c[i])
    return b


def aberth(coeffs, z0, double tol, int max_iter):
    cdef double complex[::1] c = np.array(coeffs, dtype=complex)
    cdef double complex[::1] z = np.array(z0, dtype=complex)
    cdef Py_ssize_t n = z.shape[0]
    cdef Py_ssize_t deg = c.shape[0] - 1
    cdef double noise_k = 4.0 * n * EPS
    cdef char* done = <char*> malloc(n)
    cdef Py_ssize_t j, k
    cdef int it = 0
    cdef bint all_done = False
    cdef double complex zk, p, dp, s, diff, w, den, corr
    cdef double backward = 0.0, b
    for k in range(n):
        done[k] = 0
    try:
        while it < max_iter:
            it += 1
            for k in range(n):
                if done[k]:
                    continue
                zk = z[k]
                horner(&c[0], deg, zk, &p, &dp)
                if cabs_(p) <= noise_k * noise(&c[0], deg, cabs_(zk)):
                    done[k] = 1
                    continue
                s = 0
                for j in range(n):
                    if j != k:
                        diff = zk - z[j]
                        if diff != 0:
                            s = s + 1.0 / diff
                if dp == 0:
                    if s != 0:
                        corr = p / (-s)
                    else:
                        corr = tol
                else:
                    w = p / dp
                    den = 1.0 - w * s
                    if den != 0:
                        corr = w / den
                    else:
                        corr = w
                z[k] = zk - corr
                if cabs_(corr) <= tol:
                    done[k] = 1
            all_done = True
            for k in range(n):
                if not done[k]:
                    all_done = False
                    break
            if all_done:
                break
        for k in range(n):
            horner(&c[0], deg, z[k], &p, &dp)
            b = noise(&c[0], deg, cabs_(z[k]))
            if b > 0 and cabs_(p) / b > backward:
                backward = cabs_(p) / b
    finally:
        free(done)
    return np.asarray(z).copy(), it, bool(all_done), backward


def newton_polish(coeffs, roots, int steps):
    cdef double complex[::1] c = np.array(coeffs, dtype=complex)
    cdef double complex[::1] z = np.array(roots, dtype=complex)
    cdef Py_ssize_t deg = c.shape[0] - 1
    cdef double noise_k = 4.0 * deg * EPS
    cdef Py_ssize_t k
    cdef int s
    cdef double complex zc, p, dp, zn, pn, dpn
    for k in range(z.shape[0]):
        zc = z[k]
        horner(&c[0], deg, zc, &p, &dp)
        for s in range(steps):
            if dp == 0 or cabs_(p) <= noise_k * noise(&c[0], deg, cabs_(zc)):
                break
            zn = zc - p / dp
            horner(&c[0], deg, zn, &pn, &dpn)
            if cabs_(pn) >= cabs_(p):
                break
            zc = zn
            p = pn
            dp = dpn
        z[k] = zc
    return np.asarray(z).copy()


def inverse_iteration(m, double complex shift, start, int iters, double floor):
    cdef double complex[:, ::1] a = np.array(m, dtype=complex, order="C")
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t[::1] perm = np.arange(n, dtype=np.intp)
    cdef double complex[::1] x = np.array(start, dtype=complex)
    cdef double complex[::1] y = np.empty(n, dtype=complex)
    cdef Py_ssize_t i, j, k, p, t
    cdef double best, nrm
    cdef double complex tmp, piv, mult, s
    for i in range(n):
        a[i, i] = a[i, i] - shift
    for k in range(n):
        p = k
        best = cabs_(a[k, k])
        for i in range(k + 1, n):
            if cabs_(a[i, k]) > best:
                p = i
                best = cabs_(a[i, k])
        if p != k:
            for j in range(n):
                tmp = a[p, j]
                a[p, j] = a[k, j]
                a[k, j] = tmp
            t = perm[p]
            perm[p] = perm[k]
            perm[k] = t
        if cabs_(a[k, k]) < floor:
            a[k, k] = floor
        piv = a[k, k]
        for i in range(k + 1, n):
            mult = a[i, k] / piv
            a[i, k] = mult
            if mult != 0:
                for j in range(k + 1, n):
                    a[i, j] = a[i, j] - mult * a[k, j]
    for t in range(iters):
        for i in range(n):
            y[i] = x[perm[i]]
        for i in range(n):
            s = y[i]
            for j in range(i):
                s = s - a[i, j] * y[j]
            y[i] = s
        for i in range(n - 1, -1, -1):
            s = y[i]
            for j in range(i + 1, n):
                s = s - a[i, j] * y[j]
            y[i] = s / a[i, i]
        nrm = 0.0
        for i in range(n):
            nrm += y[i].real * y[i].real + y[i].imag * y[i].imag
        nrm = sqrt(nrm)
        for i in range(n):
            x[i] = y[i] / nrm
    return np.asarray(x).copy()
