"""Pure-Python numerical kernels.

Reference implementation of the hot loops used by the general eigensolver:
characteristic polynomial, simultaneous (Aberth) root iteration, Newton
polishing and inverse iteration.  ``_ckernels.pyx`` mirrors these
functions operation for operation.
"""
import numpy as np

EPS = float(np.finfo(float).eps)


def charpoly(m):
    """Monic characteristic polynomial of a square complex matrix.

    The matrix is reduced to upper Hessenberg form by stabilized elementary
    similarity transforms (Gaussian elimination with row pivoting); the
    coefficients then follow from the Hessenberg determinant recurrence.

    Parameters
    ----------
    m : array_like, shape (n, n)

    Returns
    -------
    ndarray, shape (n + 1,)
        Coefficients of ``det(z I - m)``, highest degree first.
    """
    h = [[complex(x) for x in row] for row in np.asarray(m)]
    n = len(h)
    for k in range(n - 2):
        p = k + 1
        best = abs(h[p][k])
        for i in range(k + 2, n):
            if abs(h[i][k]) > best:
                p, best = i, abs(h[i][k])
        if best == 0.0:
            continue
        if p != k + 1:
            h[p], h[k + 1] = h[k + 1], h[p]
            for row in h:
                row[p], row[k + 1] = row[k + 1], row[p]
        piv = h[k + 1][k]
        for i in range(k + 2, n):
            mult = h[i][k] / piv
            if mult == 0:
                continue
            hi, hk = h[i], h[k + 1]
            for j in range(n):
                hi[j] -= mult * hk[j]
            for j in range(n):
                h[j][k + 1] += mult * h[j][i]

    # polys[k] holds det(z I - H[:k, :k]) with ascending coefficients
    polys = [[1 + 0j]]
    for k in range(1, n + 1):
        prev = polys[k - 1]
        hkk = h[k - 1][k - 1]
        cur = [0j] * (k + 1)
        for d, c in enumerate(prev):
            cur[d + 1] += c
            cur[d] -= hkk * c
        prod = 1 + 0j
        for i in range(k - 1, 0, -1):
            prod *= h[i][i - 1]
            f = h[i - 1][k - 1] * prod
            if f == 0:
                continue
            for d, c in enumerate(polys[i - 1]):
                cur[d] -= f * c
        polys.append(cur)
    return np.array(polys[n][::-1], dtype=complex)


def _horner(c, z):
    p = c[0]
    dp = 0j
    for ck in c[1:]:
        dp = dp * z + p
        p = p * z + ck
    return p, dp


def _noise(c, az):
    # running bound sum |c_j| |z|^j of the Horner rounding error
    b = abs(c[0])
    for ck in c[1:]:
        b = b * az + abs(ck)
    return b


def aberth(coeffs, z0, tol, max_iter):
    """Simultaneous root iteration (Aberth-Ehrlich, Gauss-Seidel sweep).

    A root is frozen once its correction drops below ``tol`` or once
    ``|p(z)|`` is within the Horner rounding bound.

    Returns
    -------
    roots : ndarray
    iterations : int
    converged : bool
    backward : float
        Largest ``|p(z)| / bound(z)`` over the returned roots.
    """
    c = [complex(x) for x in coeffs]
    z = [complex(x) for x in z0]
    n = len(z)
    noise_k = 4.0 * n * EPS
    done = [False] * n
    it = 0
    while it < max_iter:
        it += 1
        for k in range(n):
            if done[k]:
                continue
            zk = z[k]
            p, dp = _horner(c, zk)
            if abs(p) <= noise_k * _noise(c, abs(zk)):
                done[k] = True
                continue
            s = 0j
            for j in range(n):
                if j != k:
                    diff = zk - z[j]
                    if diff != 0:
                        s += 1.0 / diff
            if dp == 0:
                corr = p / (-s) if s != 0 else tol
            else:
                w = p / dp
                den = 1.0 - w * s
                corr = w / den if den != 0 else w
            z[k] = zk - corr
            if abs(corr) <= tol:
                done[k] = True
        if all(done):
            break
    backward = 0.0
    for zk in z:
        p, _ = _horner(c, zk)
        b = _noise(c, abs(zk))
        backward = max(backward, abs(p) / b if b > 0 else 0.0)
    return np.array(z, dtype=complex), it, all(done), backward


def newton_polish(coeffs, roots, steps):
    """Newton steps on each root; a step is kept only if it lowers ``|p|``."""
    c = [complex(x) for x in coeffs]
    n = len(c) - 1
    noise_k = 4.0 * n * EPS
    out = []
    for z in roots:
        z = complex(z)
        p, dp = _horner(c, z)
        for _ in range(steps):
            if dp == 0 or abs(p) <= noise_k * _noise(c, abs(z)):
                break
            zn = z - p / dp
            pn, dpn = _horner(c, zn)
            if abs(pn) >= abs(p):
                break
            z, p, dp = zn, pn, dpn
        out.append(z)
    return np.array(out, dtype=complex)


def inverse_iteration(m, shift, start, iters, floor):
    """Inverse iteration on ``m - shift I`` from ``start``.

    LU factorization with partial pivoting; pivots smaller than ``floor``
    are replaced by ``floor`` so an exact eigenvalue shift stays solvable.
    Returns a unit vector in the Hermitian norm.
    """
    a = [[complex(x) for x in row] for row in np.asarray(m)]
    n = len(a)
    for i in range(n):
        a[i][i] -= shift
    perm = list(range(n))
    for k in range(n):
        p = k
        best = abs(a[k][k])
        for i in range(k + 1, n):
            if abs(a[i][k]) > best:
                p, best = i, abs(a[i][k])
        if p != k:
            a[p], a[k] = a[k], a[p]
            perm[p], perm[k] = perm[k], perm[p]
        if abs(a[k][k]) < floor:
            a[k][k] = complex(floor)
        piv = a[k][k]
        for i in range(k + 1, n):
            mult = a[i][k] / piv
            a[i][k] = mult
            if mult != 0:
                ai, ak = a[i], a[k]
                for j in range(k + 1, n):
                    ai[j] -= mult * ak[j]
    x = [complex(v) for v in start]
    for _ in range(iters):
        y = [x[perm[i]] for i in range(n)]
        for i in range(n):
            s = y[i]
            ai = a[i]
            for j in range(i):
                s -= ai[j] * y[j]
            y[i] = s
        for i in range(n - 1, -1, -1):
            s = y[i]
            ai = a[i]
            for j in range(i + 1, n):
                s -= ai[j] * y[j]
            y[i] = s / ai[i]
        nrm = sum(v.real * v.real + v.imag * v.imag for v in y) ** 0.5
        x = [v / nrm for v in y]
    return np.array(x, dtype=complex)
