"""Eigenvalues and c-normalized right eigenvectors of complex symmetric matrices.

For a complex symmetric ``M`` the left eigenvector of an eigenvalue is the
plain transpose of the right one, so eigenvectors are normalized with the
bilinear c-product ``<phi*|phi> = sum_m phi_m**2`` instead of the Hermitian
norm.  Near an exceptional point that c-product of a unit vector vanishes;
such states are flagged instead of normalized.

Two solvers are provided: an exact formula for 2x2 matrices and a general
path (characteristic polynomial, Aberth iteration, Newton polishing,
inverse iteration) for any ``n >= 2``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from epcluster import kernels

TAU_EP = 1e-8
TAU_ROOT = 1e-13
MAX_ITER = 500
NEWTON_STEPS = 2
INVERSE_ITERATIONS = 2
_ROTATION = math.sqrt(2.0)  # initial-guess offset angle, radians
_TIE = 1e-12
# eigenvalue distance (relative to matrix scale) below which inverse-iteration
# vectors are c-orthogonalized against each other
PARTNER_GAP = 1e-2
# roots this close (relative) are tested for a genuinely degenerate eigenspace
CLUSTER_GAP = 1e-6
_NULL_SV = 1e-10


class SolverError(RuntimeError):
    """Root iteration did not converge."""

    def __init__(self, message, residual=float("nan"), iterations=0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class EigenState:
    """One eigenpair.

    ``vector`` is c-normalized when ``c_norm_ok``; for states at (or within
    ``TAU_EP`` of) a coalescence it is a Hermitian unit vector instead.
    """

    eigenvalue: complex
    vector: np.ndarray
    c_norm_ok: bool
    residual: float

    @property
    def energy(self):
        return self.eigenvalue.real

    @property
    def half_width(self):
        return self.eigenvalue.imag


@dataclass(frozen=True)
class SpectralDecomposition:
    states: tuple
    coalescent_pairs: tuple = field(default=())

    @property
    def n(self):
        return len(self.states)

    @property
    def eigenvalues(self):
        return np.array([s.eigenvalue for s in self.states])

    @property
    def vectors(self):
        """Array of shape (n, n); row ``k`` is the vector of state ``k``."""
        return np.array([s.vector for s in self.states])

    @property
    def flagged(self):
        return np.array([not s.c_norm_ok for s in self.states])

    def permuted(self, order, signs=None):
        """Reorder states (``order[k]`` is the old index of new state ``k``)."""
        order = list(order)
        inverse = {old: new for new, old in enumerate(order)}
        states = []
        for new, old in enumerate(order):
            s = self.states[old]
            if signs is not None and signs[new] < 0:
                s = EigenState(s.eigenvalue, -s.vector, s.c_norm_ok, s.residual)
            states.append(s)
        pairs = tuple(
            sorted(tuple(sorted((inverse[i], inverse[j]))) for i, j in self.coalescent_pairs)
        )
        return SpectralDecomposition(tuple(states), pairs)


def c_product(u, v):
    """Bilinear product ``sum_m u_m v_m`` (no conjugation)."""
    return complex(np.sum(np.asarray(u) * np.asarray(v)))


def _sign_reference(v):
    mags = np.abs(v)
    top = mags.max()
    # first component within rounding of the largest magnitude
    return int(np.argmax(mags >= top * (1 - 1e-12)))


def _fix_sign(v, prev=None):
    if prev is not None:
        if np.vdot(prev, v).real < 0:
            return -v
        return v
    k = _sign_reference(v)
    if v[k].real < 0 or (v[k].real == 0 and v[k].imag < 0):
        return -v
    return v


def _fix_phase(v):
    # flagged vectors carry no c-norm; make the reference component real positive
    k = _sign_reference(v)
    if v[k] == 0:
        return v
    return v * (abs(v[k]) / v[k])


def c_normalize(vectors, previous=None):
    """c-normalize each row of ``vectors``.

    Parameters
    ----------
    vectors : array_like, shape (k, n)
        One (not necessarily normalized) vector per row.
    previous : SpectralDecomposition, optional
        When given, the sign of vector ``k`` is chosen so that its Hermitian
        overlap with ``previous.states[k]`` has positive real part; otherwise
        the largest-magnitude component gets a positive real part.

    Returns
    -------
    out : ndarray, shape (k, n)
    ok : ndarray of bool
        False where ``|<v*|v>| <= TAU_EP`` for the Hermitian unit vector; such
        rows are returned Hermitian-normalized instead.
    """
    vs = np.atleast_2d(np.asarray(vectors, dtype=complex))
    out = np.empty_like(vs)
    ok = np.ones(len(vs), dtype=bool)
    for k, v in enumerate(vs):
        big = np.abs(v).max()
        if big == 0:
            raise ValueError("cannot normalize a zero vector")
        # real divisions keep subnormal input from over- or underflowing
        u = v.real / big + 1j * (v.imag / big)
        u = u / np.linalg.norm(u)
        c = c_product(u, u)
        prev = None
        if previous is not None and k < previous.n:
            prev = previous.states[k].vector
        if abs(c) <= TAU_EP:
            ok[k] = False
            u = _fix_phase(u)
            out[k] = _fix_sign(u, prev) if prev is not None else u
            continue
        w = u / cmath.sqrt(c)
        # one more pass removes the rounding of a large Hermitian norm
        w = w / cmath.sqrt(c_product(w, w))
        out[k] = _fix_sign(w, prev)
    return out, ok


def _standard_order(values):
    """Ascending real part, ties (within rounding) by ascending imaginary part."""
    order = sorted(range(len(values)), key=lambda k: (values[k].real, values[k].imag))
    scale = 1.0 + max(abs(v) for v in values)
    changed = True
    while changed:
        changed = False
        for i in range(len(order) - 1):
            a, b = values[order[i]], values[order[i + 1]]
            if abs(a.real - b.real) <= _TIE * scale and b.imag < a.imag:
                order[i], order[i + 1] = order[i + 1], order[i]
                changed = True
    return order


def _residual(m, value, vec):
    return float(np.max(np.abs(m @ vec - value * vec)))


def _assemble(m, values, vecs, ok):
    order = _standard_order(list(values))
    states = tuple(
        EigenState(complex(values[k]), vecs[k], bool(ok[k]), _residual(m, values[k], vecs[k]))
        for k in order
    )
    pairs = set()
    vals = [s.eigenvalue for s in states]
    for k, s in enumerate(states):
        if s.c_norm_ok:
            continue
        others = [j for j in range(len(states)) if j != k]
        j = min(others, key=lambda j: (abs(vals[j] - vals[k]), j))
        pairs.add((min(j, k), max(j, k)))
    return SpectralDecomposition(states, tuple(sorted(pairs)))


def _check_square(m, n=None):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if n is not None and m.shape[0] != n:
        raise ValueError(f"expected a {n}x{n} matrix, got {m.shape}")
    if m.shape[0] < 2:
        raise ValueError("need n >= 2")
    return m


def discriminant_z(m):
    """``Z = sqrt((eps1 - eps2)**2 + 4 omega**2) / 2`` on the principal branch."""
    m = _check_square(m, 2)
    d = m[0, 0] - m[1, 1]
    w = m[0, 1]
    s = max(abs(d), abs(w))
    if s == 0:
        return 0j
    # scaled so that squaring neither underflows nor overflows
    d = complex(d.real / s, d.imag / s)
    w = complex(w.real / s, w.imag / s)
    return 0.5 * s * cmath.sqrt(d * d + 4 * w * w)


def eigen_2x2_analytic(m):
    """Closed-form decomposition of a complex symmetric 2x2 matrix.

    Eigenvalues are ``(eps1 + eps2)/2 +- Z``.  The eigenvectors are the
    columns of the complex rotation with ``cos 2t = (eps1 - eps2) / 2Z`` and
    ``sin 2t = omega / Z``; ``(cos t, sin t)`` belongs to ``+Z``.
    """
    m = _check_square(m, 2)
    e1, e2, w = m[0, 0], m[1, 1], m[0, 1]
    mean = 0.5 * (e1 + e2)
    z = discriminant_z(m)
    values = [mean + z, mean - z]
    if w == 0:
        # decoupled: the diagonal is the spectrum, exactly
        out, ok = c_normalize(np.eye(2, dtype=complex))
        return _assemble(m, [e1, e2], out, ok)
    if z == 0:
        # exact coalescence: single eigenvector (omega, -(e1 - e2)/2)
        v = np.array([w, -0.5 * (e1 - e2)])
        out, ok = c_normalize(np.array([v, v]))
        return _assemble(m, values, out, ok)
    c2 = 0.5 * (e1 - e2) / z
    s2 = w / z
    one_plus, one_minus = 1 + c2, 1 - c2
    if abs(one_plus) >= abs(one_minus):
        c = cmath.sqrt(0.5 * one_plus)
        s = s2 / (2 * c)
    else:
        s = cmath.sqrt(0.5 * one_minus)
        c = s2 / (2 * s)
    vecs = np.array([[c, s], [-s, c]], dtype=complex)
    out, ok = c_normalize(vecs)
    return _assemble(m, values, out, ok)


def _start_vector(n):
    # deterministic, generic start for inverse iteration
    k = np.arange(n)
    return np.exp(1j * 2.399963229728653 * (k + 1)) * (1 + 0.1 * k) / math.sqrt(n)


def characteristic_roots(m):
    """Eigenvalues of ``m`` from its characteristic polynomial.

    The matrix is shifted by ``trace/n`` first so the polynomial is centered.

    Raises
    ------
    SolverError
        If the Aberth iteration does not converge within ``MAX_ITER`` sweeps.
    """
    m = _check_square(m)
    n = m.shape[0]
    mu = complex(np.trace(m)) / n
    s = m - mu * np.eye(n)
    scale = 1.0 + float(np.max(np.abs(m)))
    coeffs = kernels.charpoly(s)
    radius = 1.0 + float(np.max(np.abs(s)))
    z0 = radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + _ROTATION))
    roots, iters, converged, backward = kernels.aberth(
        coeffs, z0, TAU_ROOT * scale, MAX_ITER
    )
    if not converged:
        raise SolverError(
            f"root iteration did not converge after {iters} iterations "
            f"(backward residual {backward:.3e} x rounding bound)",
            residual=backward,
            iterations=iters,
        )
    roots = kernels.newton_polish(coeffs, roots, NEWTON_STEPS)
    return mu + roots


def _clusters(values, tol):
    groups = []
    for k in range(len(values)):
        for g in groups:
            if any(abs(values[k] - values[j]) <= tol for j in g):
                g.append(k)
                break
        else:
            groups.append([k])
    return [g for g in groups if len(g) > 1]


def _degenerate_basis(m, value, k, scale):
    """Eigenvalue and eigenbasis of a ``k``-fold non-defective eigenvalue.

    The returned rows are c-orthonormal and Hermitian-orthonormal at the
    same time, which is possible exactly when the eigenspace is spanned by
    vectors that are real up to a common phase (a diabolic degeneracy).
    Returns None when no such eigenspace exists near ``value``.
    """
    n = m.shape[0]
    eye = np.eye(n)
    _, sv, vh = np.linalg.svd(m - value * eye)
    if sv[n - k] > CLUSTER_GAP * scale:
        return None  # null space too small: defective (EP) or not degenerate
    # Rayleigh quotient on the near-null space sharpens the cluster centre
    q = vh[n - k:].conj().T
    value = complex(np.trace(q.conj().T @ m @ q)) / k
    _, sv, vh = np.linalg.svd(m - value * eye)
    if sv[n - k] > _NULL_SV * scale:
        return None
    q = vh[n - k:].conj().T
    gram = q.T @ q
    if np.abs(np.linalg.svd(gram, compute_uv=False) - 1).max() > 1e-6:
        return None
    # a symmetric unitary matrix is O D O^T with real orthogonal O
    _, o = np.linalg.eigh(gram.real + _ROTATION * gram.imag)
    d = np.diag(o.T @ gram @ o)
    return value, (q @ o / np.sqrt(d)).T


def eigen_general(m):
    """Decomposition of a complex symmetric matrix of any size ``n >= 2``.

    Eigenvectors come from inverse iteration at each polished eigenvalue and
    are c-orthogonalized against previously extracted close partners before
    c-normalization.
    """
    m = _check_square(m)
    n = m.shape[0]
    values = characteristic_roots(m)
    scale = 1.0 + float(np.max(np.abs(m)))
    floor = np.finfo(float).eps * scale
    start = _start_vector(n)
    vecs = np.empty((n, n), dtype=complex)
    ok = np.ones(n, dtype=bool)
    fixed = {}
    for group in _clusters(values, CLUSTER_GAP * scale):
        centre = complex(np.mean(values[group]))
        found = _degenerate_basis(m, centre, len(group), scale)
        if found is not None:
            centre, basis = found
            for j, row in zip(group, basis):
                values[j] = centre
                fixed[j] = row
    for k in range(n):
        if k in fixed:
            out, good = c_normalize(fixed[k])
            vecs[k], ok[k] = out[0], good[0]
            continue
        x = kernels.inverse_iteration(m, values[k], start, INVERSE_ITERATIONS, floor)
        for j in range(k):
            if ok[j] and abs(values[j] - values[k]) <= PARTNER_GAP * scale:
                x = x - c_product(vecs[j], x) * vecs[j]
        out, good = c_normalize(x)
        vecs[k] = out[0]
        ok[k] = good[0]
    return _assemble(m, values, vecs, ok)


def decompose(m):
    """Analytic path for 2x2 matrices, general path otherwise."""
    m = _check_square(m)
    if m.shape[0] == 2:
        return eigen_2x2_analytic(m)
    return eigen_general(m)
