"""Backend selection for the numerical kernels.

The compiled extension ``_ckernels`` is used when it was built; otherwise
the pure-Python ``_pykernels`` module is used.  :func:`set_backend` switches
explicitly, which the test-suite and the benchmark use to compare both.
Setting ``EPCLUSTER_BACKEND=python`` in the environment forces the fallback.
"""
import os

from epcluster import _pykernels

try:
    from epcluster import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

_active = _ckernels if _ckernels is not None else _pykernels
if os.environ.get("EPCLUSTER_BACKEND") == "python":
    _active = _pykernels


def available_backends():
    return sorted(_BACKENDS)


def backend_name():
    return "cython" if _active is _ckernels and _ckernels is not None else "python"


def set_backend(name):
    """Select ``"python"`` or ``"cython"``; returns the previous backend name."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(
            f"kernel backend {name!r} unavailable; choose from {available_backends()}"
        )
    previous = backend_name()
    _active = _BACKENDS[name]
    return previous


def charpoly(m):
    return _active.charpoly(m)


def aberth(coeffs, z0, tol, max_iter):
    return _active.aberth(coeffs, z0, tol, max_iter)


def newton_polish(coeffs, roots, steps):
    return _active.newton_polish(coeffs, roots, steps)


def inverse_iteration(m, shift, start, iters, floor):
    return _active.inverse_iteration(m, shift, start, iters, floor)
