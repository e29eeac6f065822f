"""Biorthogonality observables of a spectral decomposition.

All quantities are computed from the same c-normalized vectors in one pass
(:func:`compute`):

* phase rigidity ``r_k = <phi_k*|phi_k> / <phi_k|phi_k> = 1 / A_k``;
* ``A_k = <phi_k|phi_k>`` (1 for orthogonal states, infinite at an EP);
* ``|B_i^j| = |<phi_i|phi_j>|``, Hermitian overlap of two states;
* ``|b_kl| = |phi_k,l|``, mixing of state ``k`` in unperturbed basis state ``l``;
* collinearity ``|<phi_i|phi_j>|**2 / (<phi_i|phi_i> <phi_j|phi_j>)``.

States flagged as coalescent get the sentinels ``r = 0`` and ``A = inf``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from epcluster.spectra import SpectralDecomposition


@dataclass(frozen=True)
class ObservableRecord:
    r: np.ndarray
    A: np.ndarray
    B: np.ndarray
    b_abs: np.ndarray
    collinearity: np.ndarray
    flagged: np.ndarray

    @property
    def B_abs(self):
        return np.abs(self.B)

    @property
    def one_minus_r(self):
        return 1.0 - self.r


def compute(dec: SpectralDecomposition) -> ObservableRecord:
    v = dec.vectors
    gram = v.conj() @ v.T  # gram[i, j] = <phi_i|phi_j>
    b_abs = np.abs(v)
    # <phi_k|phi_k> in the unit basis, from the same magnitudes reported as b
    norms = np.sum(b_abs**2, axis=1)
    flagged = dec.flagged
    A = np.where(flagged, np.inf, norms)
    with np.errstate(divide="ignore"):
        r = np.where(flagged, 0.0, 1.0 / norms)
    r = np.clip(r, 0.0, 1.0)
    coll = np.abs(gram) ** 2 / np.outer(norms, norms)
    np.fill_diagonal(coll, 1.0)
    return ObservableRecord(
        r=r,
        A=A,
        B=gram,
        b_abs=b_abs,
        collinearity=np.clip(coll, 0.0, 1.0),
        flagged=flagged,
    )


def phase_rigidity(dec):
    return compute(dec).r


def norm_a(dec):
    return compute(dec).A


def overlaps_b(dec):
    """``|<phi_i|phi_j>|`` for all pairs (diagonal holds ``A_i``)."""
    return compute(dec).B_abs


def mixing_coeffs(dec):
    """``|b_kl|``: row ``k`` is state ``k`` in the unit basis."""
    return compute(dec).b_abs


def ep_proximity(dec):
    """Pairwise collinearity in ``[0, 1]``; 1 means parallel vectors."""
    return compute(dec).collinearity


def collinearity(u, v):
    """Collinearity of two arbitrary (unnormalized) vectors."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    num = abs(np.vdot(u, v)) ** 2
    return float(min(1.0, num / (np.vdot(u, u).real * np.vdot(v, v).real)))
