"""Parameterized non-Hermitian Hamiltonian families.

Two families are supported:

* the complex symmetric two-level matrix with diagonal entries
  ``eps_i = e_i + i gamma_i / 2`` and a single coupling ``omega``;
* the N-level doorway matrix in which state 1 couples to every other state
  through ``omega`` and all other off-diagonal entries vanish.

Every energy ``e_i`` and half-width ``gamma_i / 2`` is an affine function of
one real sweep parameter.  Half-widths are negative for decaying states and
positive for gain.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class ModelError(ValueError):
    """Invalid Hamiltonian definition."""


class UnknownPresetError(KeyError):
    """Requested figure preset does not exist."""

    def __init__(self, figure_id):
        self.figure_id = figure_id
        super().__init__(
            f"unknown preset {figure_id!r}; valid ids: {', '.join(PRESET_IDS)}"
        )

    def __str__(self):
        return self.args[0]


def _finite(value, what):
    if isinstance(value, complex):
        ok = math.isfinite(value.real) and math.isfinite(value.imag)
    else:
        ok = math.isfinite(value)
    if not ok:
        raise ModelError(f"{what} must be finite, got {value!r}")


@dataclass(frozen=True)
class ParamCurve:
    """Affine trajectory ``value(a) = intercept + slope * a``."""

    intercept: float
    slope: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "intercept", float(self.intercept))
        object.__setattr__(self, "slope", float(self.slope))
        _finite(self.intercept, "curve intercept")
        _finite(self.slope, "curve slope")

    def value(self, a):
        return self.intercept + self.slope * a

    @classmethod
    def coerce(cls, obj):
        if isinstance(obj, ParamCurve):
            return obj
        if isinstance(obj, (tuple, list)):
            return cls(*obj)
        return cls(float(obj))


class Topology(str, enum.Enum):
    FULL_2X2 = "full-2x2"
    DOORWAY = "doorway"


@dataclass(frozen=True)
class HamiltonianSpec:
    """A family of complex symmetric matrices indexed by a real parameter.

    Attributes
    ----------
    energy_curves : tuple of ParamCurve
        Unperturbed energies ``e_i(a)``.
    halfwidth_curves : tuple of ParamCurve
        Unperturbed half-widths ``gamma_i(a) / 2``.
    coupling : complex
        Coupling ``omega`` through the common continuum; not swept.
    topology : Topology
    """

    energy_curves: tuple
    halfwidth_curves: tuple
    coupling: complex
    topology: Topology

    def __post_init__(self):
        e = tuple(ParamCurve.coerce(c) for c in self.energy_curves)
        g = tuple(ParamCurve.coerce(c) for c in self.halfwidth_curves)
        object.__setattr__(self, "energy_curves", e)
        object.__setattr__(self, "halfwidth_curves", g)
        object.__setattr__(self, "coupling", complex(self.coupling))
        object.__setattr__(self, "topology", Topology(self.topology))
        _finite(self.coupling, "coupling omega")
        if len(e) != len(g):
            raise ModelError(
                f"{len(e)} energy curves but {len(g)} half-width curves"
            )
        if len(e) < 2:
            raise ModelError(f"need at least 2 states, got {len(e)}")
        if self.topology is Topology.FULL_2X2 and len(e) != 2:
            raise ModelError("full-2x2 topology requires exactly 2 states")

    @property
    def n(self):
        return len(self.energy_curves)

    def diagonal(self, a):
        """Unperturbed complex energies ``e_i(a) + i gamma_i(a)/2``."""
        return np.array(
            [
                complex(e.value(a), g.value(a))
                for e, g in zip(self.energy_curves, self.halfwidth_curves)
            ]
        )

    def at(self, a):
        return eval_at(self, a)


def build_two_level(e1, e2, g1, g2, omega):
    """Two-level spec; ``g1``, ``g2`` are half-width curves ``gamma_i / 2``."""
    return HamiltonianSpec((e1, e2), (g1, g2), omega, Topology.FULL_2X2)


def build_n_level(energies: Sequence, halfwidths: Sequence, omega, n=None):
    """Doorway spec: ``omega`` couples state 1 to each state ``j = 2..n``."""
    if n is not None and (len(energies) != n or len(halfwidths) != n):
        raise ModelError(
            f"n={n} but got {len(energies)} energies and {len(halfwidths)} half-widths"
        )
    if len(energies) < 2:
        raise ModelError(f"doorway model needs n >= 2, got {len(energies)}")
    return HamiltonianSpec(tuple(energies), tuple(halfwidths), omega, Topology.DOORWAY)


def eval_at(spec: HamiltonianSpec, a: float) -> np.ndarray:
    """Concrete matrix of ``spec`` at parameter ``a`` (read-only array)."""
    a = float(a)
    _finite(a, "sweep parameter")
    n = spec.n
    m = np.zeros((n, n), dtype=complex)
    m[np.diag_indices(n)] = spec.diagonal(a)
    w = spec.coupling
    # full-2x2 and doorway coincide for n = 2
    for j in range(1, n):
        m[0, j] = w
        m[j, 0] = w
    m.flags.writeable = False
    return m


@dataclass(frozen=True)
class SweepAxis:
    name: str
    min: float
    max: float
    points: int = 1001

    def __post_init__(self):
        object.__setattr__(self, "min", float(self.min))
        object.__setattr__(self, "max", float(self.max))
        object.__setattr__(self, "points", int(self.points))
        _finite(self.min, "axis min")
        _finite(self.max, "axis max")
        if not self.min < self.max:
            raise ModelError(f"axis min ({self.min}) must be < max ({self.max})")
        if self.points < 3:
            raise ModelError(f"axis needs at least 3 points, got {self.points}")

    def grid(self):
        return np.linspace(self.min, self.max, self.points)


@dataclass(frozen=True)
class Preset:
    figure_id: str
    spec: HamiltonianSpec
    axis: SweepAxis
    description: str = ""


def _two(e1, e2, g1, g2, w):
    return build_two_level(e1, e2, g1, g2, w)


C = ParamCurve

# Table rows: (e1, e2, gamma1/2, gamma2/2, omega, axis, range, caption)
_PRESETS = {
    "fig1a-d": (
        _two(C(2 / 3), C(2 / 3, 1.0), C(-0.5), C(-0.5), 0.05j),
        ("d", -0.3, 0.3), "two EPs, imaginary coupling: width bifurcation",
    ),
    "fig1e-h": (
        _two(C(0.5), C(0.5), C(-0.5), C(0.0, -0.5), 0.05),
        ("a", 0.4, 1.6), "two EPs, real coupling: level repulsion",
    ),
    "fig2a-d": (
        _two(C(2 / 3), C(2 / 3, 1.0), C(-0.5), C(-0.55), 0.025 * (1 + 1j)),
        ("d", -0.15, 0.25), "complex coupling, single EP, width bifurcation",
    ),
    "fig2e-h": (
        _two(C(0.55), C(0.5), C(-0.5), C(0.0, -0.5), 0.025 * (1 + 1j)),
        ("a", 0.4, 1.6), "complex coupling, single EP, level repulsion",
    ),
    "fig3a-d": (
        _two(C(0.5), C(0.5), C(0.0, 0.05), C(0.0, -0.05), 0.05),
        ("a", -3.0, 3.0), "balanced loss and gain, real spectrum between EPs",
    ),
    "fig3e-h": (
        _two(C(0.55), C(0.5), C(0.0, 0.05), C(0.0, -0.05), 0.025 * (1 + 1j)),
        ("a", -1.5, 1.5), "loss and gain with complex coupling",
    ),
    "fig4a-e": (
        _two(C(0.5), C(0.0, 1.0), C(-0.05), C(-0.06), 0.05 * (0.1 + 1j)),
        ("a", 0.0, 1.0), "almost imaginary coupling, mixing coefficients",
    ),
    "fig4f-j": (
        _two(C(0.5), C(0.51), C(-0.5), C(0.0, -0.3), 0.05 * (1 + 0.1j)),
        ("a", 0.0, 3.0), "almost real coupling, mixing coefficients",
    ),
    "fig5-2lev": (
        build_n_level(
            [C(1.0, -0.5), C(0.0, 1.0)], [C(-0.495), C(-0.495)], 0.01j
        ),
        ("a", 0.4, 0.95), "two states, imaginary coupling",
    ),
    "fig5-3lev": (
        build_n_level(
            [C(1.0, -0.5), C(0.0, 1.0), C(-1 / 3, 1.5)],
            [C(-0.495), C(-0.495), C(-0.4853)],
            0.01j,
        ),
        ("a", 0.4, 0.95), "three states, imaginary coupling: EP clustering",
    ),
    "fig6-2lev": (
        build_n_level(
            [C(0.5), C(0.0, 1.0)], [C(-0.5), C(-0.51)], 0.005 * (1 + 1j)
        ),
        ("a", 0.4, 0.95), "two states, complex coupling",
    ),
    "fig6-3lev": (
        build_n_level(
            [C(0.5), C(0.0, 1.0), C(-0.5, 2.0)],
            [C(-0.5), C(-0.505), C(-0.51)],
            0.005 * (1 + 1j),
        ),
        ("a", 0.4, 0.95), "three states, complex coupling",
    ),
    "fig7-4lev-imag": (
        build_n_level(
            [C(1.0, -0.5), C(0.0, 1.0), C(-1 / 3, 1.5), C(2 / 3)],
            [C(-0.495), C(-0.495), C(-0.4853), C(-0.495)],
            0.01j,
        ),
        ("a", 0.4, 0.95), "four states, imaginary coupling",
    ),
    "fig7-4lev-complex": (
        build_n_level(
            [C(0.5), C(0.0, 1.0), C(-0.5, 2.0), C(1.0, -1.0)],
            [C(-0.5), C(-0.505), C(-0.51), C(-0.505)],
            0.005 * (1 + 1j),
        ),
        ("a", 0.4, 0.95), "four states, complex coupling",
    ),
}

PRESET_IDS = tuple(_PRESETS)
TABLE_PRESET_IDS = PRESET_IDS[:8]


def preset(figure_id: str) -> Preset:
    """Hamiltonian family and default sweep axis of a figure."""
    try:
        spec, (name, lo, hi), caption = _PRESETS[figure_id]
    except KeyError:
        raise UnknownPresetError(figure_id) from None
    return Preset(figure_id, spec, SweepAxis(name, lo, hi), caption)
