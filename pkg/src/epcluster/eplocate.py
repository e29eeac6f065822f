"""Locating and classifying exceptional points along a parameter path.

Two-level families: with affine curves the squared discriminant
``4 Z(a)**2 = (eps1(a) - eps2(a))**2 + 4 omega**2`` is a quadratic in the
sweep parameter, so coalescences are the solutions of
``eps1(a) - eps2(a) = +-2i omega``.  Real solutions are exceptional points;
solutions slightly off the real axis are reported as near misses.

General families: candidate minima of the pairwise eigenvalue gap (or of the
phase rigidity) on a sweep grid are refined by golden-section search.  Near a
second-order EP the squared gap is analytic and vanishes linearly, so
``gap**2 / |d gap**2 / da|`` estimates the parameter distance to the
coalescence; this distance decides between exact root and near miss.
"""
from __future__ import annotations

import enum
import math
from fractions import Fraction
from dataclasses import dataclass, field

import numpy as np

from epcluster import observables
from epcluster.model import HamiltonianSpec, eval_at
from epcluster.spectra import decompose, discriminant_z

EXACT_IM_TOL = 1e-9
NEAR_MISS_IM_TOL = 1e-2
EXACT_DISTANCE = 1e-9
GOLDEN_WIDTH = 1e-12
GAP_FRACTION = 0.1
R_THRESHOLD = 0.5
COLLINEAR = 0.99
ORTHOGONAL = 0.01
PROBE_STEP = 1e-7
REAL_TOL = 1e-10

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class EpKind(str, enum.Enum):
    EXACT_ROOT = "exact-root"
    NEAR_MISS = "near-miss-minimum"


class Verdict(str, enum.Enum):
    EXCEPTIONAL = "exceptional"
    DIABOLIC = "diabolic"
    AVOIDED = "avoided"
    AMBIGUOUS = "ambiguous"


@dataclass(frozen=True)
class EpLocation:
    a_star: float
    kind: EpKind
    pair: tuple
    min_gap: float
    r_at: float
    distance: float = 0.0
    warning: str = ""

    def to_dict(self):
        d = {
            "a_star": float(self.a_star),
            "kind": self.kind.value,
            "pair": [int(i) + 1 for i in self.pair],
            "min_gap": float(self.min_gap),
            "r_at": float(self.r_at),
            "distance": float(self.distance),
        }
        if self.warning:
            d["warning"] = self.warning
        return d


@dataclass(frozen=True)
class EpReport:
    locations: tuple = ()
    real_spectrum_windows: tuple = ()
    whole_line: bool = False
    method: str = "analytic"

    @property
    def exact(self):
        return tuple(loc for loc in self.locations if loc.kind is EpKind.EXACT_ROOT)

    def to_dict(self):
        return {
            "method": self.method,
            "whole_line_degeneracy": self.whole_line,
            "locations": [loc.to_dict() for loc in self.locations],
            "real_spectrum_windows": [
                [float(lo), float(hi)] for lo, hi in self.real_spectrum_windows
            ],
        }


@dataclass(frozen=True)
class Candidate:
    a: float
    bracket: tuple
    gap: float
    r_min: float
    sources: tuple = field(default=())


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    gap: float
    collinearity: float
    distance: float
    pair: tuple


def coalescence_polynomial(spec: HamiltonianSpec):
    """Coefficients ``(c2, c1, c0)`` of ``4 Z(a)**2`` for a two-level spec."""
    p, q = _detuning(spec)
    w = spec.coupling
    return q * q, 2 * p * q, p * p + 4 * w * w


def coalescence_residual(spec: HamiltonianSpec, a: float) -> float:
    """``|4 Z(a)**2|`` evaluated exactly in rational arithmetic.

    The stored double parameters and ``a`` are taken at face value, so the
    result carries no rounding from the evaluation itself.
    """
    e1, e2 = spec.energy_curves
    g1, g2 = spec.halfwidth_curves
    x = Fraction(a)

    def at(curve):
        return Fraction(curve.intercept) + Fraction(curve.slope) * x

    dr = at(e1) - at(e2)
    di = at(g1) - at(g2)
    wr, wi = Fraction(spec.coupling.real), Fraction(spec.coupling.imag)
    re = dr * dr - di * di + 4 * (wr * wr - wi * wi)
    im = 2 * dr * di + 8 * wr * wi
    return math.hypot(float(re), float(im))


def _detuning(spec):
    if spec.n != 2:
        raise ValueError(f"two-level spec required, got n={spec.n}")
    e1, e2 = spec.energy_curves
    g1, g2 = spec.halfwidth_curves
    p = complex(e1.intercept - e2.intercept, g1.intercept - g2.intercept)
    q = complex(e1.slope - e2.slope, g1.slope - g2.slope)
    return p, q


def _pair_gap(dec):
    vals = dec.eigenvalues
    best, pair = math.inf, (0, 1)
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            g = abs(vals[i] - vals[j])
            if g < best:
                best, pair = g, (i, j)
    return best, pair


def min_gap(spec, a):
    return _pair_gap(decompose(eval_at(spec, a)))[0]


def _r_at(dec, pair=None):
    r = observables.compute(dec).r
    if pair is None:
        return float(r.min())
    return float(min(r[pair[0]], r[pair[1]]))


def coalescence_distance(spec, a, h=PROBE_STEP):
    """Estimated parameter distance from ``a`` to the nearest coalescence."""
    g0 = min_gap(spec, a) ** 2
    if g0 == 0.0:
        return 0.0
    step = h * max(1.0, abs(a))
    slope = max(
        abs(min_gap(spec, a + step) ** 2 - g0),
        abs(min_gap(spec, a - step) ** 2 - g0),
    ) / step
    if slope == 0.0:
        return math.inf
    return g0 / slope


def _real_windows(spec, roots, bounds):
    g1, g2 = spec.halfwidth_curves
    if g1.intercept + g2.intercept != 0 or g1.slope + g2.slope != 0:
        return ()
    lo, hi = bounds if bounds is not None else (-math.inf, math.inf)
    edges = [lo] + [r for r in roots if lo < r < hi] + [hi]
    windows = []
    for left, right in zip(edges[:-1], edges[1:]):
        if math.isinf(left) and math.isinf(right):
            probe = 0.0
        elif math.isinf(left):
            probe = right - 1.0
        elif math.isinf(right):
            probe = left + 1.0
        else:
            probe = 0.5 * (left + right)
        vals = decompose(eval_at(spec, probe)).eigenvalues
        if np.max(np.abs(vals.imag)) < REAL_TOL:
            if windows and windows[-1][1] == left:
                windows[-1] = (windows[-1][0], right)
            else:
                windows.append((left, right))
    return tuple(windows)


def analytic_ep_two_level(spec: HamiltonianSpec, bounds=None) -> EpReport:
    """Exact EP locations of a two-level family.

    Parameters
    ----------
    spec : HamiltonianSpec
        Two-level family.
    bounds : (float, float), optional
        Keep only locations inside this closed interval.
    """
    p, q = _detuning(spec)
    w = spec.coupling
    if q == 0:
        whole = (p * p + 4 * w * w) == 0
        return EpReport((), (), whole_line=bool(whole))
    roots = [(2j * w - p) / q, (-2j * w - p) / q]
    locs = []
    for root in roots:
        im = abs(root.imag)
        if im < EXACT_IM_TOL:
            kind = EpKind.EXACT_ROOT
        elif im <= NEAR_MISS_IM_TOL:
            kind = EpKind.NEAR_MISS
        else:
            continue
        a = float(root.real)
        if bounds is not None and not bounds[0] <= a <= bounds[1]:
            continue
        if any(loc.a_star == a for loc in locs):
            continue
        m = eval_at(spec, a)
        dec = decompose(m)
        locs.append(
            EpLocation(
                a_star=a,
                kind=kind,
                pair=(0, 1),
                min_gap=2 * abs(discriminant_z(m)),
                r_at=_r_at(dec),
                distance=im,
            )
        )
    locs.sort(key=lambda loc: loc.a_star)
    exact = sorted(loc.a_star for loc in locs if loc.kind is EpKind.EXACT_ROOT)
    return EpReport(tuple(locs), _real_windows(spec, exact, bounds))


def _local_minima(values):
    return [
        i
        for i in range(1, len(values) - 1)
        if values[i] < values[i - 1] and values[i] <= values[i + 1]
    ]


def scan_minima(result):
    """Candidate EP brackets from a sweep grid.

    ``result`` needs arrays ``a``, ``min_gap`` and ``min_r`` (a
    :class:`~epcluster.sweep.SweepResult` qualifies).  Local minima of the
    gap below ``GAP_FRACTION`` times its median, and local minima of the
    phase rigidity below ``R_THRESHOLD``, become candidates; overlapping
    brackets are merged.
    """
    a = np.asarray(result.a, dtype=float)
    gap = np.asarray(result.min_gap, dtype=float)
    rmin = np.asarray(result.min_r, dtype=float)
    finite = np.isfinite(gap)
    if not finite.any():
        return []
    limit = GAP_FRACTION * float(np.median(gap[finite]))
    raw = []
    for i in _local_minima(gap):
        if gap[i] < limit:
            raw.append((i, "gap"))
    for i in _local_minima(rmin):
        if rmin[i] < R_THRESHOLD:
            raw.append((i, "rigidity"))
    raw.sort()
    merged = []
    for i, src in raw:
        lo, hi = a[i - 1], a[i + 1]
        if merged and lo <= merged[-1]["hi"]:
            cur = merged[-1]
            cur["hi"] = max(cur["hi"], hi)
            cur["sources"].add(src)
            if gap[i] < gap[cur["i"]]:
                cur["i"] = i
            continue
        merged.append({"lo": lo, "hi": hi, "i": i, "sources": {src}})
    return [
        Candidate(
            a=float(a[c["i"]]),
            bracket=(float(c["lo"]), float(c["hi"])),
            gap=float(gap[c["i"]]),
            r_min=float(rmin[c["i"]]),
            sources=tuple(sorted(c["sources"])),
        )
        for c in merged
    ]


def _golden(f, lo, hi, width):
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > width:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INVPHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INVPHI * (hi - lo)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def _unimodal(values):
    k = int(np.argmin(values))
    left = all(values[i] >= values[i + 1] for i in range(k))
    right = all(values[i] <= values[i + 1] for i in range(k, len(values) - 1))
    return left and right


def refine_ep(spec: HamiltonianSpec, bracket, width=GOLDEN_WIDTH) -> EpLocation:
    """Minimize the smallest pairwise gap inside ``bracket``.

    Returns the best point; ``warning`` is set when the bracket is not
    unimodal or the minimum sits on the bracket edge.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ValueError(f"empty bracket {bracket!r}")
    warning = ""
    probes = np.linspace(lo, hi, 9)
    gaps = [min_gap(spec, x) for x in probes]
    if not _unimodal(gaps):
        warning = "non-unimodal bracket"
    k = int(np.argmin(gaps))
    sub_lo = probes[max(k - 1, 0)]
    sub_hi = probes[min(k + 1, len(probes) - 1)]
    a_best, g_best = _golden(lambda x: min_gap(spec, x), sub_lo, sub_hi, width)
    if gaps[k] < g_best:
        a_best, g_best = float(probes[k]), gaps[k]
    edge = 2 * width + 1e-15 * max(1.0, abs(a_best))
    if not warning and (a_best - lo <= edge or hi - a_best <= edge):
        warning = "minimum at bracket edge"
    dec = decompose(eval_at(spec, a_best))
    g_best, pair = _pair_gap(dec)
    dist = coalescence_distance(spec, a_best)
    kind = EpKind.EXACT_ROOT if dist < EXACT_DISTANCE else EpKind.NEAR_MISS
    return EpLocation(
        a_star=float(a_best),
        kind=kind,
        pair=pair,
        min_gap=float(g_best),
        r_at=_r_at(dec, pair),
        distance=float(dist),
        warning=warning,
    )


def classify(spec: HamiltonianSpec, a_star: float) -> Classification:
    """Exceptional point, diabolic point or avoided crossing at ``a_star``."""
    a_star = float(a_star)
    if not math.isfinite(a_star):
        raise ValueError("a_star must be finite")
    dec = decompose(eval_at(spec, a_star))
    gap, pair = _pair_gap(dec)
    coll = float(observables.compute(dec).collinearity[pair])
    dist = coalescence_distance(spec, a_star)
    if dist >= EXACT_DISTANCE:
        verdict = Verdict.AVOIDED
    elif coll > COLLINEAR:
        verdict = Verdict.EXCEPTIONAL
    elif coll < ORTHOGONAL:
        verdict = Verdict.DIABOLIC
    else:
        verdict = Verdict.AMBIGUOUS
    return Classification(verdict, float(gap), coll, float(dist), pair)


def refine_candidates(spec, candidates):
    locs = [refine_ep(spec, c.bracket) for c in candidates]
    locs.sort(key=lambda loc: loc.a_star)
    return locs


def windows_from_grid(a, eigenvalues, tol=REAL_TOL):
    """Maximal runs of grid points whose eigenvalues are all real."""
    real = np.max(np.abs(np.asarray(eigenvalues).imag), axis=1) < tol
    windows, start = [], None
    for i, flag in enumerate(real):
        if flag and start is None:
            start = i
        if (not flag or i == len(real) - 1) and start is not None:
            end = i if flag else i - 1
            if end > start:
                windows.append((float(a[start]), float(a[end])))
            start = None
    return tuple(windows)
