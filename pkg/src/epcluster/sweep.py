"""Parameter sweeps with state tracking and refinement near coalescences.

A sweep evaluates the Hamiltonian family on a uniform grid, adds the
locations of exceptional points found on the way, bisects intervals where
two eigenvalues come close, and finally follows every state continuously
along the (sorted) grid by eigenvector overlap.
"""
from __future__ import annotations

import heapq
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from epcluster import eplocate, observables
from epcluster.model import HamiltonianSpec, SweepAxis, eval_at
from epcluster.spectra import SolverError, SpectralDecomposition, decompose

log = logging.getLogger(__name__)

MAX_FAILED_FRACTION = 0.05
DISCONTINUITY_OVERLAP = 0.2
# swapping two matched states keeps this share of their overlap -> ambiguous
AMBIGUOUS_SWAP = 0.9
_REFINE_BATCH = 16
GAP_MOTION_FACTOR = 10.0

COLUMN_GROUPS = ("E", "G2", "r", "one_minus_r", "A", "B", "b", "flags")


class SweepError(RuntimeError):
    """Too many grid points could not be solved."""


@dataclass(frozen=True)
class RefineConfig:
    """Bisection refinement settings.

    ``gap_threshold=None`` means ten times the median eigenvalue motion
    between adjacent uniform-grid rows.
    """

    enable: bool = True
    gap_threshold: float | None = None
    max_extra_points: int = 500
    min_width_fraction: float = 1e-6

    def __post_init__(self):
        if self.max_extra_points < 0:
            raise ValueError("max_extra_points must be >= 0")
        if self.gap_threshold is not None and not self.gap_threshold > 0:
            raise ValueError("gap_threshold must be positive")


@dataclass(frozen=True)
class SweepConfig:
    spec: HamiltonianSpec
    axis: SweepAxis
    refine: RefineConfig = field(default_factory=RefineConfig)
    outputs: tuple = COLUMN_GROUPS
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "outputs", tuple(self.outputs))
        unknown = set(self.outputs) - set(COLUMN_GROUPS)
        if unknown:
            raise ValueError(
                f"unknown output columns {sorted(unknown)}; choose from {COLUMN_GROUPS}"
            )
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass
class SweepResult:
    """Tracked trajectories; row ``i`` belongs to parameter ``a[i]``.

    Per-state arrays have shape ``(rows, n)``; ``B``, ``b_abs`` and
    ``collinearity`` have shape ``(rows, n, n)``.  Rows whose solve failed
    hold NaN.
    """

    config: SweepConfig
    a: np.ndarray
    eigenvalues: np.ndarray
    vectors: np.ndarray
    r: np.ndarray
    A: np.ndarray
    B: np.ndarray
    b_abs: np.ndarray
    collinearity: np.ndarray
    flagged: np.ndarray
    flags: list
    ep_report: eplocate.EpReport
    candidates: list
    max_bifurcation_at: float | None = None
    gap_threshold: float = math.nan

    @property
    def n(self):
        return self.eigenvalues.shape[1]

    @property
    def energies(self):
        return self.eigenvalues.real

    @property
    def half_widths(self):
        return self.eigenvalues.imag

    @property
    def min_gap(self):
        return _min_gaps(self.eigenvalues)

    @property
    def min_r(self):
        return np.min(self.r, axis=1)

    @property
    def failed(self):
        return np.array(["solver-failure" in f for f in self.flags])

    @property
    def failed_fraction(self):
        return float(np.mean(self.failed))

    def row_at(self, a):
        """Index of the grid row closest to ``a``."""
        return int(np.argmin(np.abs(self.a - a)))


def _min_gaps(eigenvalues):
    ev = np.asarray(eigenvalues)
    diff = np.abs(ev[:, :, None] - ev[:, None, :])
    n = ev.shape[1]
    diff[:, np.arange(n), np.arange(n)] = np.inf
    return diff.min(axis=(1, 2))


def _solve(spec, a):
    try:
        return decompose(eval_at(spec, a))
    except SolverError as exc:
        log.warning("solver failure at a=%r: %s", a, exc)
        return None


def _solve_many(spec, points, workers):
    if workers == 1:
        return [_solve(spec, a) for a in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda a: _solve(spec, a), points))


def track_states(prev: SpectralDecomposition, cur: SpectralDecomposition):
    """Match the states of ``cur`` to those of ``prev``.

    Returns
    -------
    order : list of int
        ``order[k]`` is the index in ``cur`` continuing state ``k``.
    signs : list of int
        +1 or -1 per tracked state so the vector keeps its orientation.
    discontinuous : bool
        Some matched c-product magnitude fell below ``DISCONTINUITY_OVERLAP``,
        or exchanging two matched states would fit almost as well (the step
        crossed a coalescence and the labels are ambiguous).
    """
    if prev.n != cur.n:
        raise ValueError(f"state count changed: {prev.n} -> {cur.n}")
    pv, cv = prev.vectors, cur.vectors
    overlap = np.abs(pv @ cv.T)
    rows, cols = linear_sum_assignment(overlap, maximize=True)
    order = [int(c) for c in cols[np.argsort(rows)]]
    signs = [
        -1 if np.vdot(pv[k], cv[order[k]]).real < 0 else 1 for k in range(prev.n)
    ]
    matched = overlap[np.arange(prev.n), order]
    jump = bool(np.any(matched < DISCONTINUITY_OVERLAP))
    for k in range(prev.n):
        for l in range(k + 1, prev.n):
            swapped = overlap[k, order[l]] + overlap[l, order[k]]
            if swapped >= AMBIGUOUS_SWAP * (matched[k] + matched[l]):
                jump = True
    return order, signs, jump


def _label_by_basis(dec):
    # first row: state k is the one dominated by unperturbed state k
    weight = np.abs(dec.vectors) ** 2
    rows, cols = linear_sum_assignment(weight.T, maximize=True)
    return dec.permuted([int(c) for c in cols[np.argsort(rows)]])


def _track(decs):
    """Tracked copies of ``decs`` and per-row discontinuity markers."""
    out, jumps = [], []
    prev = None
    for dec in decs:
        if dec is None:
            out.append(None)
            jumps.append(False)
            continue
        if prev is None:
            dec = _label_by_basis(dec)
            out.append(dec)
            jumps.append(False)
            prev = dec
            continue
        order, signs, jump = track_states(prev, dec)
        dec = dec.permuted(order, signs)
        out.append(dec)
        jumps.append(jump)
        prev = dec
    return out, jumps


def _eigen_matrix(decs, n):
    ev = np.full((len(decs), n), np.nan + 1j * np.nan)
    for i, dec in enumerate(decs):
        if dec is not None:
            ev[i] = dec.eigenvalues
    return ev


def _refine(spec, points, decs, threshold, cfg, span, workers):
    """Bisect intervals whose end gaps fall below ``threshold``."""
    gaps = {a: _gap_of(d) for a, d in zip(points, decs)}
    sols = dict(zip(points, decs))
    min_width = cfg.min_width_fraction * span
    heap = []

    def push(lo, hi):
        g = min(gaps[lo], gaps[hi])
        if g < threshold and hi - lo > 2 * min_width:
            heapq.heappush(heap, (g, lo, hi))

    ordered = sorted(points)
    for lo, hi in zip(ordered[:-1], ordered[1:]):
        push(lo, hi)
    added = 0
    while heap and added < cfg.max_extra_points:
        batch = []
        # fixed batch size keeps the refined grid independent of ``workers``
        while heap and len(batch) < _REFINE_BATCH and added + len(batch) < cfg.max_extra_points:
            batch.append(heapq.heappop(heap))
        mids = [0.5 * (lo + hi) for _, lo, hi in batch]
        for (_, lo, hi), mid, dec in zip(batch, mids, _solve_many(spec, mids, workers)):
            sols[mid] = dec
            gaps[mid] = _gap_of(dec)
            added += 1
            push(lo, mid)
            push(mid, hi)
    pts = sorted(sols)
    return pts, [sols[a] for a in pts], added


def _gap_of(dec):
    if dec is None:
        return math.inf
    return float(_min_gaps(dec.eigenvalues[None, :])[0])


def _median_motion(decs):
    tracked, _ = _track(decs)
    good = [d.eigenvalues for d in tracked if d is not None]
    if len(good) < 2:
        return math.nan
    ev = np.array(good)
    motion = np.max(np.abs(np.diff(ev, axis=0)), axis=1)
    return float(np.median(motion))


class _GridView:
    # minimal adapter so scan_minima can read a partially built sweep
    def __init__(self, a, decs, n):
        self.a = np.asarray(a)
        ev = _eigen_matrix(decs, n)
        self.min_gap = np.where(np.isnan(ev).any(axis=1), np.inf, _min_gaps(ev))
        r = np.ones((len(decs), n))
        for i, dec in enumerate(decs):
            if dec is not None:
                r[i] = observables.compute(dec).r
        self.min_r = r.min(axis=1)


def _merge_points(points, decs, extra, spec, workers, tol):
    pts = list(points)
    new = [x for x in extra if all(abs(x - p) > tol for p in pts)]
    if not new:
        return pts, list(decs)
    sols = dict(zip(pts, decs))
    for x, dec in zip(new, _solve_many(spec, new, workers)):
        sols[x] = dec
    pts = sorted(sols)
    return pts, [sols[x] for x in pts]


def _ep_search(spec, axis, points, decs):
    if spec.n == 2:
        report = eplocate.analytic_ep_two_level(spec, bounds=(axis.min, axis.max))
        return report, []
    view = _GridView(points, decs, spec.n)
    candidates = eplocate.scan_minima(view)
    locs = eplocate.refine_candidates(spec, candidates)
    return eplocate.EpReport(tuple(locs), (), method="scan"), candidates


def run_sweep(config: SweepConfig) -> SweepResult:
    """Evaluate, refine, track and measure one sweep.

    Raises
    ------
    SweepError
        When more than 5% of the rows could not be solved.
    """
    spec, axis = config.spec, config.axis
    span = axis.max - axis.min
    points = [float(x) for x in axis.grid()]
    decs = _solve_many(spec, points, config.workers)

    report, candidates = _ep_search(spec, axis, points, decs)
    ep_points = [
        loc.a_star for loc in report.locations if axis.min < loc.a_star < axis.max
    ]
    points, decs = _merge_points(
        points, decs, ep_points, spec, config.workers, 1e-12 * span
    )

    threshold = math.nan
    if config.refine.enable:
        threshold = config.refine.gap_threshold
        if threshold is None:
            threshold = GAP_MOTION_FACTOR * _median_motion(decs)
        if math.isfinite(threshold) and threshold > 0:
            points, decs, added = _refine(
                spec, points, decs, threshold, config.refine, span, config.workers
            )
            log.info("refinement added %d points", added)

    tracked, jumps = _track(decs)
    m, n = len(points), spec.n
    nan = math.nan
    ev = _eigen_matrix(tracked, n)
    vec = np.full((m, n, n), nan + 1j * nan)
    r = np.full((m, n), nan)
    A = np.full((m, n), nan)
    B = np.full((m, n, n), nan + 1j * nan)
    b_abs = np.full((m, n, n), nan)
    coll = np.full((m, n, n), nan)
    flagged = np.zeros((m, n), dtype=bool)
    flags = []
    ep_set = set(ep_points)
    for i, dec in enumerate(tracked):
        row_flags = []
        if dec is None:
            flags.append(("solver-failure",))
            continue
        obs = observables.compute(dec)
        vec[i], r[i], A[i], B[i] = dec.vectors, obs.r, obs.A, obs.B
        b_abs[i], coll[i], flagged[i] = obs.b_abs, obs.collinearity, obs.flagged
        if obs.flagged.any():
            row_flags.append("coalescent")
        if jumps[i]:
            row_flags.append("discontinuity")
        if points[i] in ep_set:
            row_flags.append("ep-location")
        flags.append(tuple(row_flags))

    failed = sum(1 for d in tracked if d is None)
    if failed > MAX_FAILED_FRACTION * m:
        raise SweepError(f"{failed} of {m} grid points failed to solve")

    if spec.n > 2:
        windows = eplocate.windows_from_grid(np.array(points), ev)
        report = eplocate.EpReport(report.locations, windows, method=report.method)

    result = SweepResult(
        config=config,
        a=np.array(points),
        eigenvalues=ev,
        vectors=vec,
        r=r,
        A=A,
        B=B,
        b_abs=b_abs,
        collinearity=coll,
        flagged=flagged,
        flags=flags,
        ep_report=report,
        candidates=candidates,
        gap_threshold=threshold,
    )
    result.max_bifurcation_at = max_width_bifurcation(result)
    return result


def _interior_maxima(values):
    return [
        i
        for i in range(1, len(values) - 1)
        if values[i] > values[i - 1] and values[i] >= values[i + 1]
    ]


def max_width_bifurcation(result: SweepResult):
    """Parameter of the strongest interior maximum of the width or energy spread.

    Returns ``None`` when neither spread has an interior maximum.
    """
    ok = ~np.isnan(result.eigenvalues).any(axis=1)
    a = result.a[ok]
    ev = result.eigenvalues[ok]
    if len(a) < 3:
        return None
    best_value, best_a = -math.inf, None
    for part in (ev.imag, ev.real):
        spread = part.max(axis=1) - part.min(axis=1)
        for i in _interior_maxima(spread):
            if spread[i] > best_value:
                best_value, best_a = spread[i], float(a[i])
    return best_a
