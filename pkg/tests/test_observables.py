import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from epcluster import observables as obs
from epcluster.model import eval_at, preset
from epcluster.spectra import decompose, eigen_2x2_analytic
from helpers import random_symmetric


def at(figure_id, a):
    return decompose(eval_at(preset(figure_id).spec, a))


def hermitian(rng, n):
    m = rng.normal(size=(n, n))
    return (m + m.T).astype(complex)


def test_hermitian_limit(rng):
    for n in (2, 3, 5):
        dec = decompose(hermitian(rng, n))
        rec = obs.compute(dec)
        np.testing.assert_allclose(rec.r, 1.0, atol=1e-12)
        np.testing.assert_allclose(rec.A, 1.0, atol=1e-12)
        off = ~np.eye(n, dtype=bool)
        assert rec.B_abs[off].max() < 1e-10
        assert rec.collinearity[off].max() < 1e-10


def test_fig1_d0_full_mixing():
    rec = obs.compute(at("fig1a-d", 0.0))
    assert np.all(rec.r == 1.0)
    assert rec.B_abs[0, 1] < 1e-15
    np.testing.assert_allclose(rec.b_abs, 1 / math.sqrt(2), atol=1e-15)


def test_fig1_d012_closed_form():
    rec = obs.compute(at("fig1a-d", 0.12))
    np.testing.assert_allclose(rec.r, oracles.FIG1_D012_R, rtol=1e-12)
    np.testing.assert_allclose(rec.A, oracles.FIG1_D012_A, rtol=1e-12)
    assert rec.B_abs[0, 1] == pytest.approx(oracles.FIG1_D012_B, rel=1e-12)
    assert abs(rec.B[0, 1].real) < 1e-10
    for row in rec.b_abs:
        np.testing.assert_allclose(sorted(row, reverse=True), oracles.FIG1_D012_B_ROW, rtol=1e-12)


def test_numpy_brute_force_d012():
    m = eval_at(preset("fig1a-d").spec, 0.12)
    _, v = np.linalg.eig(m)
    for k in range(2):
        x = v[:, k] / np.sqrt(np.sum(v[:, k] ** 2))
        assert 1 / np.vdot(x, x).real == pytest.approx(oracles.FIG1_D012_R, rel=1e-12)


def test_flagged_sentinels():
    dec = at("fig3a-d", 1.0)
    rec = obs.compute(dec)
    assert np.all(rec.flagged)
    assert np.all(rec.r == 0.0)
    assert np.all(np.isinf(rec.A))
    assert np.all(np.isfinite(rec.b_abs))


def test_diagonal_mixing_identity():
    dec = decompose(np.diag([0.1 - 0.2j, 0.4, -0.3 - 0.1j]))
    np.testing.assert_allclose(np.sort(obs.mixing_coeffs(dec), axis=1), np.sort(np.eye(3), axis=1), atol=1e-12)


def test_chiral_pair_collinear():
    # coalesced states differ by a factor +-i
    assert obs.collinearity([1, 1j], [1j, -1]) == pytest.approx(1.0)
    # (i, 1) = i (1, -i) has the opposite chirality
    assert obs.collinearity([1, 1j], [1j, 1]) == 0.0
    assert obs.collinearity([1, 0], [0, 1]) == 0.0


def test_collinearity_rises_toward_ep():
    spec = preset("fig1a-d").spec
    ds = np.linspace(0.2, 0.1 + 1e-6, 40)
    c = [obs.compute(decompose(eval_at(spec, d))).collinearity[0, 1] for d in ds]
    assert np.all(np.diff(c) > 0)
    assert c[-1] > 0.99


def test_wrappers_consistent():
    dec = at("fig2a-d", 0.2)
    rec = obs.compute(dec)
    np.testing.assert_array_equal(obs.phase_rigidity(dec), rec.r)
    np.testing.assert_array_equal(obs.norm_a(dec), rec.A)
    np.testing.assert_array_equal(obs.overlaps_b(dec), np.abs(rec.B))
    np.testing.assert_array_equal(obs.ep_proximity(dec), rec.collinearity)
    np.testing.assert_array_equal(rec.one_minus_r, 1 - rec.r)


def check_invariants(dec, n):
    rec = obs.compute(dec)
    ok = ~rec.flagged
    assert np.all((rec.r >= 0) & (rec.r <= 1))
    assert np.all(np.abs(rec.r * rec.A - 1)[ok] < 1e-12)
    assert np.all(np.abs(np.sum(rec.b_abs**2, axis=1) - rec.A)[ok] < 1e-10)
    assert np.all(rec.A[ok] >= 1 - 1e-12)
    assert np.all((rec.collinearity >= 0) & (rec.collinearity <= 1))
    if n == 2 and ok.all():
        assert abs(rec.r[0] - rec.r[1]) < 1e-10
        assert abs(rec.B[0, 1].real) < 1e-8
        assert abs(rec.B[0, 1] + rec.B[1, 0]) < 1e-8


@given(st.integers(0, 2**32 - 1))
def test_two_level_properties(seed):
    m = random_symmetric(np.random.default_rng(seed), 2)
    check_invariants(eigen_2x2_analytic(m), 2)


@given(st.integers(0, 2**32 - 1), st.sampled_from([3, 4, 6]))
def test_n_level_properties(seed, n):
    m = random_symmetric(np.random.default_rng(seed), n)
    check_invariants(decompose(m), n)


def test_n_level_overlaps_not_purely_imaginary(rng):
    # the antisymmetric, purely imaginary Hermitian overlap is a two-level fact
    dec = decompose(random_symmetric(rng, 3))
    B = obs.compute(dec).B
    off = ~np.eye(3, dtype=bool)
    assert np.abs(B.real[off]).max() > 1e-3


@pytest.mark.parametrize("figure_id", ["fig1a-d", "fig1e-h", "fig2e-h", "fig3e-h", "fig4f-j", "fig6-2lev"])
def test_two_level_equal_rigidity_along_sweep(figure_id):
    p = preset(figure_id)
    for a in p.axis.grid()[::10]:
        dec = decompose(eval_at(p.spec, a))
        check_invariants(dec, 2)
