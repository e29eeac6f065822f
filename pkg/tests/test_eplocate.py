import numpy as np
import pytest
import yaml
from hypothesis import given
from hypothesis import strategies as st

import oracles
from epcluster import eplocate as ep
from epcluster.model import ParamCurve as C
from epcluster.model import SweepAxis, build_n_level, build_two_level, eval_at, preset
from epcluster.spectra import decompose, discriminant_z
from epcluster.sweep import RefineConfig, SweepConfig, run_sweep


@pytest.mark.parametrize("figure_id", sorted(oracles.EP_LOCATIONS))
def test_analytic_golden_locations(figure_id):
    report = ep.analytic_ep_two_level(preset(figure_id).spec)
    got = [loc.a_star for loc in report.exact]
    np.testing.assert_allclose(got, oracles.EP_LOCATIONS[figure_id], atol=1e-12)
    assert [loc.a_star for loc in report.locations] == sorted(loc.a_star for loc in report.locations)
    for loc in report.exact:
        assert loc.r_at < 1e-6
        assert ep.classify(preset(figure_id).spec, loc.a_star).verdict is ep.Verdict.EXCEPTIONAL


def test_fig2_partner_root_not_reported():
    report = ep.analytic_ep_two_level(preset("fig2a-d").spec)
    assert len(report.locations) == 1


def test_polynomial_matches_discriminant():
    spec = preset("fig4f-j").spec
    c2, c1, c0 = ep.coalescence_polynomial(spec)
    for a in np.linspace(-1, 3, 9):
        four_z2 = 4 * discriminant_z(eval_at(spec, a)) ** 2
        assert abs((c2 * a + c1) * a + c0 - four_z2) < 1e-15


def test_real_coupling_never_coalesces():
    spec = build_two_level(C(0.5), C(0.0, 1.0), -0.5, -0.5, 0.05)
    assert ep.analytic_ep_two_level(spec).locations == ()


def test_imaginary_coupling_equal_widths():
    spec = build_two_level(C(0.3), C(0.0, 1.0), -0.2, -0.2, 0.07j)
    got = [loc.a_star for loc in ep.analytic_ep_two_level(spec).exact]
    np.testing.assert_allclose(got, [0.3 - 0.14, 0.3 + 0.14], atol=1e-14)


def test_real_coupling_equal_energies():
    # half-width difference must reach +-2 omega
    spec = build_two_level(C(0.5), C(0.5), C(-0.5), C(0.0, -0.5), 0.03)
    got = [loc.a_star for loc in ep.analytic_ep_two_level(spec).exact]
    np.testing.assert_allclose(got, [1 - 0.12, 1 + 0.12], atol=1e-14)


def test_near_miss_reported_with_distance():
    spec = build_two_level(C(0.0), C(0.0, 1.0), -0.5, -0.5 + 1e-4, 0.05j)
    locs = ep.analytic_ep_two_level(spec).locations
    assert [loc.kind for loc in locs] == [ep.EpKind.NEAR_MISS] * 2
    np.testing.assert_allclose([loc.a_star for loc in locs], [-0.1, 0.1], atol=1e-12)
    np.testing.assert_allclose([loc.distance for loc in locs], 1e-4, rtol=1e-9)


def test_whole_line_degeneracy():
    # binary-exact values: half-width difference 0.125 = 2 omega
    spec = build_two_level(C(0.5), C(0.5), -0.5, -0.625, 0.0625)
    report = ep.analytic_ep_two_level(spec)
    assert report.whole_line and report.locations == ()


def test_constant_detuning_without_degeneracy():
    report = ep.analytic_ep_two_level(build_two_level(C(0.5), C(0.2), -0.5, -0.5, 0.05))
    assert not report.whole_line and report.locations == ()


def test_bounds_filter():
    spec = preset("fig1a-d").spec
    got = [loc.a_star for loc in ep.analytic_ep_two_level(spec, bounds=(0.0, 0.3)).locations]
    assert got == [0.1]


def test_fig3_real_window():
    p = preset("fig3a-d")
    assert ep.analytic_ep_two_level(p.spec).real_spectrum_windows == ((-1.0, 1.0),)
    bounded = ep.analytic_ep_two_level(p.spec, bounds=(p.axis.min, p.axis.max))
    assert bounded.real_spectrum_windows == ((-1.0, 1.0),)
    assert ep.analytic_ep_two_level(preset("fig3e-h").spec).real_spectrum_windows == ()


def test_fig3_window_regimes_on_grid():
    p = preset("fig3a-d")
    for a in np.linspace(-3, 3, 1201):
        widths = np.abs(decompose(eval_at(p.spec, a)).eigenvalues.imag)
        if abs(a) < 1:
            assert widths.max() < 1e-10
        elif abs(a) > 1.05:
            assert widths.max() > 1e-3


def test_two_ep_symmetry():
    a, b = (loc.a_star for loc in ep.analytic_ep_two_level(preset("fig1a-d").spec).exact)
    assert abs(a + b) < 1e-9


def test_root_substitution_squared_tolerance():
    # |4 Z(a_star)**2| < 1e-18, evaluated exactly in rational arithmetic
    bad = {}
    for figure_id in oracles.EP_LOCATIONS:
        spec = preset(figure_id).spec
        for loc in ep.analytic_ep_two_level(spec).exact:
            res = ep.coalescence_residual(spec, loc.a_star)
            if not res < 1e-18:
                bad[(figure_id, loc.a_star)] = res
    assert not bad, f"root substitution above 1e-18: {bad}"


def test_exact_root_discriminant_bound():
    bad = {}
    for figure_id in oracles.EP_LOCATIONS:
        spec = preset(figure_id).spec
        for loc in ep.analytic_ep_two_level(spec).exact:
            # exact evaluation: |Z| = sqrt(|4 Z**2|) / 2
            z = ep.coalescence_residual(spec, loc.a_star) ** 0.5 / 2
            if not z < 1e-10:
                bad[(figure_id, loc.a_star)] = z
    assert not bad, f"|Z(a_star)| above 1e-10: {bad}"


def test_coalescence_residual_exact_roots():
    assert ep.coalescence_residual(preset("fig1a-d").spec, 0.1) == 0.0
    assert ep.coalescence_residual(preset("fig3a-d").spec, -1.0) == 0.0
    assert ep.coalescence_residual(preset("fig1a-d").spec, 0.0) == pytest.approx(0.01)


def test_refine_fig1():
    loc = ep.refine_ep(preset("fig1a-d").spec, (0.05, 0.15))
    assert loc.a_star == pytest.approx(0.1, abs=1e-6)
    assert loc.kind is ep.EpKind.EXACT_ROOT
    assert loc.warning == ""


def test_refine_fig2():
    loc = ep.refine_ep(preset("fig2a-d").spec, (0.0, 0.1))
    assert loc.a_star == pytest.approx(0.05, abs=1e-6)
    assert loc.kind is ep.EpKind.EXACT_ROOT


def test_refine_far_from_ep():
    loc = ep.refine_ep(preset("fig1a-d").spec, (0.2, 0.3))
    assert loc.kind is ep.EpKind.NEAR_MISS
    assert loc.min_gap > 1e-3
    assert loc.warning


def test_refine_non_unimodal_warns():
    loc = ep.refine_ep(preset("fig1a-d").spec, (-0.17, 0.15))
    assert loc.warning == "non-unimodal bracket"
    assert abs(abs(loc.a_star) - 0.1) < 1e-6


def test_refine_rejects_empty_bracket():
    with pytest.raises(ValueError):
        ep.refine_ep(preset("fig1a-d").spec, (0.1, 0.1))


def test_classify_diabolic():
    spec = build_two_level(C(0.5), C(0.0, 1.0), -0.3, -0.3, 0.0)
    c = ep.classify(spec, 0.5)
    assert c.verdict is ep.Verdict.DIABOLIC
    assert c.gap == 0.0 and c.collinearity < 0.01


def test_classify_fig1():
    spec = preset("fig1a-d").spec
    assert ep.classify(spec, 0.1).verdict is ep.Verdict.EXCEPTIONAL
    avoided = ep.classify(spec, 0.0)
    assert avoided.verdict is ep.Verdict.AVOIDED
    assert avoided.gap == pytest.approx(0.1, abs=1e-12)


def test_classify_rejects_non_finite():
    with pytest.raises(ValueError):
        ep.classify(preset("fig1a-d").spec, float("inf"))


def test_classify_n_level_diabolic():
    # decoupled third state crossing a doorway partner
    spec = build_n_level([C(0.0), C(0.5), C(0.0, 1.0)], [C(-0.1), C(-0.2), C(-0.2)], 0.0)
    assert ep.classify(spec, 0.5).verdict is ep.Verdict.DIABOLIC


def _sweep(figure_id, points=None, refine=True):
    p = preset(figure_id)
    axis = p.axis if points is None else SweepAxis(p.axis.name, p.axis.min, p.axis.max, points)
    return run_sweep(SweepConfig(p.spec, axis, RefineConfig(enable=refine)))


@pytest.mark.parametrize("refine", [True, False])
def test_scan_fig1_two_candidates(refine):
    cands = ep.scan_minima(_sweep("fig1a-d", refine=refine))
    assert len(cands) == 2
    for c, target in zip(cands, (-0.1, 0.1)):
        assert c.bracket[0] <= target <= c.bracket[1]


def test_scan_refine_matches_analytic():
    spec = preset("fig1a-d").spec
    locs = ep.refine_candidates(spec, ep.scan_minima(_sweep("fig1a-d", refine=False)))
    np.testing.assert_allclose([loc.a_star for loc in locs], [-0.1, 0.1], atol=1e-6)


def test_scan_hermitian_limit_empty():
    spec = build_n_level([C(0.0, 0.2), C(0.5), C(1.0)], [0.0, 0.0, 0.0], 0.1)
    res = run_sweep(SweepConfig(spec, SweepAxis("a", -1, 1, 401)))
    assert ep.scan_minima(res) == []
    assert res.ep_report.locations == ()
    assert res.ep_report.real_spectrum_windows == ((-1.0, 1.0),)


def test_scan_fig5_clustering_candidates():
    res = _sweep("fig5-3lev")
    cands = ep.scan_minima(res)
    for seed in oracles.FIG5_SEEDS:
        assert any(abs(c.a - seed) < 0.01 for c in cands)


def test_report_serializes():
    report = ep.analytic_ep_two_level(preset("fig3a-d").spec)
    doc = yaml.safe_load(yaml.safe_dump(report.to_dict()))
    assert doc["real_spectrum_windows"] == [[-1.0, 1.0]]
    assert [loc["a_star"] for loc in doc["locations"]] == [-1.0, 1.0]
    assert doc["locations"][0]["pair"] == [1, 2]


def test_windows_from_grid():
    a = np.arange(6.0)
    ev = np.array([[0j, 1j], [0, 1], [0, 2], [1j, 0], [0, 0], [0, 0]])
    assert ep.windows_from_grid(a, ev) == ((1.0, 2.0), (4.0, 5.0))


@given(st.floats(-1, 1), st.floats(0.01, 0.2), st.floats(-0.5, 0.5))
def test_imaginary_coupling_roots_property(e0, w0, g):
    spec = build_two_level(C(e0), C(0.0, 1.0), g, g, 1j * w0)
    got = [loc.a_star for loc in ep.analytic_ep_two_level(spec).exact]
    np.testing.assert_allclose(got, [e0 - 2 * w0, e0 + 2 * w0], atol=1e-12)
    for a in got:
        assert ep.classify(spec, a).verdict is ep.Verdict.EXCEPTIONAL
