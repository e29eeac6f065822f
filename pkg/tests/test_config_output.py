import csv
import io

import numpy as np
import pytest
import yaml
from hypothesis import given
from hypothesis import strategies as st

from epcluster.config import ConfigError, config_to_dict, dump_config, parse_config
from epcluster.model import PRESET_IDS, preset
from epcluster.output import (
    comparable_manifest,
    csv_columns,
    csv_text,
    ep_report_dict,
    fmt,
    manifest_dict,
    plot_script,
)
from epcluster.sweep import RefineConfig, SweepConfig, run_sweep
from epcluster.model import SweepAxis

GOOD = """\
topology: doorway
omega_re: 0.0
omega_im: 0.01
states:
  - {e_intercept: 1.0, e_slope: -0.5, g2_intercept: -0.495}
  - {e_intercept: 0.0, e_slope: 1.0, g2_intercept: -0.495}
  - {e_intercept: -0.3333333333333333, e_slope: 1.5, g2_intercept: -0.4853}
sweep: {axis_name: a, min: 0.4, max: 0.95, points: 101}
refine: {enable: false}
"""


def test_parse_good_config():
    cfg = parse_config(GOOD)
    assert cfg.spec.n == 3
    assert cfg.spec.coupling == 0.01j
    assert cfg.axis.points == 101
    assert not cfg.refine.enable
    assert cfg.spec == preset("fig5-3lev").spec


@pytest.mark.parametrize("figure_id", PRESET_IDS)
def test_preset_configs_round_trip(figure_id):
    p = preset(figure_id)
    cfg = SweepConfig(p.spec, p.axis)
    assert parse_config(dump_config(cfg)) == cfg


@pytest.mark.parametrize(
    "patch, field, line",
    [
        (("points: 101", "points: 1.5"), "sweep.points", 8),
        (("min: 0.4", "min: 2.0"), "sweep.max", 8),
        (("e_slope: -0.5", "e_slop: -0.5"), "states[0].e_slop", 5),
        (("topology: doorway", "topology: ring"), "topology", 1),
        (("omega_im: 0.01", "omega_im: high"), "omega_im", 3),
        (("refine: {enable: false}", "refine: {enable: 3}"), "refine.enable", 9),
        (("refine: {enable: false}", "refine: {gap_threshold: -1}"), "refine.gap_threshold", 9),
    ],
)
def test_config_diagnostics(patch, field, line):
    with pytest.raises(ConfigError) as err:
        parse_config(GOOD.replace(*patch))
    assert err.value.field == field
    assert err.value.line == line
    assert f"line {line}" in str(err.value)


def test_config_structural_errors():
    for text in ["", "[1, 2]", "states: 3", "a: [", GOOD + "extra: 1\n", GOOD.replace("  - {e_intercept: 0.0", "  - {e_intercept: 0.0, bogus: 1")]:
        with pytest.raises(ConfigError):
            parse_config(text)


def test_config_n_cross_check():
    with pytest.raises(ConfigError) as err:
        parse_config("n: 2\n" + GOOD)
    assert err.value.field == "n"


def test_full_2x2_needs_two_states():
    with pytest.raises(ConfigError):
        parse_config(GOOD.replace("topology: doorway", "topology: full-2x2"))


def test_output_selection():
    cfg = parse_config(GOOD + "outputs: [E, r]\n")
    assert cfg.outputs == ("E", "r")
    with pytest.raises(ConfigError):
        parse_config(GOOD + "outputs: [E, x]\n")


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_fmt_round_trips(x):
    s = fmt(x)
    assert float(s) == x
    assert len(s.split("e")[0].replace("-", "").replace(".", "")) == 17


def test_fmt_special():
    assert fmt(float("inf")) == "inf"
    assert fmt(float("nan")) == "nan"
    assert fmt(0.5) == "5.0000000000000000e-01"


def test_columns_layout():
    cols = csv_columns(2, ("E", "G2", "r", "one_minus_r", "A", "B", "b", "flags"))
    assert cols == [
        "a", "E_1", "E_2", "G2_1", "G2_2", "r_1", "r_2", "one_minus_r_1", "one_minus_r_2",
        "A_1", "A_2", "B_12", "b_11", "b_12", "b_21", "b_22", "flags",
    ]
    four = csv_columns(4, ("b",))
    assert len(four) == 17


@pytest.fixture(scope="module")
def small():
    p = preset("fig3a-d")
    return run_sweep(SweepConfig(p.spec, SweepAxis("a", -3, 3, 121)))


def test_csv_matches_result(small):
    rows = list(csv.reader(io.StringIO(csv_text(small))))
    header, body = rows[0], rows[1:]
    assert len(body) == len(small.a)
    assert all(len(r) == len(header) for r in body)
    i = small.row_at(1.0)
    rec = dict(zip(header, body[i]))
    assert float(rec["a"]) == 1.0
    assert rec["r_1"] == fmt(0.0) and rec["A_1"] == "inf"
    assert "coalescent" in rec["flags"].split(";")
    np.testing.assert_array_equal([float(r[header.index("E_2")]) for r in body], small.energies[:, 1])


def test_ep_report_document(small):
    doc = yaml.safe_load(yaml.safe_dump(ep_report_dict(small)))
    assert [loc["a_star"] for loc in doc["locations"]] == [-1.0, 1.0]
    assert {loc["classification"] for loc in doc["locations"]} == {"exceptional"}
    assert doc["real_spectrum_windows"] == [[-1.0, 1.0]]


def test_manifest_deterministic_apart_from_timestamp(small):
    a = manifest_dict(small, {"preset": "fig3a-d"}, "x.csv", timestamp="t1")
    b = manifest_dict(small, {"preset": "fig3a-d"}, "x.csv", timestamp="t2")
    assert a != b
    assert comparable_manifest(a) == comparable_manifest(b)
    assert a["config"] == config_to_dict(small.config)
    assert a["rows"] == len(small.a)


def test_plot_script_references_columns(small):
    text = plot_script(small, "fig3a-d.csv", title="fig3a-d")
    assert "set datafile separator ','" in text
    assert text.count("plot '") == 4
    assert "using 1:2 with lines" in text  # E_1


def test_plot_script_respects_outputs():
    p = preset("fig1a-d")
    res = run_sweep(SweepConfig(p.spec, SweepAxis("d", -0.3, 0.3, 31), RefineConfig(enable=False), outputs=("r",)))
    text = plot_script(res, "x.csv")
    assert text.count("plot '") == 1
    assert csv_text(res).splitlines()[0] == "a,r_1,r_2"
