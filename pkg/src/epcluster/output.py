"""Files written for a sweep: CSV table, YAML sidecars and a gnuplot script.

Numbers are formatted with 17 significant digits (``'.16e'``), so a CSV
round-trips every double exactly and identical runs give identical bytes.
"""
from __future__ import annotations

import csv
import datetime as _dt
import io
import math

import numpy as np
import yaml

from epcluster import __version__, kernels
from epcluster.config import config_to_dict
from epcluster.eplocate import classify
from epcluster.sweep import SweepResult

NONDETERMINISTIC_KEY = "nondeterministic"


def fmt(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".16e")


def csv_columns(n, outputs):
    """Header names for ``n`` states and the selected column groups."""
    idx = range(1, n + 1)
    pairs = [(i, j) for i in idx for j in idx if i < j]
    groups = {
        "E": [f"E_{k}" for k in idx],
        "G2": [f"G2_{k}" for k in idx],
        "r": [f"r_{k}" for k in idx],
        "one_minus_r": [f"one_minus_r_{k}" for k in idx],
        "A": [f"A_{k}" for k in idx],
        "B": [f"B_{i}{j}" if n < 10 else f"B_{i}_{j}" for i, j in pairs],
        "b": [f"b_{k}{l}" if n < 10 else f"b_{k}_{l}" for k in idx for l in idx],
        "flags": ["flags"],
    }
    cols = ["a"]
    for name in ("E", "G2", "r", "one_minus_r", "A", "B", "b", "flags"):
        if name in outputs:
            cols += groups[name]
    return cols


def _row_values(result, i, outputs):
    n = result.n
    iu = np.triu_indices(n, 1)
    vals = [result.a[i]]
    if "E" in outputs:
        vals += list(result.energies[i])
    if "G2" in outputs:
        vals += list(result.half_widths[i])
    if "r" in outputs:
        vals += list(result.r[i])
    if "one_minus_r" in outputs:
        vals += list(1.0 - result.r[i])
    if "A" in outputs:
        vals += list(result.A[i])
    if "B" in outputs:
        vals += list(np.abs(result.B[i])[iu])
    if "b" in outputs:
        vals += list(result.b_abs[i].ravel())
    cells = [fmt(v) for v in vals]
    if "flags" in outputs:
        cells.append(";".join(result.flags[i]))
    return cells


def csv_text(result: SweepResult) -> str:
    outputs = result.config.outputs
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(csv_columns(result.n, outputs))
    for i in range(len(result.a)):
        w.writerow(_row_values(result, i, outputs))
    return buf.getvalue()


def ep_report_dict(result: SweepResult) -> dict:
    """EP report with a classification for every location."""
    doc = result.ep_report.to_dict()
    spec = result.config.spec
    for loc, entry in zip(result.ep_report.locations, doc["locations"]):
        c = classify(spec, loc.a_star)
        entry["classification"] = c.verdict.value
        entry["collinearity"] = c.collinearity
    doc["candidates"] = [
        {
            "a": c.a,
            "bracket": list(c.bracket),
            "gap": c.gap,
            "r_min": c.r_min,
            "sources": list(c.sources),
        }
        for c in result.candidates
    ]
    doc["candidate_count"] = len(result.candidates)
    return doc


def ep_report_text(result: SweepResult) -> str:
    return yaml.safe_dump(ep_report_dict(result), sort_keys=False)


def manifest_dict(result: SweepResult, source: dict, csv_name: str, timestamp=None):
    """Sidecar describing how ``csv_name`` was produced.

    Everything except the ``nondeterministic`` block is a function of the
    invocation; compare runs with :func:`comparable_manifest`.
    """
    axis = result.config.axis
    stamp = timestamp or _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return {
        "tool": "epcluster",
        "version": __version__,
        "source": source,
        "csv": csv_name,
        "columns": csv_columns(result.n, result.config.outputs),
        "rows": int(len(result.a)),
        "grid": {
            "axis_name": axis.name,
            "min": axis.min,
            "max": axis.max,
            "uniform_points": axis.points,
        },
        "refine": {
            "enable": result.config.refine.enable,
            "gap_threshold": float(result.gap_threshold),
            "max_extra_points": result.config.refine.max_extra_points,
        },
        "failed_rows": int(np.sum(result.failed)),
        "max_bifurcation_at": result.max_bifurcation_at,
        "config": config_to_dict(result.config),
        "ep_report": result.ep_report.to_dict(),
        "kernel_backend": kernels.backend_name(),
        NONDETERMINISTIC_KEY: {"generated_at": stamp},
    }


def comparable_manifest(doc: dict) -> dict:
    return {k: v for k, v in doc.items() if k != NONDETERMINISTIC_KEY}


def manifest_text(doc: dict) -> str:
    return yaml.safe_dump(doc, sort_keys=False)


def plot_script(result: SweepResult, csv_name: str, title: str = "") -> str:
    """gnuplot script drawing energies, half-widths, r and 1 - r."""
    cols = csv_columns(result.n, result.config.outputs)
    axis_name = result.config.axis.name
    panels = [
        ("E", "E_", "energies E_k"),
        ("G2", "G2_", "half-widths Gamma_k/2"),
        ("r", "r_", "phase rigidity r_k"),
        ("one_minus_r", "one_minus_r_", "1 - r_k"),
    ]
    panels = [p for p in panels if p[0] in result.config.outputs]
    lines = [
        "# gnuplot script; run with: gnuplot -persist <this file>",
        "set datafile separator ','",
        "set key autotitle columnheader",
        f"set xlabel '{axis_name}'",
    ]
    if title:
        lines.append(f"set multiplot layout 2,2 title '{title}'")
    else:
        lines.append("set multiplot layout 2,2")
    for group, prefix, label in panels:
        lines.append(f"set title '{label}'")
        series = [
            f"'{csv_name}' using 1:{cols.index(prefix + str(k)) + 1} with lines"
            for k in range(1, result.n + 1)
        ]
        if group == "one_minus_r":
            lines.append("# 1 - r spans decades near coalescences; try: set logscale y")
        lines.append("plot " + ", \\\n     ".join(series))
    lines.append("unset multiplot")
    return "\n".join(lines) + "\n"
