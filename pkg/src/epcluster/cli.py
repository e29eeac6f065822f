"""Command-line interface.

Exit codes: 0 success, 1 sweep failure, 2 bad input (unknown preset,
malformed config, bad flags), 3 output path not writable.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

import yaml

from epcluster import __version__, kernels
from epcluster.config import ConfigError, dump_config, load_config
from epcluster.eplocate import analytic_ep_two_level, classify
from epcluster.model import PRESET_IDS, ModelError, SweepAxis, UnknownPresetError, preset
from epcluster.output import (
    csv_text,
    ep_report_text,
    manifest_dict,
    manifest_text,
    plot_script,
)
from epcluster.sweep import SweepConfig, SweepError, run_sweep

log = logging.getLogger("epcluster")

EXIT_OK, EXIT_FAILURE, EXIT_INPUT, EXIT_IO = 0, 1, 2, 3


class _InputError(Exception):
    pass


def _add_grid_flags(p):
    p.add_argument("--points", type=int, help="uniform grid points")
    p.add_argument("--min", type=float, dest="a_min", help="sweep start")
    p.add_argument("--max", type=float, dest="a_max", help="sweep end")


def _add_common(p, refine=True):
    p.add_argument("--out", default=".", help="output directory (default: .)")
    if refine:
        p.add_argument(
            "--refine",
            action=argparse.BooleanOptionalAction,
            default=None,
            help="bisection refinement near small gaps (default: on)",
        )
    p.add_argument(
        "--seedless",
        action="store_true",
        help="accepted for compatibility; runs never use random numbers",
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="epcluster",
        description="Exceptional points, phase rigidity and sweeps of "
        "non-Hermitian complex symmetric Hamiltonians.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reproduce", help="run a preset sweep and write its files")
    p.add_argument("figure_id", nargs="?", help="preset id (see 'presets')")
    p.add_argument("--preset", help="preset id, alternative to the positional form")
    _add_grid_flags(p)
    _add_common(p)

    p = sub.add_parser("sweep", help="run a sweep from a YAML config")
    p.add_argument("--config", required=True, help="YAML config path")
    _add_grid_flags(p)
    _add_common(p)

    p = sub.add_parser("locate-ep", help="find exceptional points")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", help="preset id")
    src.add_argument("--config", help="YAML config path")
    _add_grid_flags(p)
    _add_common(p)

    p = sub.add_parser("presets", help="list presets")
    p.add_argument("--export", metavar="ID", help="print the YAML config of a preset")

    sub.add_parser("info", help="version and kernel backend")
    return parser


def _override(config, args):
    axis = config.axis
    if args.points is None and args.a_min is None and args.a_max is None:
        new_axis = axis
    else:
        try:
            new_axis = SweepAxis(
                axis.name,
                axis.min if args.a_min is None else args.a_min,
                axis.max if args.a_max is None else args.a_max,
                axis.points if args.points is None else args.points,
            )
        except ModelError as exc:
            raise _InputError(str(exc)) from None
    refine = config.refine
    if getattr(args, "refine", None) is not None:
        refine = dataclasses.replace(refine, enable=args.refine)
    return dataclasses.replace(config, axis=new_axis, refine=refine)


def _preset_config(figure_id):
    p = preset(figure_id)
    return SweepConfig(p.spec, p.axis), {"preset": figure_id}


def _file_config(path):
    try:
        cfg = load_config(path)
    except OSError as exc:
        raise _InputError(f"cannot read config {path}: {exc.strerror}") from None
    return cfg, {"config": str(path)}


def _write(out_dir, files):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, text in files:
        path = out / name
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        paths.append(path)
    return paths


def _summary_lines(result):
    lines = [f"rows: {len(result.a)} (states: {result.n})"]
    lines += _ep_table(result.config.spec, result.ep_report)
    mb = result.max_bifurcation_at
    lines.append(f"max width bifurcation / level repulsion at: {'none' if mb is None else f'{mb:.6g}'}")
    return lines


def _ep_table(spec, report):
    if not report.locations:
        lines = ["none found in range"]
    else:
        lines = [f"{'a_star':>16}  {'kind':<18} {'pair':<6} {'min_gap':>10} {'r_at':>10}  class"]
        for loc in report.locations:
            verdict = classify(spec, loc.a_star).verdict.value
            pair = f"{loc.pair[0] + 1},{loc.pair[1] + 1}"
            lines.append(
                f"{loc.a_star:16.10f}  {loc.kind.value:<18} {pair:<6} "
                f"{loc.min_gap:10.3e} {loc.r_at:10.3e}  {verdict}"
            )
    if report.whole_line:
        lines.append("degenerate along the whole line")
    for lo, hi in report.real_spectrum_windows:
        lines.append(f"real spectrum window: ({lo:.10g}, {hi:.10g})")
    return lines


def _run_and_write(config, source, stem, out_dir):
    result = run_sweep(config)
    csv_name = f"{stem}.csv"
    manifest = manifest_dict(result, source, csv_name)
    paths = _write(
        out_dir,
        [
            (csv_name, csv_text(result)),
            (f"{stem}.ep.txt", ep_report_text(result)),
            (f"{stem}.plot", plot_script(result, csv_name, title=stem)),
            (f"{stem}.manifest.txt", manifest_text(manifest)),
        ],
    )
    for line in _summary_lines(result):
        print(line)
    for path in paths:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_reproduce(args):
    figure_id = args.preset or args.figure_id
    if figure_id is None:
        raise _InputError("a preset id is required")
    if args.preset and args.figure_id and args.preset != args.figure_id:
        raise _InputError("conflicting preset ids")
    config, source = _preset_config(figure_id)
    return _run_and_write(_override(config, args), source, figure_id, args.out)


def cmd_sweep(args):
    config, source = _file_config(args.config)
    return _run_and_write(_override(config, args), source, Path(args.config).stem, args.out)


def cmd_locate(args):
    if args.preset:
        config, _ = _preset_config(args.preset)
        stem = args.preset
    else:
        config, _ = _file_config(args.config)
        stem = Path(args.config).stem
    config = _override(config, args)
    spec, axis = config.spec, config.axis
    if spec.n == 2:
        report = analytic_ep_two_level(spec, bounds=(axis.min, axis.max))
        doc = report.to_dict()
        for loc, entry in zip(report.locations, doc["locations"]):
            entry["classification"] = classify(spec, loc.a_star).verdict.value
        text = yaml.safe_dump(doc, sort_keys=False)
    else:
        result = run_sweep(config)
        report = result.ep_report
        text = ep_report_text(result)
    print(f"method: {report.method}")
    for line in _ep_table(spec, report):
        print(line)
    (path,) = _write(args.out, [(f"{stem}.ep.txt", text)])
    print(f"wrote {path}")
    return EXIT_OK


def cmd_presets(args):
    if args.export:
        config, _ = _preset_config(args.export)
        sys.stdout.write(dump_config(config))
        return EXIT_OK
    for pid in PRESET_IDS:
        p = preset(pid)
        ax = p.axis
        print(f"{pid:<18} n={p.spec.n}  {ax.name} in [{ax.min:g}, {ax.max:g}]  {p.description}")
    return EXIT_OK


def cmd_info(args):
    print(f"epcluster {__version__}")
    print(f"kernel backend: {kernels.backend_name()}")
    print(f"available backends: {', '.join(kernels.available_backends())}")
    return EXIT_OK


_COMMANDS = {
    "reproduce": cmd_reproduce,
    "sweep": cmd_sweep,
    "locate-ep": cmd_locate,
    "presets": cmd_presets,
    "info": cmd_info,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return _COMMANDS[args.command](args)
    except UnknownPresetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConfigError, _InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SweepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
