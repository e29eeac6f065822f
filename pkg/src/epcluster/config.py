"""YAML sweep configurations.

Example document::

    topology: full-2x2          # or "doorway"
    omega_re: 0.05
    omega_im: 0.0
    states:
      - {e_intercept: 0.5, e_slope: 0.0, g2_intercept: -0.5, g2_slope: 0.0}
      - {e_intercept: 0.5, e_slope: 0.0, g2_intercept: 0.0, g2_slope: -0.5}
    sweep: {axis_name: a, min: 0.4, max: 1.6, points: 1001}
    refine: {enable: true, gap_threshold: null, max_extra_points: 500}

``g2_*`` describe the half-width ``gamma/2``.  ``n`` may be given as a
cross-check on the number of states.
"""
from __future__ import annotations

import yaml

from epcluster.model import (
    HamiltonianSpec,
    ModelError,
    ParamCurve,
    SweepAxis,
    Topology,
)
from epcluster.sweep import COLUMN_GROUPS, RefineConfig, SweepConfig

_TOP_KEYS = {"n", "topology", "omega_re", "omega_im", "states", "sweep", "refine", "outputs"}
_STATE_KEYS = {"e_intercept", "e_slope", "g2_intercept", "g2_slope"}
_SWEEP_KEYS = {"axis_name", "min", "max", "points"}
_REFINE_KEYS = {"enable", "gap_threshold", "max_extra_points"}


class ConfigError(ValueError):
    """Malformed configuration; carries the offending field and line."""

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


def _line_map(node, path=(), out=None):
    # field path -> 1-based line of its value
    if out is None:
        out = {}
    out[path] = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        for key, value in node.value:
            _line_map(value, path + (key.value,), out)
    elif isinstance(node, yaml.SequenceNode):
        for i, value in enumerate(node.value):
            _line_map(value, path + (i,), out)
    return out


class _Reader:
    def __init__(self, lines):
        self.lines = lines

    def fail(self, path, message):
        name = ".".join(str(p) if not isinstance(p, int) else f"[{p}]" for p in path)
        name = name.replace(".[", "[")
        line = None
        for k in range(len(path), -1, -1):
            if path[:k] in self.lines:
                line = self.lines[path[:k]]
                break
        raise ConfigError(message, field=name or None, line=line)

    def mapping(self, obj, path, allowed):
        if not isinstance(obj, dict):
            self.fail(path, "expected a mapping")
        extra = set(obj) - allowed
        if extra:
            self.fail(path + (sorted(map(str, extra))[0],), "unknown field")
        return obj

    def number(self, obj, path, key, default=None, kind=float):
        if key not in obj:
            if default is None:
                self.fail(path + (key,), "missing required field")
            return default
        value = obj[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(path + (key,), f"expected a number, got {value!r}")
        if kind is int and value != int(value):
            self.fail(path + (key,), f"expected an integer, got {value!r}")
        return kind(value)


def parse_config(text: str) -> SweepConfig:
    """Parse a YAML document into a :class:`SweepConfig`.

    Raises
    ------
    ConfigError
        With the field path and line number of the first problem found.
    """
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(
            f"invalid YAML: {getattr(exc, 'problem', exc)}",
            line=mark.line + 1 if mark is not None else None,
        ) from None
    if node is None:
        raise ConfigError("empty configuration")
    rd = _Reader(_line_map(node))
    top = rd.mapping(data, (), _TOP_KEYS)

    topology = top.get("topology", "full-2x2")
    try:
        topology = Topology(topology)
    except ValueError:
        rd.fail(("topology",), f"expected one of {[t.value for t in Topology]}")
    omega = complex(
        rd.number(top, (), "omega_re", 0.0), rd.number(top, (), "omega_im", 0.0)
    )

    states = top.get("states")
    if not isinstance(states, list) or len(states) < 2:
        rd.fail(("states",), "expected a list of at least 2 states")
    energies, widths = [], []
    for i, st in enumerate(states):
        p = ("states", i)
        rd.mapping(st, p, _STATE_KEYS)
        energies.append(
            ParamCurve(rd.number(st, p, "e_intercept"), rd.number(st, p, "e_slope", 0.0))
        )
        widths.append(
            ParamCurve(rd.number(st, p, "g2_intercept"), rd.number(st, p, "g2_slope", 0.0))
        )
    if "n" in top and rd.number(top, (), "n", kind=int) != len(states):
        rd.fail(("n",), f"n={top['n']} but {len(states)} states are listed")
    try:
        spec = HamiltonianSpec(tuple(energies), tuple(widths), omega, topology)
    except ModelError as exc:
        rd.fail(("states",), str(exc))

    sw = rd.mapping(top.get("sweep"), ("sweep",), _SWEEP_KEYS)
    name = sw.get("axis_name", "a")
    if not isinstance(name, str):
        rd.fail(("sweep", "axis_name"), "expected a string")
    lo = rd.number(sw, ("sweep",), "min")
    hi = rd.number(sw, ("sweep",), "max")
    if not lo < hi:
        rd.fail(("sweep", "max"), f"min ({lo}) must be < max ({hi})")
    try:
        axis = SweepAxis(name, lo, hi, rd.number(sw, ("sweep",), "points", 1001, int))
    except ModelError as exc:
        rd.fail(("sweep", "points"), str(exc))

    refine = RefineConfig()
    if "refine" in top:
        rf = rd.mapping(top["refine"], ("refine",), _REFINE_KEYS)
        enable = rf.get("enable", True)
        if not isinstance(enable, bool):
            rd.fail(("refine", "enable"), "expected true or false")
        thr = rf.get("gap_threshold")
        if thr is not None:
            thr = rd.number(rf, ("refine",), "gap_threshold")
            if thr <= 0:
                rd.fail(("refine", "gap_threshold"), "must be positive")
        extra = rd.number(rf, ("refine",), "max_extra_points", 500, int)
        if extra < 0:
            rd.fail(("refine", "max_extra_points"), "must be >= 0")
        refine = RefineConfig(enable, thr, extra)

    outputs = top.get("outputs", list(COLUMN_GROUPS))
    if not isinstance(outputs, list) or not set(outputs) <= set(COLUMN_GROUPS):
        rd.fail(("outputs",), f"expected a list drawn from {list(COLUMN_GROUPS)}")
    return SweepConfig(spec, axis, refine, tuple(outputs))


def load_config(path) -> SweepConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def config_to_dict(config: SweepConfig) -> dict:
    """Plain-data form of ``config``; :func:`parse_config` inverts it."""
    spec, axis, rf = config.spec, config.axis, config.refine
    return {
        "n": spec.n,
        "topology": spec.topology.value,
        "omega_re": spec.coupling.real,
        "omega_im": spec.coupling.imag,
        "states": [
            {
                "e_intercept": e.intercept,
                "e_slope": e.slope,
                "g2_intercept": g.intercept,
                "g2_slope": g.slope,
            }
            for e, g in zip(spec.energy_curves, spec.halfwidth_curves)
        ],
        "sweep": {
            "axis_name": axis.name,
            "min": axis.min,
            "max": axis.max,
            "points": axis.points,
        },
        "refine": {
            "enable": rf.enable,
            "gap_threshold": rf.gap_threshold,
            "max_extra_points": rf.max_extra_points,
        },
        "outputs": list(config.outputs),
    }


def dump_config(config: SweepConfig) -> str:
    return yaml.safe_dump(config_to_dict(config), sort_keys=False)
