"""Exceptional points and biorthogonal observables of non-Hermitian Hamiltonians."""

__version__ = "0.1.0"

from epcluster.model import (  # noqa: E402
    HamiltonianSpec,
    ModelError,
    ParamCurve,
    PRESET_IDS,
    SweepAxis,
    Topology,
    UnknownPresetError,
    build_n_level,
    build_two_level,
    eval_at,
    preset,
)
from epcluster.spectra import (  # noqa: E402
    SolverError,
    SpectralDecomposition,
    c_normalize,
    decompose,
    eigen_2x2_analytic,
    eigen_general,
)
from epcluster.observables import compute as compute_observables  # noqa: E402
from epcluster.eplocate import (  # noqa: E402
    EpReport,
    analytic_ep_two_level,
    classify,
    refine_ep,
    scan_minima,
)
from epcluster.sweep import (  # noqa: E402
    RefineConfig,
    SweepConfig,
    SweepResult,
    max_width_bifurcation,
    run_sweep,
    track_states,
)

__all__ = [
    "EpReport",
    "HamiltonianSpec",
    "ModelError",
    "PRESET_IDS",
    "ParamCurve",
    "RefineConfig",
    "SolverError",
    "SpectralDecomposition",
    "SweepAxis",
    "SweepConfig",
    "SweepResult",
    "Topology",
    "UnknownPresetError",
    "analytic_ep_two_level",
    "build_n_level",
    "build_two_level",
    "c_normalize",
    "classify",
    "compute_observables",
    "decompose",
    "eigen_2x2_analytic",
    "eigen_general",
    "eval_at",
    "max_width_bifurcation",
    "preset",
    "refine_ep",
    "run_sweep",
    "scan_minima",
    "track_states",
]
