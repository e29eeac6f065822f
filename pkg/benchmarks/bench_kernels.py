"""Compare the compiled and pure-Python kernel backends.

Times the general eigensolver on random complex symmetric matrices and a
full doorway-model sweep with each available backend::

    python benchmarks/bench_kernels.py --sizes 3 4 6 --matrices 300
"""
import argparse
import time

import numpy as np

from epcluster import kernels
from epcluster.model import preset
from epcluster.spectra import eigen_general
from epcluster.sweep import SweepConfig, run_sweep


def random_symmetric(rng, n):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (m + m.T)


def time_solver(n, count, seed):
    rng = np.random.default_rng(seed)
    mats = [random_symmetric(rng, n) for _ in range(count)]
    t0 = time.perf_counter()
    for m in mats:
        eigen_general(m)
    return (time.perf_counter() - t0) / count


def time_sweep(figure_id, points):
    p = preset(figure_id)
    axis = type(p.axis)(p.axis.name, p.axis.min, p.axis.max, points)
    t0 = time.perf_counter()
    run_sweep(SweepConfig(p.spec, axis))
    return time.perf_counter() - t0


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[3, 4, 6, 8])
    ap.add_argument("--matrices", type=int, default=300)
    ap.add_argument("--sweep", default="fig7-4lev-complex")
    ap.add_argument("--points", type=int, default=401)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args(argv)

    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled backend not built; timing the Python kernels only")
    previous = kernels.backend_name()
    rows = {}
    try:
        for name in backends:
            kernels.set_backend(name)
            rows[name] = [time_solver(n, args.matrices, args.seed) for n in args.sizes]
            rows[name].append(time_sweep(args.sweep, args.points))
    finally:
        kernels.set_backend(previous)

    labels = [f"eigen n={n} [us]" for n in args.sizes] + [f"sweep {args.sweep} [s]"]
    print(f"{'':24}" + "".join(f"{b:>12}" for b in backends) + (f"{'speedup':>10}" if len(backends) > 1 else ""))
    for k, label in enumerate(labels):
        scale = 1.0 if label.startswith("sweep") else 1e6
        vals = [rows[b][k] for b in backends]
        line = f"{label:24}" + "".join(f"{v * scale:12.2f}" for v in vals)
        if len(backends) > 1:
            line += f"{rows['python'][k] / rows['cython'][k]:10.2f}"
        print(line)


if __name__ == "__main__":
    main()
