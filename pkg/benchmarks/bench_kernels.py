"""Time the numba and numpy kernels side by side.

    python benchmarks/bench_kernels.py [--resolution 160] [--repeat 20]

Kernel timings call both modules directly; the end-to-end timing runs a short
scatterer simulation in a subprocess per backend (the backend is fixed at
import time through PECFDTD_BACKEND).
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from pecfdtd import _numba_kernels, _numpy_kernels
from pecfdtd.boundary import Closure, GaussianPulse
from pecfdtd.grid import unit_grid

E2E = """
import time
from pecfdtd.config import parse_config
from pecfdtd.emcore import run
cfg = parse_config("[grid]\\nresolution={n}\\n[solver]\\nt_end=0.2\\n[pec]\\ntype=disk\\n[wave]\\ntype=plane\\n")
run(parse_config("[grid]\\nresolution=20\\n[solver]\\nt_end=0.05\\n[pec]\\ntype=disk\\n"))  # warm up
t = time.perf_counter()
run(cfg)
print(time.perf_counter() - t)
"""


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def sweep_case(n):
    g = unit_grid(n, pad=10)
    clo = Closure(g, wave=GaussianPulse())
    rng = np.random.default_rng(0)
    fields = [rng.normal(size=g.shape) for _ in range(3)]
    dt = g.dx
    args = (*fields, ~clo.edge, clo.pml, *clo.incident_ring(0.0), *clo.coefficients(dt))
    psi = [np.zeros(g.shape) for _ in range(4)]
    return lambda k: k.theta_sweep(*args, *psi, dt, 0.5 / g.dx, 0.5 / g.dy, 1.0, False)


def transport_case(rows):
    rng = np.random.default_rng(1)
    k, m = rows, rows // 2
    nbr = rng.integers(0, k + m, size=(k, 4))
    cx = rng.uniform(-0.1, 0.1, k)
    cy = rng.uniform(-0.1, 0.1, k)
    vals = rng.normal(size=(k + m, 3))
    return lambda kern: kern.transport(vals.copy(), nbr, cx, cy, 60, 0.0)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--resolution", type=int, default=160)
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--skip-e2e", action="store_true")
    args = ap.parse_args(argv)

    cases = [(f"theta_sweep 1/{args.resolution}", sweep_case(args.resolution)),
             ("transport 4000 rows x 60 it", transport_case(4000))]
    print(f"{'kernel':<30} {'numba':>10} {'numpy':>10} {'speedup':>8}")
    for name, case in cases:
        case(_numba_kernels)  # compile outside the timed region
        t_nb = best_of(lambda: case(_numba_kernels), args.repeat)
        t_np = best_of(lambda: case(_numpy_kernels), args.repeat)
        print(f"{name:<30} {1e3 * t_nb:8.2f}ms {1e3 * t_np:8.2f}ms {t_np / t_nb:7.1f}x")

    if not args.skip_e2e:
        times = {}
        for backend in ("numba", "numpy"):
            env = dict(os.environ, PECFDTD_BACKEND=backend)
            out = subprocess.run([sys.executable, "-c", E2E.format(n=args.resolution)], env=env,
                                 capture_output=True, text=True, check=True)
            times[backend] = float(out.stdout.strip().splitlines()[-1])
        print(f"{'disk/plane run to T=0.2':<30} {times['numba']:9.2f}s {times['numpy']:9.2f}s "
              f"{times['numpy'] / times['numba']:7.1f}x")


if __name__ == "__main__":
    main()
