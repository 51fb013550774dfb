"""Timing comparison of the numba and numpy kernel backends.

Run as a script:  python benchmarks/bench_kernels.py [--n 2048] [--reps 200]

Each right-hand-side kernel is evaluated on exact self-similar data at
t = 0 (perturbation zero for the similarity kernel); numba functions are
called once beforehand so compilation is not timed.
"""

import argparse
import time

import numpy as np

from skyrme_blowup.kernels import _numpy
from skyrme_blowup.physical import RadialGrid, exact_blowup_angle, \
    exact_blowup_semilinear
from skyrme_blowup.similarity import profile_tables

try:
    from skyrme_blowup.kernels import _numba
except ImportError:
    _numba = None


def build_cases(n):
    grid = RadialGrid(1.0, n)
    r = grid.nodes
    h = grid.spacing
    angle = exact_blowup_angle(grid, 0.0, T=2.0)
    semi = exact_blowup_semilinear(grid, 0.0, T=2.0)
    tables = profile_tables(r)
    phi = 1e-4 * np.exp(-8.0 * r**2)
    return {
        "strong_field_psi": ("strong_field_psi",
                             (angle.field, angle.field_t, r, h)),
        "full_psi": ("full_psi", (angle.field, angle.field_t, r, h, 1.0, 1.0)),
        "semilinear_u": ("semilinear_u", (semi.field, semi.field_t, r, h, 0.05)),
        "similarity": ("similarity",
                       (phi, np.zeros_like(phi), r, h, 0.05) + tables),
    }


def time_call(fn, args, reps):
    fn(*args)  # warm up (numba compilation, caches)
    t0 = time.perf_counter()
    for _ in range(reps):
        fn(*args)
    return (time.perf_counter() - t0) / reps


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=2048)
    parser.add_argument("--reps", type=int, default=200)
    args = parser.parse_args()

    cases = build_cases(args.n)
    print(f"kernel RHS evaluation, n = {args.n}, {args.reps} reps "
          f"(microseconds per call)")
    header = f"{'kernel':<18}{'numpy':>12}"
    if _numba is not None:
        header += f"{'numba':>12}{'speedup':>10}"
    print(header)
    for label, (name, call_args) in cases.items():
        t_np = time_call(getattr(_numpy, name), call_args, args.reps)
        row = f"{label:<18}{t_np * 1e6:>12.1f}"
        if _numba is not None:
            t_nb = time_call(getattr(_numba, name), call_args, args.reps)
            row += f"{t_nb * 1e6:>12.1f}{t_np / t_nb:>10.2f}"
        print(row)
    if _numba is None:
        print("numba not installed; numpy backend only")


if __name__ == "__main__":
    main()
