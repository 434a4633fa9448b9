"""Benchmark the Wigner point-evaluation kernel: numba jit vs pure numpy.

Evaluates W on a square lattice for a mid-size density matrix with both
backends, checks they agree, and reports timings. Run directly:

    python3 benchmarks/bench_wigner.py [--dim 18] [--points 160000]
"""

import argparse
import time

import numpy as np

from pbsim._kernels import (HAS_NUMBA, kernel_coefficients,
                            wigner_batch_numpy)
from pbsim.phase_states import pb_eigenstate
from pbsim.fock import FockDensity


def make_inputs(dim, points):
    state = pb_eigenstate(dim - 1, 0)
    rho = FockDensity.from_pure(state).matrix
    n = int(np.sqrt(points))
    qs, ps = np.meshgrid(np.linspace(-6, 6, n), np.linspace(-6, 6, n),
                         indexing="ij")
    return np.ascontiguousarray(rho), qs.ravel(), ps.ravel()


def timed(fn, *args, repeats=3):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return out, best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dim", type=int, default=18)
    ap.add_argument("--points", type=int, default=160000)
    args = ap.parse_args()

    rho, qs, ps = make_inputs(args.dim, args.points)
    coef = kernel_coefficients(args.dim)
    print(f"dim={args.dim}, {qs.size} lattice points")

    w_np, t_np = timed(wigner_batch_numpy, rho, coef, qs, ps)
    print(f"numpy backend:  {t_np:.3f} s")

    if not HAS_NUMBA:
        print("numba not installed; nothing to compare")
        return

    from pbsim._kernels import _wigner_batch_jit

    t0 = time.perf_counter()
    _wigner_batch_jit(rho, coef, qs[:4], ps[:4])
    print(f"jit compile:    {time.perf_counter() - t0:.3f} s (one-time)")

    w_nb, t_nb = timed(_wigner_batch_jit, rho, coef, qs, ps)
    print(f"numba backend:  {t_nb:.3f} s")
    print(f"speedup:        {t_np / t_nb:.1f}x")

    err = np.abs(w_np - w_nb).max()
    print(f"max |diff|:     {err:.3e}")
    if err > 1e-12:
        raise SystemExit("backends disagree")


if __name__ == "__main__":
    main()
