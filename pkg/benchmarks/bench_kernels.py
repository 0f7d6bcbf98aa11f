"""Compiled vs pure-numpy propagators on one ring trajectory.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--n 4] [--r 7]

Prints wall time per kernel and the largest population difference between
the two paths.  The first compiled call is timed separately (JIT warm-up).
"""

import argparse
import time

import numpy as np

from lzring import _kernels, dynamics, model
from lzring import operators as ops


def trajectory_inputs(n, r):
    h = model.build_hamiltonian(model.CouplingParams(j1=1.0, j2=-1.0, r=r), model.ring_topology(n))
    psi0, _ = dynamics.initial_state(h, -30.0)
    times = dynamics.sample_times(-30.0, 30.0, 2001)
    return h, psi0, times


def call(name, kernel, h, psi0, times, dt):
    psi = psi0.copy()
    pops = np.zeros((len(times), h.dim))
    if name.startswith("split4"):
        mag = ops.spin_signs(h.n).sum(axis=0).astype(np.int64)
        kernel(mag, h.static_diagonal, h.params.r / 2, h.params.g, h.n, psi, times, dt, pops)
    else:
        kernel(h.sweep_diagonal, np.ascontiguousarray(h.C), psi, times, dt, pops)
    return pops


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--r", type=float, default=7.0)
    ap.add_argument("--dt", type=float, default=1e-3)
    args = ap.parse_args()

    h, psi0, times = trajectory_inputs(args.n, args.r)
    print(f"n={args.n} (dim {h.dim}), r={args.r:g}, dt={args.dt:g}, window [-30, 30]")
    if _kernels.numba is None:
        print("numba not installed; only the numpy path is available")

    for method in ("split4", "rk4"):
        numpy_kernel = getattr(_kernels, f"{method}_numpy")
        t_np, pops_np = best_of(lambda: call(method, numpy_kernel, h, psi0, times, args.dt), args.repeat)
        line = f"{method:7s} numpy {t_np * 1e3:9.1f} ms"
        if _kernels.numba is not None:
            jit_kernel = getattr(_kernels, f"{method}_numba")
            t0 = time.perf_counter()
            call(method, jit_kernel, h, psi0, times, args.dt)
            warm = time.perf_counter() - t0
            t_nb, pops_nb = best_of(lambda: call(method, jit_kernel, h, psi0, times, args.dt), args.repeat)
            diff = float(np.max(np.abs(pops_nb - pops_np)))
            line += (f" | numba {t_nb * 1e3:8.1f} ms (first call {warm * 1e3:.0f} ms)"
                     f" | speedup {t_np / t_nb:5.1f}x | max |dpop| {diff:.1e}")
        print(line)


if __name__ == "__main__":
    main()
