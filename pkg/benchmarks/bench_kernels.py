"""Timing comparison of the batched peak-search paths.

Builds the Monte Carlo workload of the vertical-array localization
experiment (estimator matrix, separable grid factors, per-trial noise)
and times the pure-numpy loop against the compiled kernel on identical
inputs. Run:

    python3 benchmarks/bench_kernels.py [--trials N] [--repeats R]
"""

import argparse
import time

import numpy as np

import wgimage as wg
from wgimage import _kernels
from wgimage.experiments import _trial_noise


def build_workload(trials):
    ms = wg.solve_modes(wg.HomogeneousDD(L=20.0), 1.0)
    src = wg.PointSource(100.0, 7.7)
    sm = wg.sensing_matrix(ms, wg.vertical_line(20))
    a_o = wg.source_amplitudes(ms, src)
    p = sm.B @ a_o
    s_meas = 1e-6 * np.abs(p).max()
    eps = s_meas * np.sqrt(a_o.size) / np.linalg.norm(a_o)
    G = (sm.V * wg.Tikhonov(eps).filter(sm.s)) @ sm.U.conj().T
    grid = wg.default_grid(ms)
    E = np.exp(1j * np.outer(grid.x, ms.beta))
    PT = np.ascontiguousarray(ms.profile_matrix(grid.z).T, dtype=complex)
    W = np.empty((trials, p.size), dtype=complex)
    for t in range(trials):
        W[t] = _trial_noise(p.size, s_meas, 2024, t)
    return G, p, W, ms.beta, E, PT


def timeit(fn, args, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    work = build_workload(args.trials)
    nx, nz = work[4].shape[0], work[5].shape[1]
    print(f"workload: {args.trials} trials, {nx}x{nz} grid, "
          f"{work[0].shape[1]} receivers, {work[0].shape[0]} modes")

    t_np, out_np = timeit(_kernels.peak_search_numpy, work, args.repeats)
    print(f"numpy : {t_np * 1e3:8.2f} ms  "
          f"({t_np / args.trials * 1e6:.1f} us/trial)")

    if not _kernels.HAVE_NUMBA:
        print("numba : not installed, skipping")
        return
    _kernels.warmup()
    t_nb, out_nb = timeit(_kernels.peak_search_numba, work, args.repeats)
    same = np.array_equal(out_np, out_nb)
    print(f"numba : {t_nb * 1e3:8.2f} ms  "
          f"({t_nb / args.trials * 1e6:.1f} us/trial)")
    print(f"speedup {t_np / t_nb:.1f}x, outputs identical: {same}")


if __name__ == "__main__":
    main()
