"""Compare the numba and numpy variants of each hot kernel.

    python benchmarks/bench_kernels.py [--repeat 3]

Prints the best wall time of each variant and the largest difference
between their outputs.  Compilation happens before timing.
"""
import argparse
import time

import numpy as np

from indexconst import _accel, kernels
from indexconst.slepian import gauss_legendre


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases():
    x_si = np.linspace(-400.0, 400.0, 1_000_000)
    # one n=50 design probe samples about 60k points
    x_phi = np.arange(1.35, 160.0, 0.005)
    rule = gauss_legendre(200)
    mat = kernels.nystrom_matrix_numpy(rule.nodes, rule.weights, 2.86821)
    start = np.sqrt(rule.weights)
    a = np.linspace(-1, 1, 20001)
    return [
        ("si (1e6 points)",
         lambda: kernels.si_numpy(x_si), lambda: kernels.si_numba(x_si)),
        (f"phi_matrix ({x_phi.size} x 51)",
         lambda: kernels.phi_matrix_numpy(x_phi, 50), lambda: kernels.phi_matrix_numba(x_phi, 50)),
        ("nystrom_matrix (200)",
         lambda: kernels.nystrom_matrix_numpy(rule.nodes, rule.weights, 2.86821),
         lambda: kernels.nystrom_matrix_numba(rule.nodes, rule.weights, 2.86821)),
        ("power_iteration (200)",
         lambda: kernels.power_iteration_numpy(mat, start.copy(), 1e-12, 10000)[0],
         lambda: kernels.power_iteration_numba(mat, start.copy(), 1e-12, 10000)[0]),
        ("bott_norms (20001)",
         lambda: kernels.bott_norms_numpy(a, 1.0), lambda: kernels.bott_norms_numba(a, 1.0)),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    kernels.warmup()
    print(f"{'kernel':<28}{'numpy s':>10}{'numba s':>10}{'speedup':>9}{'max diff':>11}")
    for name, f_np, f_nb in cases():
        f_nb()
        t_np, out_np = best_of(f_np, args.repeat)
        t_nb, out_nb = best_of(f_nb, args.repeat)
        diff = float(np.max(np.abs(np.asarray(out_np) - np.asarray(out_nb))))
        print(f"{name:<28}{t_np:>10.4f}{t_nb:>10.4f}{t_np / t_nb:>8.1f}x{diff:>11.1e}")


if __name__ == "__main__":
    main()
