"""Time the numba and numpy paths of each kernel on the same inputs.

Usage: python benchmarks/bench_kernels.py [--repeat N]
The numba timing excludes the first (compiling) call.
"""
import argparse
import timeit

import numpy as np

from qmac import _accel, kernels


def cases():
    rng = np.random.default_rng(0)
    x = rng.uniform(0, 1e4, 200_000)
    p = rng.dirichlet(np.ones(4096))
    n = 10
    vals = rng.uniform(0, 1, 1 << n).cumsum()
    r = np.linspace(0, 5, 1600)
    theta = np.linspace(1e-9, np.pi / 2 - 1e-9, 400)
    return {
        "g_bits (2e5 points)": ("g_bits", (x,)),
        "shannon_bits (4096 outcomes)": ("shannon_bits", (p,)),
        "polymatroid_slacks (n=10)": ("polymatroid_slacks", (vals, n)),
        "bs_margin_grid (400x1600)": ("bs_margin_grid", (1e3, r, theta, 0.94, 0.09, "amplitude")),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"library backend: {_accel.backend_name()}  numba available: {_accel.NUMBA_AVAILABLE}")
    print(f"{'kernel':32s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}")
    for label, (name, a) in cases().items():
        f_np = getattr(kernels, f"{name}_np")
        t_np = min(timeit.repeat(lambda: f_np(*a), number=1, repeat=args.repeat)) * 1e3
        if _accel.NUMBA_AVAILABLE:
            f_nb = getattr(kernels, f"{name}_nb")
            f_nb(*a)
            t_nb = min(timeit.repeat(lambda: f_nb(*a), number=1, repeat=args.repeat)) * 1e3
            print(f"{label:32s} {t_np:10.3f} {t_nb:10.3f} {t_np / t_nb:7.1f}x")
        else:
            print(f"{label:32s} {t_np:10.3f} {'n/a':>10s} {'':>8s}")


if __name__ == "__main__":
    main()
