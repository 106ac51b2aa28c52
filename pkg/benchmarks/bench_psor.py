"""Compare the compiled projected-SOR kernel against the pure-numpy fallback.

Run from the repository root:

    python3 benchmarks/bench_psor.py [--sizes 2,4,8,16] [--repeats 50]

Both backends are timed on the same random positive-definite box problems
and their solutions are cross-checked.
"""

import argparse
import time

import numpy as np

from multisurf import _pure

try:
    from multisurf import _psor_cy
except ImportError:
    _psor_cy = None


def random_problem(rng, m):
    A = rng.standard_normal((m, m))
    M = A @ A.T + m * np.eye(m)
    q = rng.standard_normal(m)
    l = -np.ones(m)
    u = np.ones(m)
    return M, q, l, u


def run_backend(sweep, problems, repeats):
    best = np.inf
    zs = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        zs = []
        for M, q, l, u in problems:
            z = np.zeros(len(q))
            sweep(M, q, l, u, z, 1.0, 5000, 1e-12)
            zs.append(z)
        best = min(best, time.perf_counter() - t0)
    return best, zs


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="2,4,8,16")
    ap.add_argument("--repeats", type=int, default=50)
    ap.add_argument("--problems", type=int, default=100)
    args = ap.parse_args()

    if _psor_cy is None:
        print("compiled kernel not built; nothing to compare")
        return

    rng = np.random.default_rng(0)
    print(f"{'m':>4} {'pure [ms]':>12} {'compiled [ms]':>14} {'speedup':>8}"
          f" {'max |dz|':>10}")
    for m in [int(s) for s in args.sizes.split(",")]:
        problems = [random_problem(rng, m) for _ in range(args.problems)]
        t_pure, z_pure = run_backend(_pure.psor_sweeps, problems, args.repeats)
        t_cy, z_cy = run_backend(_psor_cy.psor_sweeps, problems, args.repeats)
        dz = max(np.max(np.abs(a - b)) for a, b in zip(z_pure, z_cy))
        print(f"{m:>4} {1e3 * t_pure:>12.3f} {1e3 * t_cy:>14.3f}"
              f" {t_pure / t_cy:>7.1f}x {dz:>10.2e}")


if __name__ == "__main__":
    main()
