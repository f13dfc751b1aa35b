"""Compare the compiled and numpy kernel backends.

Times modified Gram-Schmidt on an ``n x n`` Gaussian matrix and a fixed
number of charge-model steps, once per backend, best of ``--repeat``.

    python3 benchmarks/bench_backends.py --n 1000 --k 100 --dim 300 --iters 2000
"""
import argparse
import time

import numpy as np

from pedcc.generator import ChargeSimConfig, charge_relax
from pedcc.kernels import BACKENDS
from pedcc.linalg import gram_schmidt_orthonormalize


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=1000, help="MGS matrix size")
    p.add_argument("--k", type=int, default=100, help="charge-model point count")
    p.add_argument("--dim", type=int, default=300, help="charge-model dimension")
    p.add_argument("--iters", type=int, default=2000, help="charge-model steps")
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)

    m = np.random.default_rng(0).standard_normal((args.n, args.n))
    cfg = ChargeSimConfig(max_iters=args.iters, stop_displacement=0.0)
    rows = []
    for name in sorted(BACKENDS):
        t_mgs, q = best_of(lambda: gram_schmidt_orthonormalize(m, backend=name), args.repeat)
        t_cm, run = best_of(lambda: charge_relax(args.k, args.dim, cfg, backend=name), args.repeat)
        rows.append((name, t_mgs, t_cm, run.points))
        print(f"{name:>8}  mgs(n={args.n}) {t_mgs:8.4f}s   "
              f"charge(k={args.k}, n={args.dim}, {run.iterations} steps) {t_cm:8.4f}s")
    if len(rows) == 2:
        (a, ma, ca, pa), (b, mb, cb, pb) = rows
        print(f"{a}/{b} time ratio: mgs {ma / mb:.2f}, charge {ca / cb:.2f}; "
              f"max point difference {np.max(np.abs(pa - pb)):.2e}")
    else:
        print("compiled backend not built; only the numpy fallback was timed")


if __name__ == "__main__":
    main()
