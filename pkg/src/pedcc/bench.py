"""Wall-clock comparison of analytic and charge-model generation."""
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional

from pedcc.generator import ChargeSimConfig, charge_relax, generate_pedcc, pairwise_cosine_deviation


@dataclass
class BenchRecord:
    method: str
    k: int
    n: int
    wall_time_seconds: float
    max_cosine_deviation: float
    iterations_used: Optional[int] = None

    def as_dict(self):
        return asdict(self)


def time_analytic(k, n, seed, backend=None):
    t0 = time.perf_counter()
    pedcc = generate_pedcc(k, n, seed, backend=backend)
    elapsed = time.perf_counter() - t0
    return BenchRecord("analytic", k, n, elapsed, pedcc.max_cosine_deviation())


def time_iterative(k, n, seed, iters, backend=None):
    """Charge model with a fixed budget of ``iters`` steps (no early stop)."""
    cfg = ChargeSimConfig(max_iters=iters, stop_displacement=0.0, seed=seed)
    t0 = time.perf_counter()
    run = charge_relax(k, n, cfg, backend=backend)
    elapsed = time.perf_counter() - t0
    dev = pairwise_cosine_deviation(run.points) if k <= n + 1 else float("nan")
    return BenchRecord("iterative", k, n, elapsed, dev, run.iterations)


def _cell(args):
    k, n, seed, iters, backend = args
    return time_analytic(k, n, seed, backend), time_iterative(k, n, seed, iters, backend)


def run_bench(ks, dims, seed=0, iters=10000, parallel=False, backend=None):
    """Both methods for every ``(k, n)`` cell, ordered by ``dims`` then ``ks``.

    Returns a flat list of records, analytic first in each cell.
    """
    cells = [(k, n, seed, iters, backend) for n in dims for k in ks]
    if parallel:
        with ProcessPoolExecutor() as pool:
            pairs = list(pool.map(_cell, cells))
    else:
        pairs = [_cell(c) for c in cells]
    return [rec for pair in pairs for rec in pair]


def speedups(records):
    """``iterative / analytic`` wall time per cell, keyed by ``(k, n)``."""
    by_cell = {}
    for rec in records:
        by_cell.setdefault((rec.k, rec.n), {})[rec.method] = rec.wall_time_seconds
    return {
        cell: t["iterative"] / max(t["analytic"], 1e-12)
        for cell, t in by_cell.items()
        if "analytic" in t and "iterative" in t
    }


def format_table(records):
    sp = speedups(records)
    head = f"{'k':>5} {'n':>6} {'method':>10} {'seconds':>12} {'max|cos+1/(k-1)|':>18} {'iters':>7} {'speedup':>9}"
    out = [head, "-" * len(head)]
    for rec in records:
        iters = "" if rec.iterations_used is None else str(rec.iterations_used)
        speed = f"{sp[(rec.k, rec.n)]:.1f}x" if rec.method == "iterative" else ""
        out.append(
            f"{rec.k:>5} {rec.n:>6} {rec.method:>10} {rec.wall_time_seconds:>12.6f} "
            f"{rec.max_cosine_deviation:>18.3e} {iters:>7} {speed:>9}"
        )
    return "\n".join(out)
