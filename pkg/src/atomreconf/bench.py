"""Runtime scaling measurements."""

from __future__ import annotations

import timeit
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from .core import Geometry, Problem
from .exact1d import solve_1d, solve_pairs
from .sim import sample_initial, solve


@dataclass
class BenchRow:
    algo: str
    width: int
    height: int
    n_traps: int
    seconds: float


def fit_loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    slope, _ = np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)
    return float(slope)


def grid_instance(width: int, seed: int, epsilon: float = 0.6) -> Problem:
    """About ``W x W / epsilon`` traps with a centred ``W x W`` target.

    The height is the smallest one whose loading still covers the target.
    """
    height = int(width / epsilon)
    while round(epsilon * width * height) < width * width or height <= width:
        height += 1
    g = Geometry(width, height)
    return Problem.centered(g, sample_initial(g, epsilon, seed), width)


def chain_instance(n: int, seed: int, eta: float = 0.5, epsilon: float = 0.6):
    """Chain of ``n`` traps, ``round(epsilon * n)`` random atoms, centred target of ``eta * n``."""
    rng = np.random.default_rng(seed)
    k = int(round(eta * n))
    sources = sorted(rng.choice(n, size=max(k, int(round(epsilon * n))), replace=False).tolist())
    lo = (n - k) // 2
    return n, sources, list(range(lo, lo + k))


def _timed(fn, *args) -> float:
    # repeat until the total is long enough to time reliably (timeit's
    # autorange); very short single calls run at a different clock rate on
    # some machines, which would bend the fitted slope
    number, total = timeit.Timer(lambda: fn(*args)).autorange()
    return total / number


def benchmark_runtime(algo: str, sizes: Sequence[int], repeats: int = 5, seed: int = 0,
                      expand_chain_paths: bool = False) -> List[BenchRow]:
    """Median wall time per size.

    Grids use width ``size``; ``exact1d`` uses chains of ``size`` traps and
    by default times the assignment and ordering in endpoint form, since
    writing every intermediate vertex costs time proportional to the total
    displacement, which is quadratic on these chains.
    """
    chain_solver = solve_1d if expand_chain_paths else solve_pairs
    rows = []
    for size in sizes:
        times = []
        for r in range(repeats):
            if algo == "exact1d":
                n, s, t = chain_instance(size, seed + r)
                dt = _timed(chain_solver, n, s, t)
                dims = (n, 1)
            else:
                p = grid_instance(size, seed + r)
                dt = _timed(solve, p, algo)
                dims = (p.geometry.width, p.geometry.height)
            times.append(dt)
        rows.append(BenchRow(algo, dims[0], dims[1], dims[0] * dims[1], float(np.median(times))))
    return rows
