"""Brute-force references for tests: minimum matchings and equivalence verdicts."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import InfeasibleError, Vertex, manhattan_distance

log = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 12


@dataclass
class OracleResult:
    weight: int
    matching: List[Tuple[object, object]]


def _exhaustive(sources: Sequence, targets: Sequence, dist: Callable) -> OracleResult:
    # every source is either skipped or given one still-free target; the table
    # is indexed by the set of filled targets
    k = len(targets)
    full = (1 << k) - 1
    INF = float("inf")
    best = [INF] * (1 << k)
    best[0] = 0
    choice: List[dict] = []
    for s in sources:
        nxt = best[:]
        pick = {}
        for mask in range(full + 1):
            if best[mask] == INF:
                continue
            for j in range(k):
                if mask >> j & 1:
                    continue
                m2 = mask | (1 << j)
                c = best[mask] + dist(s, targets[j])
                if c < nxt[m2]:
                    nxt[m2] = c
                    pick[m2] = (mask, j)
        best = nxt
        choice.append((pick, best[:]))
    if best[full] == INF:
        raise InfeasibleError("no matching saturates the targets")
    # walk back through the per-source tables
    matching = []
    mask = full
    for i in range(len(sources) - 1, -1, -1):
        pick, table = choice[i]
        prev_table = choice[i - 1][1] if i > 0 else [0] + [INF] * full
        if prev_table[mask] == table[mask]:
            continue
        pmask, j = pick[mask]
        matching.append((sources[i], targets[j]))
        mask = pmask
    return OracleResult(int(best[full]), matching[::-1])


def _hungarian(sources: Sequence, targets: Sequence, dist: Callable) -> OracleResult:
    if not targets:
        return OracleResult(0, [])
    cost = np.array([[dist(s, t) for s in sources] for t in targets], dtype=float)
    rows, cols = linear_sum_assignment(cost)
    matching = [(sources[c], targets[r]) for r, c in zip(rows, cols)]
    return OracleResult(int(cost[rows, cols].sum()), matching)


def brute_force_min_matching(sources: Sequence, targets: Sequence, dist: Optional[Callable] = None,
                             mode: str = "auto") -> OracleResult:
    """Minimum total distance over injections targets -> sources.

    ``mode`` is ``exhaustive`` (table over target subsets, ``|T| <= 12``),
    ``hungarian`` or ``auto``. ``dist`` defaults to grid Manhattan distance;
    plain integers are treated as chain indices.
    """
    sources = list(sources)
    targets = list(targets)
    if len(sources) < len(targets):
        raise InfeasibleError(f"{len(sources)} sources cannot fill {len(targets)} targets")
    if dist is None:
        dist = _default_dist(sources + targets)
    if mode == "auto":
        mode = "exhaustive" if len(targets) <= EXHAUSTIVE_LIMIT else "hungarian"
    if mode == "exhaustive":
        if len(targets) > EXHAUSTIVE_LIMIT:
            raise ValueError(f"exhaustive mode supports at most {EXHAUSTIVE_LIMIT} targets")
        return _exhaustive(sources, targets, dist)
    if mode == "hungarian":
        return _hungarian(sources, targets, dist)
    raise ValueError(f"unknown mode {mode!r}")


def _default_dist(points):
    if points and isinstance(points[0], (int, np.integer)):
        return lambda a, b: abs(a - b)
    return manhattan_distance


def min_matching_weight(sources: Sequence[Vertex], targets: Sequence[Vertex]) -> int:
    return brute_force_min_matching(sources, targets).weight


@dataclass
class Verdict:
    ok: bool
    gap: int
    exact: bool


def check_equivalence(solver_weight: int, oracle_weight: int, expect_exact: bool) -> Verdict:
    """Exact solvers must hit the oracle; heuristics may only exceed it."""
    gap = solver_weight - oracle_weight
    ok = gap == 0 if expect_exact else gap >= 0
    if not expect_exact:
        log.info("heuristic gap %d (solver %d, oracle %d)", gap, solver_weight, oracle_weight)
    return Verdict(ok, gap, expect_exact)
