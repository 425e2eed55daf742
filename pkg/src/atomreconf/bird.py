"""Bird: fill deficit columns from every reservoir at once.

Columns with enough tokens are solved in place by exact 1D. Each remaining
column, leftmost first, is then filled by a generalized 1D assignment over its
own tokens plus every reservoir token in the grid. A reservoir token ``d``
columns away is placed ``d`` rows further out than it really is, so the 1D
cost equals its Manhattan distance to any target in the column.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from .columns import Candidate, ColumnState
from .core import Problem, Solution, Vertex
from .exact1d import Generalized1DInstance


@dataclass
class DiagonalMap:
    """Virtual 1D position -> tokens projected onto it, nearest first."""

    entries: Dict[int, List[Tuple[Vertex, int]]] = field(default_factory=dict)

    def add(self, virtual: int, vertex: Vertex, dist: int):
        self.entries.setdefault(virtual, []).append((vertex, dist))

    def tokens_at(self, virtual: int) -> List[Tuple[Vertex, int]]:
        return sorted(self.entries.get(virtual, []), key=lambda e: (e[1], e[0][0]))


def column_candidates(state: ColumnState, column: int) -> List[Candidate]:
    cands = [Candidate((column, y), y, 0) for y in state.cols[column]]
    for x in range(state.width):
        if x == column:
            continue
        d = abs(x - column)
        for y in state.cols[x]:
            if y >= state.hi:
                cands.append(Candidate((x, y), y + d, d))
            elif y < state.lo:
                cands.append(Candidate((x, y), y - d, d))
    return cands


def build_generalized_instance(state: ColumnState, column: int) -> Tuple[Generalized1DInstance, DiagonalMap]:
    """The 1D instance for ``column`` and the map back to physical tokens."""
    cands = column_candidates(state, column)
    dmap = DiagonalMap()
    for c in cands:
        dmap.add(c.virtual, c.vertex, c.dist)
    return ColumnState.instance_from(cands, range(state.lo, state.hi)), dmap


def bird(problem: Problem) -> Solution:
    state = ColumnState(problem)
    for x, s in enumerate(state.surpluses()):
        if s >= 0:
            state.solve_column(x)
    for x in range(state.width):
        if not state.solved[x]:
            state.fill_column(x, column_candidates(state, x))
    return state.solution()
