"""Column-wise grid state shared by red-rec and bird.

Both heuristics solve a centred ``W x H'`` target band column by column. A
column is filled either from its own tokens (exact 1D) or from tokens in other
columns, which travel horizontally along their reservoir row and then
vertically inside the receiving column.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence

from .core import InfeasibleError, Path, Problem, Solution, Vertex
from .exact1d import Generalized1DInstance, _unused_counts, order_pairs, solve_pairs


@dataclass(frozen=True)
class Candidate:
    """A token offered to a column: where it is and where it counts as being."""

    vertex: Vertex
    virtual: int
    dist: int
    fixed: bool = False


def grid_path(src: Vertex, dst: Vertex) -> Path:
    """Horizontal along the source row, then vertical in the destination column."""
    (x, y), (tx, ty) = src, dst
    verts = [src]
    dx = 1 if tx > x else -1
    while x != tx:
        x += dx
        verts.append((x, y))
    dy = 1 if ty > y else -1
    while y != ty:
        y += dy
        verts.append((x, y))
    return Path(tuple(verts))


class ColumnState:
    def __init__(self, problem: Problem):
        if problem.target_region is None:
            raise ValueError("column solvers need a centred target region")
        problem.require_feasible()
        self.problem = problem
        self.width = problem.geometry.width
        self.height = problem.geometry.height
        rows = problem.region_rows()
        self.lo, self.hi = rows.start, rows.stop  # region rows [lo, hi)
        self.h_prime = rows.stop - rows.start
        self.cols: List[set] = [set() for _ in range(self.width)]
        for x, y in problem.sources:
            self.cols[x].add(y)
        self.solved = [False] * self.width
        self.paths: List[Path] = []

    def surpluses(self) -> List[int]:
        return [len(c) - self.h_prime for c in self.cols]

    def in_reservoir(self, y: int) -> bool:
        return y < self.lo or y >= self.hi

    def reservoir(self, x: int) -> List[int]:
        return sorted(y for y in self.cols[x] if y < self.lo or y >= self.hi)

    def _apply(self, paths: Sequence[Path]):
        for p in paths:
            if p.length:
                self.cols[p.source[0]].discard(p.source[1])
        for p in paths:
            if p.length:
                self.cols[p.target[0]].add(p.target[1])
        self.paths.extend(p for p in paths if p.length)

    def solve_column(self, x: int):
        """Exact 1D on column ``x`` with its own tokens; extra tokens stay put."""
        tokens = self.cols[x]
        if len(tokens) < self.h_prime:
            raise InfeasibleError(f"column {x} holds {len(tokens)} tokens for {self.h_prime} targets")
        pairs = solve_pairs(self.height, tokens, range(self.lo, self.hi))
        self._apply([Path(tuple((x, y) for y in _span(s, t))) for s, t in pairs if s != t])
        self.solved[x] = True

    def fill_column(self, x: int, candidates: Sequence[Candidate]) -> List[Path]:
        """Fill column ``x``'s target band from ``candidates`` at minimum virtual cost.

        Each candidate sits at its ``virtual`` 1D position; the generalized
        assignment picks which to use. Among tokens sharing a virtual position,
        fixed ones go first, then the closest columns (left before right).
        """
        targets = list(range(self.lo, self.hi))
        instance = self.instance_from(candidates, targets)
        droppable = {p: c - instance.fixed.get(p, 0) for p, c in instance.source_multiplicity.items()}
        unused = _unused_counts(instance.source_multiplicity, droppable, targets)

        by_pos: Dict[int, List[Candidate]] = {}
        for c in candidates:
            by_pos.setdefault(c.virtual, []).append(c)
        used: List[Candidate] = []
        for p, group in by_pos.items():
            group.sort(key=lambda c: (not c.fixed, c.dist, c.vertex[0]))
            used.extend(group[:len(group) - unused.get(p, 0)])

        # tokens sharing a virtual position: the nearest one takes the target
        # it reaches first, so it also moves first
        def rank(c: Candidate):
            sign = 1 if c.virtual >= self.hi else -1
            return (c.virtual, sign * c.dist, sign * c.vertex[0])

        used.sort(key=rank)
        token_for = {t: c for c, t in zip(used, targets)}
        ordered = order_pairs([(c.virtual, t) for t, c in token_for.items()])
        paths = [grid_path(token_for[t].vertex, (x, t)) for _, t in ordered]
        self._apply(paths)
        self.solved[x] = True
        return paths

    @staticmethod
    def instance_from(candidates: Sequence[Candidate], targets=None) -> Generalized1DInstance:
        mult: Dict[int, int] = {}
        fixed: Dict[int, int] = {}
        for c in candidates:
            mult[c.virtual] = mult.get(c.virtual, 0) + 1
            if c.fixed:
                fixed[c.virtual] = fixed.get(c.virtual, 0) + 1
        return Generalized1DInstance(mult, frozenset(targets) if targets is not None else frozenset(), fixed)

    def solution(self) -> Solution:
        return Solution.from_ordered_paths(self.paths)


def _span(s: int, t: int) -> range:
    return range(s, t + 1) if t >= s else range(s, t - 1, -1)
