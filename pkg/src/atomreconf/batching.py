"""Grouping elementary displacements into simultaneous batches.

Each round looks at the paths whose predecessors in the move DAG are done and
greedily takes the next edge of each, skipping edges that touch a vertex
already in the batch or that violate a pairwise constraint. The finer
``edge_level`` mode replaces path precedence with per-vertex precedence
between individual moves, so a path may start before its DAG predecessors
have finished as long as it does not touch their vertices yet.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

from .core import Move, MoveDag, PathSystem, Solution

Constraint = Callable[[Move, Move], bool]


def direction(move: Move) -> str:
    (x0, y0), (x1, y1) = move
    if x0 == x1:
        return "up" if y1 > y0 else "down"
    return "right" if x1 > x0 else "left"


def same_line_same_direction(a: Move, b: Move) -> bool:
    """Both moves vertical in one column, or horizontal in one row, in the same direction."""
    da, db = direction(a), direction(b)
    if da != db:
        return False
    if da in ("up", "down"):
        return a[0][0] == b[0][0]
    return a[0][1] == b[0][1]


def deployed_constraint() -> List[Constraint]:
    return [same_line_same_direction]


CONSTRAINTS = {"none": lambda: [], "column-direction": deployed_constraint}


@dataclass
class Batch:
    moves: List[Move] = field(default_factory=list)

    @property
    def axis(self) -> Optional[str]:
        dirs = {direction(m) for m in self.moves}
        if len(dirs) != 1:
            return None
        d = dirs.pop()
        if d in ("up", "down"):
            return "col" if len({m[0][0] for m in self.moves}) == 1 else None
        return "row" if len({m[0][1] for m in self.moves}) == 1 else None

    @property
    def dir(self) -> Optional[str]:
        return direction(self.moves[0]) if self.axis else None

    def __len__(self):
        return len(self.moves)


@dataclass
class BatchSchedule:
    batches: List[Batch]

    def moves(self) -> List[List[Move]]:
        return [b.moves for b in self.batches]

    def __len__(self):
        return len(self.batches)

    def to_json(self) -> dict:
        return {"batches": [{"axis": b.axis, "dir": b.dir,
                             "moves": [[list(a), list(c)] for a, c in b.moves]} for b in self.batches]}


def _compatible(move: Move, batch: Batch, used: set, constraints: Sequence[Constraint]) -> bool:
    if move[0] in used or move[1] in used:
        return False
    return all(c(move, other) for other in batch.moves for c in constraints)


def batch_moves(path_system: PathSystem, dag: MoveDag, constraints: Sequence[Constraint] = (),
                edge_level: bool = False) -> BatchSchedule:
    if not dag.is_acyclic():
        raise ValueError("move DAG has a cycle")
    if edge_level:
        return _batch_edges(path_system, dag, constraints)
    moves = [p.moves() for p in path_system.paths]
    pos = [0] * len(moves)
    indeg = dag.in_degrees()
    succ = dag.successors()
    ready = set()

    def finish(i):
        for j in succ[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                release(j)

    def release(i):
        if moves[i]:
            ready.add(i)
        else:
            finish(i)

    for i in range(len(moves)):
        if indeg[i] == 0:
            release(i)
    batches = []
    while ready:
        batch, used, taken = Batch(), set(), []
        for i in sorted(ready):
            m = moves[i][pos[i]]
            if _compatible(m, batch, used, constraints):
                batch.moves.append(m)
                used.update(m)
                taken.append(i)
        if not batch.moves:
            raise AssertionError("no move could start a batch")
        for i in taken:
            pos[i] += 1
            if pos[i] == len(moves[i]):
                ready.discard(i)
                finish(i)
        batches.append(batch)
    if any(p < len(m) for p, m in zip(pos, moves)):
        raise ValueError("move DAG leaves some paths unreachable")
    return BatchSchedule(batches)


def _batch_edges(path_system: PathSystem, dag: MoveDag, constraints: Sequence[Constraint]) -> BatchSchedule:
    # replay paths in a topological order; each move then waits only for the
    # previous move that touched either of its vertices
    paths = path_system.paths
    order = dag.topological_order()
    moves: List[List[Move]] = [p.moves() for p in paths]
    deps: List[list] = [[None] * len(m) for m in moves]
    last = {}
    for i in order:
        for k, (a, b) in enumerate(moves[i]):
            prior = [last[v] for v in (a, b) if v in last and last[v][0] != i]
            deps[i][k] = prior
            last[a] = last[b] = (i, k)
    done = set()
    pos = [0] * len(moves)
    active = [i for i in order if moves[i]]
    batches = []
    while active:
        batch, used, taken = Batch(), set(), []
        for i in sorted(active):
            k = pos[i]
            if any(d not in done for d in deps[i][k]):
                continue
            m = moves[i][k]
            if _compatible(m, batch, used, constraints):
                batch.moves.append(m)
                used.update(m)
                taken.append(i)
        if not batch.moves:
            raise AssertionError("no move could start a batch")
        for i in taken:
            done.add((i, pos[i]))
            pos[i] += 1
        active = [i for i in active if pos[i] < len(moves[i])]
        batches.append(batch)
    return BatchSchedule(batches)


def batch_solution(solution: Solution, constraints: Sequence[Constraint] = (), edge_level: bool = False) -> BatchSchedule:
    return batch_moves(solution.path_system, solution.dag, constraints, edge_level)
