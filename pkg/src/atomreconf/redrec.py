"""Red-rec: column-wise redistribution of surplus tokens into a centred band.

Columns with exactly enough tokens are solved in place. Then, repeatedly, the
best donor/receiver pair (surplus and deficit columns separated only by solved
columns) is chosen and the receiver's band is filled from its own tokens plus
reservoir tokens of the donor. Every token moves at most once.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

from .columns import Candidate, ColumnState
from .core import Problem, Solution
from .exact1d import Generalized1DInstance


def compute_surpluses(problem: Problem) -> List[int]:
    """Tokens minus targets per column."""
    return ColumnState(problem).surpluses()


def _neighbours(j: int, solved: Sequence[bool]):
    # nearest unsolved column on each side of j
    for step in (-1, 1):
        i = j + step
        while 0 <= i < len(solved) and solved[i]:
            i += step
        if 0 <= i < len(solved):
            yield i


def select_best_pair(surplus: Sequence[int], solved: Sequence[bool]) -> Optional[Tuple[int, int]]:
    """Pick ``(donor, receiver)`` by largest exchange, then distance, then saturation.

    Only unsolved columns qualify and everything strictly between them must be
    solved. Remaining ties go to the lowest indices.
    """
    best = None
    best_key = None
    for r, s in enumerate(surplus):
        if solved[r] or s >= 0:
            continue
        for d in _neighbours(r, solved):
            if surplus[d] <= 0:
                continue
            exchange = min(surplus[d], -s)
            key = (-exchange, abs(d - r), -s - exchange, d, r)
            if best_key is None or key < best_key:
                best, best_key = (d, r), key
    return best


def redistribution_candidates(state: ColumnState, donor: int, receiver: int,
                              marked: Sequence[Tuple[int, int]] = ()) -> List[Candidate]:
    """Tokens offered to ``receiver``: its own and marked ones are forced, the donor's reservoir optional."""
    cands = [Candidate((receiver, y), y, 0, True) for y in state.cols[receiver]]
    cands += [Candidate(v, v[1], abs(v[0] - receiver), True) for v in marked]
    if donor is not None:
        dist = abs(donor - receiver)
        cands += [Candidate((donor, y), y, dist, False) for y in state.reservoir(donor)]
    return cands


def build_redistribution_instance(state: ColumnState, donor: int, receiver: int,
                                  marked: Sequence[Tuple[int, int]] = ()) -> Generalized1DInstance:
    """The generalized 1D instance solved when ``donor`` fills ``receiver``."""
    cands = redistribution_candidates(state, donor, receiver, marked)
    return ColumnState.instance_from(cands, range(state.lo, state.hi))


def red_rec(problem: Problem) -> Solution:
    state = ColumnState(problem)
    surplus = state.surpluses()
    for x, s in enumerate(surplus):
        if s == 0:
            state.solve_column(x)
    marked: Dict[int, List[Tuple[int, int]]] = {}
    while True:
        pair = select_best_pair(surplus, state.solved)
        if pair is None:
            break
        d, r = pair
        need = -surplus[r]
        if surplus[d] >= need:
            state.fill_column(r, redistribution_candidates(state, d, r, marked.pop(r, ())))
            surplus[r] = 0
            surplus[d] -= need
            if surplus[d] == 0:
                state.solve_column(d)
        else:
            # the donor cannot cover the deficit alone: settle it and earmark
            # whatever it has left for this receiver
            state.solve_column(d)
            marked.setdefault(r, []).extend((d, y) for y in state.reservoir(d))
            surplus[r] += surplus[d]
            surplus[d] = 0
    for x in range(state.width):
        if not state.solved[x]:
            if surplus[x] < 0:
                raise AssertionError(f"column {x} left with deficit {surplus[x]}")
            state.solve_column(x)
    return state.solution()
