"""Exact reconfiguration on chains.

The assignment works on the gap-flow view of a chain: with ``b_g`` the
token-minus-target balance left of gap ``g`` and ``u_g`` the number of tokens
left unused there, the matching cost is ``sum_g |b_g - u_g|``. ``u`` is a
non-decreasing staircase that may only step at source vertices, so the
optimal staircase is found by one left-to-right sweep over a convex
piecewise-linear cost (kept as two heaps of breakpoints) and a right-to-left
backtrack. Once the used tokens are known, sorted pairing is optimal.
"""

from __future__ import annotations

import heapq
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .core import InfeasibleError, MoveDag, Path, Solution, dag_from_order

Pair = Tuple[int, int]


@dataclass
class Matching1D:
    pairs: List[Pair]
    weight: int

    def __len__(self):
        return len(self.pairs)


@dataclass
class Generalized1DInstance:
    """Chain instance whose source vertices may carry several tokens.

    Positions are plain integers and may be negative or exceed the physical
    column. ``fixed`` counts tokens at a vertex that must be used; the rest of
    ``source_multiplicity`` may be left in place.
    """

    source_multiplicity: Dict[int, int]
    targets: frozenset
    fixed: Dict[int, int] = field(default_factory=dict)
    provenance: Dict[Tuple[int, int], object] = field(default_factory=dict)

    def __post_init__(self):
        self.targets = frozenset(self.targets)
        self.source_multiplicity = {p: c for p, c in self.source_multiplicity.items() if c > 0}
        for p, c in self.fixed.items():
            if c > self.source_multiplicity.get(p, 0):
                raise ValueError(f"fixed count at {p} exceeds multiplicity")

    @property
    def n_tokens(self) -> int:
        return sum(self.source_multiplicity.values())

    @property
    def span(self) -> Tuple[int, int]:
        pts = list(self.source_multiplicity) + list(self.targets)
        return min(pts), max(pts)

    @property
    def length(self) -> int:
        lo, hi = self.span
        return hi - lo + 1


class _ConvexStaircase:
    """Convex piecewise-linear cost in the unused count ``u``.

    Breakpoints left of the minimum live in ``left`` (max-heap), right of it in
    ``right`` (min-heap with a lazy shift). Both domain walls carry infinite
    multiplicity and are kept out of the heaps.
    """

    def __init__(self):
        self.left: List[int] = []
        self.right: List[int] = []
        self.shift = 0

    def argmin_lo(self) -> int:
        top = -self.left[0] if self.left else 0
        return max(top, 0)

    def _top_right(self) -> int:
        if self.right:
            return min(self.right[0] + self.shift, self.shift)
        return self.shift

    def _pop_left(self) -> int:
        if self.left and -self.left[0] >= 0:
            return -heapq.heappop(self.left)
        return 0

    def _pop_right(self) -> int:
        if self.right and self.right[0] + self.shift <= self.shift:
            return heapq.heappop(self.right) + self.shift
        return self.shift

    def allow_unused(self, m: int):
        # F(u) <- min_{0<=k<=m} F(u-k)
        self.shift += m

    def add_abs(self, b: int):
        # F(u) <- F(u) + |u - b|; breakpoints outside [0, shift] can never
        # surface again, so they are not stored
        a = self.argmin_lo()
        c = self._top_right()
        if b < a:
            if b >= 0:
                heapq.heappush(self.left, -b)
                heapq.heappush(self.left, -b)
            moved = self._pop_left()
            if moved < self.shift:
                heapq.heappush(self.right, moved - self.shift)
        elif b > c:
            if b <= self.shift:
                heapq.heappush(self.right, b - self.shift)
                heapq.heappush(self.right, b - self.shift)
            moved = self._pop_right()
            if moved > 0:
                heapq.heappush(self.left, -moved)
        else:
            heapq.heappush(self.left, -b)
            heapq.heappush(self.right, b - self.shift)


def _unused_counts(supply: Dict[int, int], droppable: Dict[int, int], targets: Iterable[int]) -> Dict[int, int]:
    """How many tokens to leave unused at each supply vertex, minimising cost."""
    targets = set(targets)
    total = sum(supply.values())
    surplus = total - len(targets)
    if surplus < 0:
        raise InfeasibleError(f"{total} tokens cannot fill {len(targets)} targets")
    if surplus == 0:
        return {}
    if surplus > sum(droppable.values()):
        raise InfeasibleError("more fixed tokens than targets")
    pts = sorted(set(supply) | targets)
    lo, hi = pts[0], pts[-1]
    cost = _ConvexStaircase()
    argmins: List[Tuple[int, int, int]] = []
    b = 0
    # sweep every integer vertex: unit gaps keep the heap updates linear
    for p in range(lo, hi + 1):
        c = supply.get(p, 0)
        if c:
            m = droppable.get(p, 0)
            if m:
                argmins.append((p, m, cost.argmin_lo()))
                cost.allow_unused(m)
            b += c
        if p in targets:
            b -= 1
        if p < hi:
            cost.add_abs(b)
    unused: Dict[int, int] = {}
    u = surplus
    for p, m, lo_p in reversed(argmins):
        pred = max(u - m, min(u, lo_p))
        if u - pred:
            unused[p] = u - pred
        u = pred
    assert u == 0, "backtrack did not return to an empty staircase"
    return unused


def _pair_sorted(tokens: Sequence[int], targets: Sequence[int]) -> List[Pair]:
    return list(zip(sorted(tokens), sorted(targets)))


def assign_1d(n: int, sources: Iterable[int], targets: Iterable[int]) -> Matching1D:
    """Distance-minimising matching on an ``n``-vertex chain saturating ``targets``."""
    S = sorted(set(sources))
    T = sorted(set(targets))
    for i in S + T:
        if not 0 <= i < n:
            raise ValueError(f"index {i} outside chain of length {n}")
    if len(S) < len(T):
        raise InfeasibleError(f"{len(S)} sources cannot fill {len(T)} targets")
    if len(S) == len(T):
        pairs = list(zip(S, T))
    else:
        supply = dict.fromkeys(S, 1)
        unused = _unused_counts(supply, supply, T)
        used = [s for s in S if s not in unused]
        pairs = list(zip(used, T))
    return Matching1D(pairs, sum(abs(s - t) for s, t in pairs))


def assign_1d_generalized(instance: Generalized1DInstance) -> Matching1D:
    supply = instance.source_multiplicity
    droppable = {p: c - instance.fixed.get(p, 0) for p, c in supply.items()}
    unused = _unused_counts(supply, droppable, instance.targets)
    tokens = []
    for p in sorted(supply):
        tokens.extend([p] * (supply[p] - unused.get(p, 0)))
    pairs = list(zip(tokens, sorted(instance.targets)))
    return Matching1D(pairs, sum(abs(s - t) for s, t in pairs))


def orientation(pair: Pair) -> str:
    s, t = pair
    return "isolated" if s == t else ("right" if t > s else "left")


def resolve_nesting_pairs(pairs: Sequence[Pair]) -> List[Pair]:
    """Swap targets so no same-orientation path sits inside another.

    Re-pairing sorted sources with sorted targets per orientation is the
    result of both sweeps; it keeps every path's orientation and the weight.
    """
    out = []
    for side in ("right", "left"):
        group = [p for p in pairs if orientation(p) == side]
        out.extend(zip(sorted(s for s, _ in group), sorted(t for _, t in group)))
    out.extend(p for p in pairs if orientation(p) == "isolated")
    return out


def order_pairs(pairs: Sequence[Pair]) -> List[Pair]:
    """Right-oriented paths by descending target, then left-oriented by ascending target."""
    right = sorted((p for p in pairs if p[1] > p[0]), key=lambda p: -p[1])
    left = sorted((p for p in pairs if p[1] < p[0]), key=lambda p: p[1])
    return right + left


def chain_path(s: int, t: int, y: int = 0) -> Path:
    step = 1 if t >= s else -1
    return Path(tuple((i, y) for i in range(s, t + step, step)))


def _pair_of(path: Path) -> Pair:
    return path.source[0], path.target[0]


def resolve_nesting(paths: Sequence[Path]) -> List[Path]:
    y = paths[0].source[1] if paths else 0
    return [chain_path(s, t, y) for s, t in resolve_nesting_pairs([_pair_of(p) for p in paths])]


def order_moves_1d(paths: Sequence[Path]) -> Tuple[list, MoveDag]:
    y = paths[0].source[1] if paths else 0
    ordered = [chain_path(s, t, y) for s, t in order_pairs([_pair_of(p) for p in paths])]
    return [m for p in ordered for m in p.moves()], dag_from_order(ordered)


def solve_pairs(n: int, sources: Iterable[int], targets: Iterable[int]) -> List[Pair]:
    """Ordered moving pairs, followed by isolated ones."""
    matching = assign_1d(n, sources, targets)
    pairs = resolve_nesting_pairs(matching.pairs)
    return order_pairs(pairs) + [p for p in pairs if p[0] == p[1]]


def solve_1d(n: int, sources: Iterable[int], targets: Iterable[int]) -> Solution:
    return Solution.from_ordered_paths([chain_path(s, t) for s, t in solve_pairs(n, sources, targets)])


def level_vector(n: int, sources: Iterable[int], targets: Iterable[int]) -> np.ndarray:
    """``level[i] = |S cap [0, i]| - |T cap [0, i-1]|`` via prefix sums."""
    s = np.zeros(n, dtype=np.int64)
    t = np.zeros(n, dtype=np.int64)
    s[list(sources)] = 1
    t[list(targets)] = 1
    return np.cumsum(s) - (np.cumsum(t) - t)


@dataclass(frozen=True)
class SubProblem:
    lo: int
    hi: int
    sources: Tuple[int, ...]
    targets: Tuple[int, ...]


def gap_flows(n: int, sources: Iterable[int], targets: Iterable[int]) -> np.ndarray:
    """Net rightward token flow across each gap ``i | i+1`` of one optimal matching."""
    S = sorted(set(sources))
    T = sorted(set(targets))
    if len(S) < len(T):
        raise InfeasibleError(f"{len(S)} sources cannot fill {len(T)} targets")
    unused = _unused_counts(dict.fromkeys(S, 1), dict.fromkeys(S, 1), T) if len(S) > len(T) else {}
    level = level_vector(n, S, T)
    t = np.zeros(n, dtype=np.int64)
    t[T] = 1
    balance = level - t
    u = np.zeros(n, dtype=np.int64)
    if unused:
        u[list(unused)] = 1
    return (balance - np.cumsum(u))[:-1]


def decompose_1d(n: int, sources: Iterable[int], targets: Iterable[int]) -> List[SubProblem]:
    """Split a chain at gaps no optimal token crosses.

    A gap is cut when the optimal unused-token staircase meets the level
    balance there, i.e. the matching sends zero net flow across it. Pieces
    without targets are dropped: their tokens never move.
    """
    S = sorted(set(sources))
    T = sorted(set(targets))
    if not T:
        return []
    flows = gap_flows(n, S, T)
    cuts = [g for g in np.flatnonzero(flows == 0).tolist()]
    bounds = [-1] + cuts + [n - 1]
    out = []
    si = ti = 0
    for a, b in zip(bounds, bounds[1:]):
        lo, hi = a + 1, b
        s_part = []
        while si < len(S) and S[si] <= hi:
            s_part.append(S[si])
            si += 1
        t_part = []
        while ti < len(T) and T[ti] <= hi:
            t_part.append(T[ti])
            ti += 1
        if t_part:
            lo = min(s_part[0] if s_part else lo, t_part[0])
            hi = max(s_part[-1] if s_part else hi, t_part[-1])
            out.append(SubProblem(lo, hi, tuple(s_part), tuple(t_part)))
    return out


def _solve_sub(sub: SubProblem) -> List[Pair]:
    off = sub.lo
    pairs = solve_pairs(sub.hi - sub.lo + 1, [s - off for s in sub.sources], [t - off for t in sub.targets])
    return [(s + off, t + off) for s, t in pairs]


def solve_1d_decomposed(n: int, sources: Iterable[int], targets: Iterable[int],
                        jobs: int = 1) -> Solution:
    """Solve independent pieces (optionally on a thread pool) and concatenate in order."""
    subs = decompose_1d(n, sources, targets)
    if jobs > 1 and len(subs) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_solve_sub, subs))
    else:
        parts = [_solve_sub(s) for s in subs]
    moving = [p for part in parts for p in part if p[0] != p[1]]
    still = [p for part in parts for p in part if p[0] == p[1]]
    return Solution.from_ordered_paths([chain_path(s, t) for s, t in moving + still])
