"""Geometry, configurations, path systems and the deterministic move executor.

Vertices are ``(x, y)`` tuples: ``x`` is the column (left to right from 0),
``y`` the row counted bottom to top from 0. Chains are ``W x 1`` grids.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

Vertex = Tuple[int, int]
Move = Tuple[Vertex, Vertex]

VERTICAL_FIRST = "vertical_first"
HORIZONTAL_FIRST = "horizontal_first"


class InfeasibleError(ValueError):
    """Raised when fewer sources than targets are available."""


class CollisionError(RuntimeError):
    """A move landed on an occupied vertex or started from an empty one."""


@dataclass(frozen=True)
class Geometry:
    width: int
    height: int = 1

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"grid dimensions must be positive, got {self.width}x{self.height}")

    @property
    def kind(self) -> str:
        return "chain" if self.height == 1 else "grid"

    @property
    def n(self) -> int:
        return self.width * self.height

    def contains(self, v: Vertex) -> bool:
        return 0 <= v[0] < self.width and 0 <= v[1] < self.height

    def check(self, v: Vertex) -> Vertex:
        if not self.contains(v):
            raise ValueError(f"vertex {v} outside {self.width}x{self.height} grid")
        return v

    def vertices(self) -> List[Vertex]:
        # column-major
        return [(x, y) for x in range(self.width) for y in range(self.height)]

    def index(self, v: Vertex) -> int:
        return v[0] * self.height + v[1]

    def vertex(self, i: int) -> Vertex:
        return divmod(i, self.height)

    def neighbors(self, v: Vertex) -> List[Vertex]:
        x, y = v
        # up, down, left, right
        out = []
        for nx, ny in ((x, y + 1), (x, y - 1), (x - 1, y), (x + 1, y)):
            if 0 <= nx < self.width and 0 <= ny < self.height:
                out.append((nx, ny))
        return out

    def adjacent(self, u: Vertex, v: Vertex) -> bool:
        return abs(u[0] - v[0]) + abs(u[1] - v[1]) == 1

    # The two row conventions used by the column solvers.
    def row_from_bottom(self, v: Vertex) -> int:
        return v[1]

    def row_from_top(self, v: Vertex) -> int:
        return self.height - 1 - v[1]

    def from_top(self, x: int, row: int) -> Vertex:
        return (x, self.height - 1 - row)


@dataclass(frozen=True)
class TargetRegion:
    """A ``W x h_prime`` band of rows, vertically centred in the grid."""

    h_prime: int

    def rows(self, geometry: Geometry) -> range:
        lo = (geometry.height - self.h_prime) // 2
        return range(lo, lo + self.h_prime)

    def vertices(self, geometry: Geometry) -> FrozenSet[Vertex]:
        rows = self.rows(geometry)
        return frozenset((x, y) for x in range(geometry.width) for y in rows)


@dataclass(frozen=True)
class Problem:
    geometry: Geometry
    sources: FrozenSet[Vertex]
    targets: FrozenSet[Vertex]
    target_region: Optional[TargetRegion] = None

    def __post_init__(self):
        object.__setattr__(self, "sources", frozenset(self.sources))
        object.__setattr__(self, "targets", frozenset(self.targets))
        for v in self.sources | self.targets:
            self.geometry.check(v)
        if self.target_region is not None:
            h = self.target_region.h_prime
            if not 0 < h < self.geometry.height:
                raise ValueError("target region height must satisfy 0 < h' < H")
            if self.targets != self.target_region.vertices(self.geometry):
                raise ValueError("targets do not match the centred target region")

    @classmethod
    def centered(cls, geometry: Geometry, sources: Iterable[Vertex], h_prime: int) -> "Problem":
        region = TargetRegion(h_prime)
        return cls(geometry, frozenset(sources), region.vertices(geometry), region)

    @classmethod
    def chain(cls, n: int, sources: Iterable[int], targets: Iterable[int]) -> "Problem":
        return cls(Geometry(n, 1), frozenset((i, 0) for i in sources), frozenset((i, 0) for i in targets))

    @property
    def feasible(self) -> bool:
        return len(self.sources) >= len(self.targets)

    def require_feasible(self):
        if not self.feasible:
            raise InfeasibleError(f"{len(self.sources)} sources cannot fill {len(self.targets)} targets")

    def region_rows(self) -> range:
        if self.target_region is None:
            raise ValueError("problem has no centred target region")
        return self.target_region.rows(self.geometry)


def manhattan_distance(u: Vertex, v: Vertex, geometry: Optional[Geometry] = None) -> int:
    if geometry is not None:
        geometry.check(u)
        geometry.check(v)
    return abs(u[0] - v[0]) + abs(u[1] - v[1])


def shortest_path(u: Vertex, v: Vertex, policy: str = VERTICAL_FIRST,
                  geometry: Optional[Geometry] = None) -> "Path":
    """Monotone staircase from ``u`` to ``v`` with all steps of one axis first."""
    if geometry is not None:
        geometry.check(u)
        geometry.check(v)
    if policy not in (VERTICAL_FIRST, HORIZONTAL_FIRST):
        raise ValueError(f"unknown policy {policy!r}")
    x, y = u
    dx = 1 if v[0] > x else -1
    dy = 1 if v[1] > y else -1
    verts = [u]
    if policy == VERTICAL_FIRST:
        while y != v[1]:
            y += dy
            verts.append((x, y))
        while x != v[0]:
            x += dx
            verts.append((x, y))
    else:
        while x != v[0]:
            x += dx
            verts.append((x, y))
        while y != v[1]:
            y += dy
            verts.append((x, y))
    return Path(tuple(verts))


@dataclass(frozen=True)
class Path:
    vertices: Tuple[Vertex, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(tuple(v) for v in self.vertices))
        if not self.vertices:
            raise ValueError("a path needs at least one vertex")

    @property
    def source(self) -> Vertex:
        return self.vertices[0]

    @property
    def target(self) -> Vertex:
        return self.vertices[-1]

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def orientation(self) -> str:
        """Orientation along the chain axis: ``right``, ``left`` or ``isolated``."""
        s, t = self.source, self.target
        if s == t:
            return "isolated"
        key_s, key_t = (s[0], s[1]), (t[0], t[1])
        return "right" if key_t > key_s else "left"

    def moves(self) -> List[Move]:
        vs = self.vertices
        return [(vs[i], vs[i + 1]) for i in range(len(vs) - 1)]

    def is_valid(self) -> bool:
        vs = self.vertices
        if len(set(vs)) != len(vs):
            return False
        if any(abs(a[0] - b[0]) + abs(a[1] - b[1]) != 1 for a, b in zip(vs, vs[1:])):
            return False
        return self.length == manhattan_distance(self.source, self.target)

    def reversed(self) -> "Path":
        return Path(self.vertices[::-1])

    def __len__(self):
        return len(self.vertices)


@dataclass
class PathSystem:
    paths: List[Path] = field(default_factory=list)

    @property
    def weight(self) -> int:
        return sum(p.length for p in self.paths)

    @property
    def moving(self) -> List[Path]:
        return [p for p in self.paths if p.length > 0]

    def edges(self) -> List[Move]:
        return [m for p in self.paths for m in p.moves()]

    def undirected_edges(self) -> set:
        return {frozenset(m) for m in self.edges()}

    def check(self) -> List[str]:
        problems = []
        srcs = [p.source for p in self.paths]
        tgts = [p.target for p in self.paths]
        if len(set(srcs)) != len(srcs):
            problems.append("duplicate source vertices")
        if len(set(tgts)) != len(tgts):
            problems.append("duplicate target vertices")
        for i, p in enumerate(self.paths):
            if not p.is_valid():
                problems.append(f"path {i} is not a shortest simple path")
        return problems

    def __len__(self):
        return len(self.paths)


@dataclass
class MoveDag:
    """Precedence between path ids: an edge ``(i, j)`` runs path ``i`` before ``j``."""

    n_nodes: int
    edges: set = field(default_factory=set)

    def successors(self) -> List[List[int]]:
        out = [[] for _ in range(self.n_nodes)]
        for i, j in sorted(self.edges):
            out[i].append(j)
        return out

    def in_degrees(self) -> List[int]:
        deg = [0] * self.n_nodes
        for _, j in self.edges:
            deg[j] += 1
        return deg

    def topological_order(self) -> List[int]:
        """Kahn's algorithm with smallest-id-first tie breaking; raises on cycles."""
        import heapq

        deg = self.in_degrees()
        succ = self.successors()
        ready = [i for i in range(self.n_nodes) if deg[i] == 0]
        heapq.heapify(ready)
        order = []
        while ready:
            i = heapq.heappop(ready)
            order.append(i)
            for j in succ[i]:
                deg[j] -= 1
                if deg[j] == 0:
                    heapq.heappush(ready, j)
        if len(order) != self.n_nodes:
            raise ValueError("move dag contains a cycle")
        return order

    def is_acyclic(self) -> bool:
        try:
            self.topological_order()
        except ValueError:
            return False
        return True


def dag_from_order(paths: Sequence[Path]) -> MoveDag:
    """Precedence DAG for paths listed in a collision-free execution order.

    For every vertex, consecutive paths touching it are linked, so any linear
    extension replays the same per-vertex occupancy history.
    """
    last: Dict[Vertex, int] = {}
    edges = set()
    for j, p in enumerate(paths):
        if p.length == 0:
            continue
        for v in p.vertices:
            i = last.get(v)
            if i is not None and i != j:
                edges.add((i, j))
            last[v] = j
    return MoveDag(len(paths), edges)


@dataclass
class Solution:
    """Executed path system (in schedule order), its moves and precedence DAG."""

    path_system: PathSystem
    schedule: List[Move]
    dag: MoveDag

    @classmethod
    def from_ordered_paths(cls, paths: Sequence[Path], dag: Optional[MoveDag] = None) -> "Solution":
        paths = list(paths)
        schedule = [m for p in paths for m in p.moves()]
        if dag is None:
            dag = dag_from_order(paths)
        return cls(PathSystem(paths), schedule, dag)

    @property
    def displaced_tokens(self) -> int:
        return sum(1 for p in self.path_system.paths if p.length > 0)

    @property
    def total_displacement(self) -> int:
        return len(self.schedule)

    @property
    def stats(self) -> dict:
        return {"displaced_tokens": self.displaced_tokens,
                "total_displacement": self.total_displacement}


def execute_schedule(config: Iterable[Vertex], schedule: Iterable[Move]) -> FrozenSet[Vertex]:
    occupied = set(config)
    for k, (a, b) in enumerate(schedule):
        if abs(a[0] - b[0]) + abs(a[1] - b[1]) != 1:
            raise CollisionError(f"move {k} {a}->{b} is not an elementary displacement")
        if a not in occupied:
            raise CollisionError(f"move {k} {a}->{b} starts from an empty vertex")
        if b in occupied:
            raise CollisionError(f"move {k} {a}->{b} lands on an occupied vertex")
        occupied.remove(a)
        occupied.add(b)
    return frozenset(occupied)


def execute_batches(config: Iterable[Vertex], batches: Iterable[Iterable[Move]]) -> FrozenSet[Vertex]:
    """Apply each batch atomically: all sources vacate before any destination fills."""
    occupied = set(config)
    for k, batch in enumerate(batches):
        batch = list(batch)
        srcs = [a for a, _ in batch]
        dsts = [b for _, b in batch]
        if len(set(srcs)) != len(srcs) or len(set(dsts)) != len(dsts):
            raise CollisionError(f"batch {k} moves two tokens from or to one vertex")
        for a in srcs:
            if a not in occupied:
                raise CollisionError(f"batch {k} moves from empty vertex {a}")
        occupied.difference_update(srcs)
        for b in dsts:
            if b in occupied:
                raise CollisionError(f"batch {k} lands on occupied vertex {b}")
            occupied.add(b)
    return frozenset(occupied)


def token_move_counts(config: Iterable[Vertex], paths: Sequence[Path]) -> Dict[int, int]:
    """Execute whole paths in order while tracking token identities.

    Returns how many paths each token was displaced by.
    """
    where = {v: i for i, v in enumerate(sorted(config))}
    counts: Dict[int, int] = defaultdict(int)
    for p in paths:
        if p.length == 0:
            continue
        tok = where.pop(p.source, None)
        if tok is None:
            raise CollisionError(f"path from {p.source} starts on an empty vertex")
        for v in p.vertices[1:]:
            if v in where:
                raise CollisionError(f"path {p.source}->{p.target} obstructed at {v}")
        where[p.target] = tok
        counts[tok] += 1
    return dict(counts)


@dataclass
class ValidationReport:
    ok: bool
    reasons: List[str] = field(default_factory=list)

    def __bool__(self):
        return self.ok


def validate_solution(problem: Problem, solution: Solution, *, once_per_token: bool = False) -> ValidationReport:
    reasons: List[str] = []
    ps = solution.path_system
    reasons.extend(ps.check())

    try:
        final = execute_schedule(problem.sources, solution.schedule)
    except CollisionError as exc:
        reasons.append(f"collision: {exc}")
        final = None
    if final is not None and not problem.targets <= final:
        missing = len(problem.targets - final)
        reasons.append(f"{missing} target vertices left empty")

    from collections import Counter

    if Counter(solution.schedule) != Counter(ps.edges()):
        reasons.append("schedule moves differ from path-system edges")

    dag = solution.dag
    if dag.n_nodes != len(ps.paths):
        reasons.append("dag size differs from path count")
    elif not dag.is_acyclic():
        reasons.append("dag has a cycle")
    else:
        # schedule must run the paths contiguously, in an order extending the dag
        pos = {}
        k = 0
        consistent = True
        for i, p in enumerate(ps.paths):
            n_moves = p.length
            if solution.schedule[k:k + n_moves] != p.moves():
                consistent = False
                break
            pos[i] = k
            k += n_moves
        if not consistent:
            reasons.append("schedule does not execute paths contiguously in listed order")
        else:
            for i, j in dag.edges:
                if ps.paths[i].length and ps.paths[j].length and pos[i] > pos[j]:
                    reasons.append(f"schedule runs path {j} before its predecessor {i}")
                    break

    if once_per_token and not reasons:
        counts = token_move_counts(problem.sources, ps.paths)
        twice = [t for t, c in counts.items() if c > 1]
        if twice:
            reasons.append(f"{len(twice)} tokens displaced more than once")

    return ValidationReport(not reasons, reasons)
