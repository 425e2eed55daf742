"""Aro: distance-optimal reconfiguration on grids.

Pipeline: a minimum-cost flow gives a distance-minimizing matching and a
shortest-path system; paths are rerouted to touch fewer static tokens; edges
are deleted while the system stays distance-minimizing until the union of
path edges is a forest; finally the forest is ordered so that every token
moves at most once.
"""

from __future__ import annotations

import heapq
from collections import Counter, defaultdict, deque
from dataclasses import dataclass
from itertools import combinations, islice
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .core import (InfeasibleError, MoveDag, Path, PathSystem, Problem, Solution, Vertex,
                   dag_from_order)

Edge = Tuple[Vertex, Vertex]


def _grid_adjacency(problem: Problem) -> Dict[Vertex, List[Vertex]]:
    g = problem.geometry
    return {v: g.neighbors(v) for v in g.vertices()}


def _adjacency_from_edges(edges: Iterable[Edge]) -> Dict[Vertex, List[Vertex]]:
    adj: Dict[Vertex, List[Vertex]] = defaultdict(list)
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    for v in adj:
        adj[v].sort()
    return adj


class FlowNetwork:
    """Unit-cost arcs in both directions along graph edges, plus a super source and sink."""

    def __init__(self, adj: Dict[Vertex, List[Vertex]], sources: Iterable[Vertex], targets: Iterable[Vertex]):
        self.sources = sorted(set(sources))
        self.targets = sorted(set(targets))
        verts = sorted(set(adj) | set(self.sources) | set(self.targets))
        self.vertex = verts
        self.index = {v: i for i, v in enumerate(verts)}
        n = len(verts)
        self.s, self.t = n, n + 1
        self.n = n + 2
        self.head: List[List[int]] = [[] for _ in range(self.n)]
        self.to: List[int] = []
        self.cap: List[int] = []
        self.cost: List[int] = []
        big = len(self.targets) + 1  # never binding
        for v, nbrs in adj.items():
            for w in nbrs:
                self._arc(self.index[v], self.index[w], big, 1)
        for v in self.sources:
            self._arc(self.s, self.index[v], 1, 1)
        for v in self.targets:
            self._arc(self.index[v], self.t, 1, 1)

    def _arc(self, a: int, b: int, cap: int, cost: int):
        self.head[a].append(len(self.to))
        self.to.append(b), self.cap.append(cap), self.cost.append(cost)
        self.head[b].append(len(self.to))
        self.to.append(a), self.cap.append(0), self.cost.append(-cost)

    def min_cost_flow(self, need: int) -> int:
        """Push ``need`` units by successive shortest paths; returns the flow reached."""
        INF = float("inf")
        pot = [0] * self.n
        flow = 0
        to, cap, cost, head = self.to, self.cap, self.cost, self.head
        while flow < need:
            dist = [INF] * self.n
            prev = [-1] * self.n
            dist[self.s] = 0
            heap = [(0, self.s)]
            done = [False] * self.n
            while heap:
                d, u = heapq.heappop(heap)
                if done[u]:
                    continue
                done[u] = True
                if u == self.t:
                    break
                pu = pot[u]
                for a in head[u]:
                    if cap[a] > 0:
                        w = to[a]
                        nd = d + cost[a] + pu - pot[w]
                        if nd < dist[w]:
                            dist[w] = nd
                            prev[w] = a
                            heapq.heappush(heap, (nd, w))
            if dist[self.t] == INF:
                break
            dt = dist[self.t]
            for v in range(self.n):
                pot[v] += dist[v] if dist[v] < dt else dt
            v = self.t
            while v != self.s:
                a = prev[v]
                cap[a] -= 1
                cap[a ^ 1] += 1
                v = to[a ^ 1]
            flow += 1
        return flow

    def decompose(self) -> List[Path]:
        """Split the flow into source-to-target walks along grid arcs."""
        out: Dict[int, Counter] = defaultdict(Counter)
        sink_left = Counter()
        for u in range(self.n - 2):
            for a in self.head[u]:
                if a % 2:
                    continue
                f = self.cap[a ^ 1]
                if not f:
                    continue
                w = self.to[a]
                if w == self.t:
                    sink_left[u] += f
                else:
                    out[u][w] += f
        # cancel flow running both ways along an edge
        for u in list(out):
            for w in list(out[u]):
                back = out[w].get(u, 0)
                if back and out[u][w]:
                    m = min(back, out[u][w])
                    out[u][w] -= m
                    out[w][u] -= m
        paths = []
        for a in self.head[self.s]:
            if a % 2 or self.cap[a] > 0:
                continue
            u = self.to[a]
            walk = [u]
            while not sink_left[u]:
                w = min(w for w, f in out[u].items() if f > 0)
                out[u][w] -= 1
                u = w
                walk.append(u)
            sink_left[u] -= 1
            paths.append(Path(tuple(self.vertex[i] for i in walk)))
        return paths


@dataclass
class MatchingResult:
    pairs: List[Tuple[Vertex, Vertex]]
    path_system: PathSystem

    @property
    def weight(self) -> int:
        return self.path_system.weight


def _min_cost_paths(adj, sources, targets) -> Optional[List[Path]]:
    net = FlowNetwork(adj, sources, targets)
    need = len(net.targets)
    if net.min_cost_flow(need) < need:
        return None
    return net.decompose()


def mcmf_matching(problem: Problem) -> MatchingResult:
    """Distance-minimizing matching saturating the targets and shortest paths realizing it."""
    problem.require_feasible()
    paths = _min_cost_paths(_grid_adjacency(problem), problem.sources, problem.targets)
    if paths is None:
        raise InfeasibleError("flow cannot saturate the targets")
    return MatchingResult([(p.source, p.target) for p in paths], PathSystem(paths))


def obstruction_count(path_system: PathSystem, occupied: Set[Vertex]) -> int:
    """Tokens displaced if every path were executed as a chain: sources plus tokens lying on paths."""
    touched = set()
    for p in path_system.paths:
        if p.length:
            touched.update(p.vertices)
    return len(touched & occupied)


def _staircases(p: Path, budget: int) -> List[Path]:
    (x0, y0), (x1, y1) = p.source, p.target
    dx, dy = abs(x1 - x0), abs(y1 - y0)
    sx, sy = (1 if x1 > x0 else -1), (1 if y1 > y0 else -1)
    L = dx + dy
    out = [p]
    seen = {p.vertices}

    def build(horiz):
        x, y = x0, y0
        verts = [(x, y)]
        for i in range(L):
            if i in horiz:
                x += sx
            else:
                y += sy
            verts.append((x, y))
        return tuple(verts)

    half = max(1, budget // 2)
    picks = [set(c) for c in islice(combinations(range(L), dx), half)]
    picks += [set(range(L)) - set(c) for c in islice(combinations(range(L), dy), half)]
    for h in picks:
        verts = build(h)
        if verts not in seen:
            seen.add(verts)
            out.append(Path(verts))
    return out[:budget + 1]


def reroute(path_system: PathSystem, occupied: Set[Vertex], budget: int = 32) -> PathSystem:
    """Re-pick each path among monotone staircases to touch fewer tokens.

    Lengths never change and a replacement is taken only when it strictly
    lowers the number of tokens that would move, so both the weight and the
    displaced-token count are non-increasing.
    """
    paths = list(path_system.paths)
    cover = Counter(v for p in paths if p.length for v in p.vertices)
    changed = True
    while changed:
        changed = False
        for i, p in enumerate(paths):
            if p.length < 2:
                continue
            for v in p.vertices:
                cover[v] -= 1

            def fresh(q):
                return sum(1 for v in q.vertices if v in occupied and not cover[v])

            best, best_score = p, fresh(p)
            for q in _staircases(p, budget):
                s = fresh(q)
                if s < best_score:
                    best, best_score = q, s
            if best is not p:
                paths[i] = best
                changed = True
            for v in best.vertices:
                cover[v] += 1
    return PathSystem(paths)


def _components(edges: Set[frozenset]) -> List[Set[Vertex]]:
    adj = _adjacency_from_edges(tuple(e) for e in edges)
    seen: Set[Vertex] = set()
    comps = []
    for v in sorted(adj):
        if v in seen:
            continue
        comp = {v}
        queue = deque([v])
        seen.add(v)
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    comp.add(w)
                    queue.append(w)
        comps.append(comp)
    return comps


def cycle_edges(edges: Set[frozenset]) -> List[Edge]:
    """Edges lying on some cycle (non-bridges), sorted by endpoint coordinates."""
    adj = _adjacency_from_edges(tuple(e) for e in edges)
    disc: Dict[Vertex, int] = {}
    low: Dict[Vertex, int] = {}
    bridges = set()
    counter = 0
    for root in sorted(adj):
        if root in disc:
            continue
        disc[root] = low[root] = counter
        counter += 1
        stack = [(root, None, iter(adj[root]))]
        while stack:
            u, parent, it = stack[-1]
            advanced = False
            for w in it:
                if w == parent:
                    continue
                if w in disc:
                    low[u] = min(low[u], disc[w])
                else:
                    disc[w] = low[w] = counter
                    counter += 1
                    stack.append((w, u, iter(adj[w])))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                if parent is not None:
                    low[parent] = min(low[parent], low[u])
                    if low[u] > disc[parent]:
                        bridges.add(frozenset((u, parent)))
    return sorted(tuple(sorted(e)) for e in edges if e not in bridges)


def is_forest(path_system: PathSystem) -> bool:
    return not cycle_edges(path_system.undirected_edges())


def break_cycles(problem: Problem, path_system: PathSystem) -> PathSystem:
    """Delete edges of the induced graph while a distance-minimizing system survives.

    Only edges on cycles are tried (deleting a bridge cannot remove a cycle),
    in lexicographic order, and the flow is recomputed only inside the
    connected component that holds the edge. Infeasible recomputations count
    as unsafe deletions.
    """
    paths = list(path_system.paths)
    while True:
        edges = PathSystem(paths).undirected_edges()
        candidates = cycle_edges(edges)
        if not candidates:
            return PathSystem(paths)
        comp_of = {}
        for k, comp in enumerate(_components(edges)):
            for v in comp:
                comp_of[v] = k
        accepted = False
        for u, v in candidates:
            k = comp_of[u]
            inside = [p for p in paths if p.length and comp_of.get(p.source) == k]
            others = [p for p in paths if not (p.length and comp_of.get(p.source) == k)]
            weight = sum(p.length for p in inside)
            comp_edges = [tuple(e) for e in edges if comp_of[next(iter(e))] == k and e != frozenset((u, v))]
            adj = _adjacency_from_edges(comp_edges)
            verts = {w for w, c in comp_of.items() if c == k}
            srcs = [s for s in problem.sources if s in verts]
            tgts = [t for t in problem.targets if t in verts]
            new = _min_cost_paths(adj, srcs, tgts)
            if new is None or sum(p.length for p in new) > weight:
                continue
            # zero-length paths on component vertices are re-derived by the flow
            others = [p for p in others if not (p.length == 0 and p.source in verts)]
            n_before = len(edges)
            paths = others + new
            assert len(PathSystem(paths).undirected_edges()) < n_before
            accepted = True
            break
        if not accepted:
            raise AssertionError("no safe edge deletion on a cyclic path system")


def order_moves_forest(path_system: PathSystem, occupied: Iterable[Vertex]) -> Tuple[List[Path], MoveDag]:
    """Execution order in which each token moves at most once.

    A path runs when its target is empty. If tokens sit on its interior, the
    one nearest the target is dealt with first: when it is the source of a
    pending path the two paths swap tails, otherwise that token is pushed
    along the rest of the path (a chain move). Paths whose target lies inside
    another pending path are held back while anything else can run.
    """
    occ = set(occupied)
    pending: Dict[int, Path] = {}
    by_source: Dict[Vertex, int] = {}
    for i, p in enumerate(path_system.paths):
        if p.length:
            pending[i] = p
            by_source[p.source] = i
    interior = Counter(v for p in pending.values() for v in p.vertices[1:-1])
    out: List[Path] = []

    def drop(i):
        p = pending.pop(i)
        del by_source[p.source]
        for v in p.vertices[1:-1]:
            interior[v] -= 1
        return p

    def add(i, p):
        pending[i] = p
        by_source[p.source] = i
        for v in p.vertices[1:-1]:
            interior[v] += 1

    while pending:
        ready = [i for i, p in pending.items() if p.target not in occ]
        if not ready:
            raise AssertionError("every pending path waits on an occupied target")
        calm = [i for i in ready if not interior[pending[i].target]]
        i = min(calm or ready)
        p = pending[i]
        blocked = [k for k in range(1, p.length) if p.vertices[k] in occ]
        if not blocked:
            drop(i)
            occ.discard(p.source)
            occ.add(p.target)
            out.append(p)
            continue
        k = blocked[-1]
        u = p.vertices[k]
        tail = Path(p.vertices[k:])
        head = p.vertices[:k + 1]
        drop(i)
        j = by_source.get(u)
        if j is not None:
            b = drop(j)
            add(i, Path(head + b.vertices[1:]))
        else:
            add(i, Path(head))
        occ.discard(u)
        occ.add(tail.target)
        out.append(tail)
    return out, dag_from_order(out)


def aro(problem: Problem, reroute_budget: int = 32) -> Solution:
    problem.require_feasible()
    result = mcmf_matching(problem)
    ps = reroute(result.path_system, set(problem.sources), reroute_budget)
    ps = break_cycles(problem, ps)
    ordered, dag = order_moves_forest(ps, problem.sources)
    return Solution.from_ordered_paths(ordered, dag)
