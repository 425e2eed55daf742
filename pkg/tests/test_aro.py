import random

from atomreconf.aro import (aro, break_cycles, cycle_edges, is_forest, mcmf_matching, obstruction_count,
                            order_moves_forest, reroute)
from atomreconf.bird import bird
from atomreconf.core import (HORIZONTAL_FIRST, VERTICAL_FIRST, Geometry, Path, PathSystem, Problem, Solution,
                             shortest_path, token_move_counts, validate_solution)
from atomreconf.oracle import min_matching_weight
from atomreconf.redrec import red_rec

from conftest import random_centered, random_grid


def test_mcmf_examples():
    p = Problem(Geometry(2, 2), frozenset({(0, 0)}), frozenset({(1, 1)}))
    assert mcmf_matching(p).weight == 2
    same = {(0, 0), (1, 1)}
    res = mcmf_matching(Problem(Geometry(2, 2), frozenset(same), frozenset(same)))
    assert res.weight == 0
    assert all(q.length == 0 for q in res.path_system.paths)


def test_mcmf_matches_oracle():
    rng = random.Random(4)
    for _ in range(200):
        p = random_grid(rng, 6, 8)
        res = mcmf_matching(p)
        assert res.weight == min_matching_weight(sorted(p.sources), sorted(p.targets))
        assert {t for _, t in res.pairs} == set(p.targets)
        assert all(q.is_valid() for q in res.path_system.paths)


def test_reroute_avoids_token():
    occupied = {(0, 0), (1, 0)}
    ps = PathSystem([Path(((0, 0), (1, 0), (1, 1)))])
    assert obstruction_count(ps, occupied) == 2
    out = reroute(ps, occupied)
    assert out.paths[0].vertices == ((0, 0), (0, 1), (1, 1))
    assert obstruction_count(out, occupied) == 1
    assert out.weight == 2


def test_reroute_keeps_unobstructed():
    ps = PathSystem([Path(((0, 0), (0, 1), (1, 1)))])
    assert reroute(ps, {(0, 0)}).paths == ps.paths


def test_reroute_never_worse():
    rng = random.Random(8)
    for _ in range(200):
        p = random_grid(rng)
        ps = mcmf_matching(p).path_system
        out = reroute(ps, set(p.sources))
        assert out.weight == ps.weight
        assert obstruction_count(out, set(p.sources)) <= obstruction_count(ps, set(p.sources))
        for a, b in zip(ps.paths, out.paths):
            assert (a.source, a.target) == (b.source, b.target)


def test_cycle_edges():
    square = {frozenset(e) for e in [((0, 0), (1, 0)), ((1, 0), (1, 1)), ((1, 1), (0, 1)), ((0, 1), (0, 0))]}
    assert len(cycle_edges(square)) == 4
    tail = square | {frozenset(((1, 1), (2, 1)))}
    assert len(cycle_edges(tail)) == 4
    assert cycle_edges({frozenset(((0, 0), (1, 0)))}) == []


def _cyclic_systems(n_wanted=12):
    # distance-minimizing systems with mixed staircase policies, kept when they contain a cycle
    rng = random.Random(21)
    found = []
    while len(found) < n_wanted:
        g = Geometry(rng.randint(3, 6), rng.randint(3, 6))
        verts = g.vertices()
        rng.shuffle(verts)
        k = len(verts) // 3
        p = Problem(g, frozenset(verts[k:2 * k + 2]), frozenset(verts[:k]))
        pairs = mcmf_matching(p).pairs
        paths = [shortest_path(s, t, rng.choice([VERTICAL_FIRST, HORIZONTAL_FIRST])) for s, t in pairs]
        ps = PathSystem(paths)
        if not is_forest(ps):
            found.append((p, ps))
    return found


def test_break_cycles_gives_forest_of_equal_weight():
    for p, ps in _cyclic_systems():
        out = break_cycles(p, ps)
        assert is_forest(out)
        assert out.weight == ps.weight
        targets = {q.target for q in out.paths}
        assert p.targets <= targets


def test_break_cycles_leaves_forest():
    p = Problem(Geometry(3, 1), frozenset({(0, 0)}), frozenset({(2, 0)}))
    ps = mcmf_matching(p).path_system
    assert break_cycles(p, ps).paths == ps.paths


def test_order_chain():
    a, b, c = (0, 0), (1, 0), (2, 0)
    ps = PathSystem([Path((a, b)), Path((b, c))])
    order, dag = order_moves_forest(ps, {a, b})
    assert [(q.source, q.target) for q in order] == [(b, c), (a, b)]
    assert dag.edges == {(0, 1)}


def test_order_star():
    S = {(0, 1), (1, 2), (0, 2)}
    T = {(2, 1), (1, 0), (1, 2)}
    ps = PathSystem([Path(((0, 1), (1, 1), (2, 1))), Path(((1, 2), (1, 1), (1, 0))), Path(((0, 2), (1, 2)))])
    assert is_forest(ps)
    order, dag = order_moves_forest(ps, S)
    sol = Solution.from_ordered_paths(order, dag)
    p = Problem(Geometry(3, 3), frozenset(S), frozenset(T))
    assert validate_solution(p, sol, once_per_token=True).ok


def test_order_isolated_only():
    ps = PathSystem([Path(((0, 0),)), Path(((1, 1),))])
    order, _ = order_moves_forest(ps, {(0, 0), (1, 1)})
    assert order == []


def test_aro_trivial():
    same = frozenset({(0, 0), (2, 1)})
    assert aro(Problem(Geometry(3, 3), same, same)).schedule == []


def test_aro_random_small():
    rng = random.Random(9)
    for _ in range(200):
        p = random_grid(rng)
        sol = aro(p)
        assert validate_solution(p, sol, once_per_token=True).ok
        assert sol.total_displacement == min_matching_weight(sorted(p.sources), sorted(p.targets))
        assert is_forest(sol.path_system)
        assert max(token_move_counts(p.sources, sol.path_system.paths).values(), default=1) == 1


def test_aro_no_heavier_than_heuristics():
    rng = random.Random(10)
    for _ in range(40):
        p = random_centered(rng, 10, 14)
        w = aro(p).total_displacement
        assert w <= bird(p).total_displacement
        assert w <= red_rec(p).total_displacement
