import random
from collections import Counter

import pytest

from atomreconf.batching import (Batch, batch_moves, batch_solution, deployed_constraint, direction,
                                 same_line_same_direction)
from atomreconf.bird import bird
from atomreconf.core import Geometry, MoveDag, Problem, Path, PathSystem, execute_batches, execute_schedule
from atomreconf.redrec import red_rec
from atomreconf.sim import sample_initial

from conftest import random_centered


def test_disjoint_single_edges_share_a_batch():
    ps = PathSystem([Path(((0, 0), (1, 0))), Path(((0, 3), (1, 3)))])
    sched = batch_moves(ps, MoveDag(2, set()))
    assert [len(b) for b in sched.batches] == [2]


def test_shared_vertex_splits_batches():
    ps = PathSystem([Path(((1, 1), (2, 1))), Path(((0, 1), (1, 1)))])
    sched = batch_moves(ps, MoveDag(2, {(0, 1)}))
    assert sched.moves() == [[((1, 1), (2, 1))], [((0, 1), (1, 1))]]
    assert len(batch_moves(ps, MoveDag(2, set()))) == 2


def test_single_path_is_sequential():
    ps = PathSystem([Path(((0, 0), (0, 1), (0, 2), (0, 3)))])
    sched = batch_moves(ps, MoveDag(1, set()))
    assert [len(b) for b in sched.batches] == [1, 1, 1]


def test_constraint_predicate():
    c = 4
    assert same_line_same_direction(((c, 3), (c, 4)), ((c, 7), (c, 8)))
    assert not same_line_same_direction(((c, 3), (c, 4)), ((c, 7), (c, 6)))
    assert not same_line_same_direction(((c, 3), (c, 4)), ((c + 1, 3), (c + 1, 4)))
    assert same_line_same_direction(((0, 2), (1, 2)), ((5, 2), (6, 2)))
    assert deployed_constraint() == [same_line_same_direction]


def test_batch_tags():
    b = Batch([((2, 0), (2, 1)), ((2, 5), (2, 6))])
    assert (b.axis, b.dir) == ("col", "up")
    mixed = Batch([((2, 0), (2, 1)), ((3, 5), (3, 4))])
    assert mixed.axis is None and mixed.dir is None
    assert direction(((1, 1), (0, 1))) == "left"


def test_cyclic_dag_rejected():
    ps = PathSystem([Path(((0, 0), (1, 0))), Path(((3, 0), (4, 0)))])
    with pytest.raises(ValueError):
        batch_moves(ps, MoveDag(2, {(0, 1), (1, 0)}))


@pytest.mark.parametrize("solver", [red_rec, bird])
@pytest.mark.parametrize("edge_level", [False, True])
@pytest.mark.parametrize("constrained", [False, True])
def test_batching_properties(solver, edge_level, constrained):
    rng = random.Random(31)
    cons = deployed_constraint() if constrained else []
    for _ in range(60):
        p = random_centered(rng, 12, 18)
        sol = solver(p)
        sched = batch_solution(sol, cons, edge_level)
        assert Counter(m for b in sched.moves() for m in b) == Counter(sol.path_system.edges())
        for b in sched.batches:
            verts = [v for m in b.moves for v in m]
            assert len(verts) == len(set(verts))
            for i, a in enumerate(b.moves):
                for other in b.moves[i + 1:]:
                    assert all(c(a, other) for c in cons)
        assert execute_batches(p.sources, sched.moves()) == execute_schedule(p.sources, sol.schedule)
        assert len(sched) <= sol.total_displacement


def test_batching_reduces_rounds():
    g = Geometry(16, 32)
    p = Problem.centered(g, sample_initial(g, 0.6, 3), 16)
    sol = red_rec(p)
    assert len(batch_solution(sol)) < sol.total_displacement
    assert len(batch_solution(sol, edge_level=True)) <= len(batch_solution(sol))
