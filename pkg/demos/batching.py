"""How much batching shortens a red-rec solution, with and without the column/row rule."""

from atomreconf import Geometry, Problem, red_rec
from atomreconf.batching import batch_solution, deployed_constraint
from atomreconf.sim import edi_runs, sample_initial

g = Geometry(24, 48)
problem = Problem.centered(g, sample_initial(g, 0.6, seed=4), h_prime=24)
sol = red_rec(problem)
moving = sum(1 for p in sol.path_system.paths if p.length)
print(f"unbatched: {sol.total_displacement} displacements, {moving} extract/implant cycles")

for label, cons, edge_level in [("free, per path", [], False), ("free, per move", [], True),
                                ("column/row rule", deployed_constraint(), False)]:
    sched = batch_solution(sol, cons, edge_level)
    print(f"{label:16s} {len(sched):5d} batches, {edi_runs(sorted(problem.sources), sched.moves()):5d} cycles")
