"""Solve one random 16x32 grid with red-rec, bird and aro and compare their moves."""

from atomreconf import Geometry, Problem, aro, bird, red_rec, validate_solution
from atomreconf.oracle import min_matching_weight
from atomreconf.sim import sample_initial

g = Geometry(16, 32)
problem = Problem.centered(g, sample_initial(g, 0.6, seed=1), h_prime=16)
print(f"{len(problem.sources)} atoms, {len(problem.targets)} targets")
print(f"minimum matching weight: {min_matching_weight(sorted(problem.sources), sorted(problem.targets))}")

for name, solver in [("red-rec", red_rec), ("bird", bird), ("aro", aro)]:
    sol = solver(problem)
    ok = validate_solution(problem, sol).ok
    print(f"{name:8s} displacements {sol.total_displacement:4d}  displaced atoms {sol.displaced_tokens:4d}  valid {ok}")
