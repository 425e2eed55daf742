"""Exact 1D reconfiguration on a chain, direct and split into independent pieces."""

import numpy as np

from atomreconf.exact1d import assign_1d, decompose_1d, solve_1d, solve_1d_decomposed

rng = np.random.default_rng(0)
n = 60
sources = sorted(rng.choice(n, 36, replace=False).tolist())
targets = list(range(15, 45))

m = assign_1d(n, sources, targets)
print("matching weight", m.weight)
for sub in decompose_1d(n, sources, targets):
    print(f"  piece [{sub.lo}, {sub.hi}]: {len(sub.sources)} sources, {len(sub.targets)} targets")

direct = solve_1d(n, sources, targets)
split = solve_1d_decomposed(n, sources, targets, jobs=2)
print("displacements direct", direct.total_displacement, "split", split.total_displacement)
print("first moves:", direct.schedule[:5])
