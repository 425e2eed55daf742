"""Atom reconfiguration on chains and grids: exact 1D, red-rec, bird, aro, batching and simulation."""

from .aro import aro
from .batching import batch_moves, deployed_constraint
from .bird import bird
from .core import (Geometry, InfeasibleError, Path, PathSystem, Problem, Solution, TargetRegion,
                   validate_solution)
from .exact1d import assign_1d, assign_1d_generalized, solve_1d
from .redrec import red_rec

__all__ = ["aro", "assign_1d", "assign_1d_generalized", "batch_moves", "bird", "deployed_constraint",
           "Geometry", "InfeasibleError", "Path", "PathSystem", "Problem", "red_rec", "Solution",
           "solve_1d", "TargetRegion", "validate_solution"]
