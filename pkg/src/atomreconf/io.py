"""JSON formats for instances, solutions and batch schedules."""

from __future__ import annotations

import json
from typing import Union

from .core import Geometry, MoveDag, Path, PathSystem, Problem, Solution


def _vertex(v):
    x, y = v
    return (int(x), int(y))


def problem_to_dict(problem: Problem) -> dict:
    g = problem.geometry
    doc = {"width": g.width, "height": g.height, "sources": [list(v) for v in sorted(problem.sources)]}
    if problem.target_region is not None:
        doc["target_region"] = {"h_prime": problem.target_region.h_prime}
    else:
        doc["targets"] = [list(v) for v in sorted(problem.targets)]
    return doc


def problem_from_dict(doc: dict) -> Problem:
    try:
        g = Geometry(int(doc["width"]), int(doc.get("height", 1)))
        sources = [_vertex(v) for v in doc["sources"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed instance: {exc}") from exc
    if "target_region" in doc:
        return Problem.centered(g, sources, int(doc["target_region"]["h_prime"]))
    if "targets" not in doc:
        raise ValueError("instance needs targets or a target_region")
    return Problem(g, frozenset(sources), frozenset(_vertex(v) for v in doc["targets"]))


def solution_to_dict(solution: Solution) -> dict:
    return {
        "moves": [[list(a), list(b)] for a, b in solution.schedule],
        "dag_edges": sorted([i, j] for i, j in solution.dag.edges),
        "paths": [[list(v) for v in p.vertices] for p in solution.path_system.paths],
    }


def solution_from_dict(doc: dict) -> Solution:
    paths = [Path(tuple(_vertex(v) for v in p)) for p in doc["paths"]]
    schedule = [(_vertex(a), _vertex(b)) for a, b in doc["moves"]]
    dag = MoveDag(len(paths), {(int(i), int(j)) for i, j in doc.get("dag_edges", [])})
    return Solution(PathSystem(paths), schedule, dag)


def load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def dump_json(doc: dict, path: Union[str, None] = None) -> str:
    text = json.dumps(doc, indent=1, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text


def load_problem(path) -> Problem:
    return problem_from_dict(load_json(path))


def load_solution(path) -> Solution:
    return solution_from_dict(load_json(path))
