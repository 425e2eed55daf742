"""Command-line entry point: ``atomreconf <verb> ...``."""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import sys
from dataclasses import asdict

from . import io
from .batching import CONSTRAINTS, batch_solution
from .bench import benchmark_runtime, fit_loglog_slope
from .core import Geometry, InfeasibleError, Problem, validate_solution
from .oracle import EXHAUSTIVE_LIMIT, brute_force_min_matching, check_equivalence
from .sim import (BatchingConfig, ExperimentConfig, LossModel, calibrated_loss, estimate_success,
                  half_contour, sample_initial, solve, success_surface, write_summary_json,
                  write_trials_csv)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3
EXIT_VALIDATION = 4

ALGOS = ["exact1d", "redrec", "bird", "aro"]
EXACT = {"exact1d", "aro"}


def _pair(text: str):
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}")


def _ints(text: str):
    return [int(t) for t in text.split(",") if t]


def _emit(text: str, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _default_algo(problem: Problem, algo):
    if algo:
        return algo
    return "exact1d" if problem.geometry.height == 1 else "bird"


def cmd_gen(args) -> int:
    g = Geometry(args.width, args.height)
    sources = sample_initial(g, args.epsilon, args.seed, args.loading)
    if args.height == 1:
        k = args.targets if args.targets is not None else args.width // 2
        lo = (args.width - k) // 2
        problem = Problem.chain(args.width, [x for x, _ in sources], range(lo, lo + k))
    else:
        h = args.h_prime if args.h_prime is not None else args.height // 2
        problem = Problem.centered(g, sources, h)
    _emit(io.dump_json(io.problem_to_dict(problem)), args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    problem = io.load_problem(args.instance)
    algo = _default_algo(problem, args.algo)
    sol = solve(problem, algo)
    report = validate_solution(problem, sol, once_per_token=(algo in ("redrec", "aro")))
    doc = io.solution_to_dict(sol)
    doc["algo"] = algo
    doc["stats"] = sol.stats
    doc["validation"] = {"ok": report.ok, "reasons": report.reasons}
    _emit(io.dump_json(doc), args.out)
    return EXIT_OK if report.ok else EXIT_VALIDATION


def cmd_batch(args) -> int:
    problem = io.load_problem(args.instance)
    if args.solution:
        sol = io.load_solution(args.solution)
    else:
        sol = solve(problem, _default_algo(problem, args.algo))
    report = validate_solution(problem, sol)
    if not report.ok:
        sys.stderr.write("solution does not validate: " + "; ".join(report.reasons) + "\n")
        return EXIT_VALIDATION
    sched = batch_solution(sol, CONSTRAINTS[args.constraints](), args.edge_level)
    _emit(io.dump_json(sched.to_json()), args.out)
    return EXIT_OK


def _loss_from(args) -> LossModel:
    base = calibrated_loss() if args.calibrated else LossModel()
    over = {k: getattr(args, k) for k in ("p_nu", "p_alpha", "tau", "t_nu", "t_alpha", "t_meas")
            if getattr(args, k) is not None}
    return LossModel(**{**asdict(base), **over})


def cmd_simulate(args) -> int:
    if args.chain:
        cfg = ExperimentConfig(family="chain", n_tx=args.chain, n_target=args.chain, eta=args.eta)
    else:
        ntx, nty = args.grid
        tx, ty = args.target if args.target else (ntx, ntx)
        if tx != ntx:
            raise ValueError("the target spans the full grid width")
        cfg = ExperimentConfig(n_tx=ntx, n_ty=nty, n_target=tx * ty)
    cfg.algo = args.algo or ("exact1d" if args.chain else "bird")
    cfg.epsilon = args.epsilon
    cfg.samples = args.samples
    cfg.seed = args.seed
    cfg.loading = args.loading
    cfg.loss = _loss_from(args)
    cfg.batching = BatchingConfig(args.batch, args.constraints, args.edge_level)
    if args.sweep_ntx:
        surface = success_surface(cfg, _ints(args.sweep_ntx), _ints(args.sweep_nty), args.jobs)
        surface["half_contour"] = [half_contour(surface["n_ty"], row) for row in surface["p_bar"]]
        buf = _io.StringIO()
        w = csv.writer(buf)
        w.writerow(["n_tx", "n_ty", "p_bar"])
        for a, ntx in enumerate(surface["n_tx"]):
            for b, nty in enumerate(surface["n_ty"]):
                w.writerow([ntx, nty, surface["p_bar"][a][b]])
        _emit(buf.getvalue() if args.format == "csv" else json.dumps(surface, indent=1), args.out)
        return EXIT_OK
    stats = estimate_success(cfg, args.jobs)
    if args.out:
        write_trials_csv(args.out + ".csv", cfg, stats.trials)
        write_summary_json(args.out + ".json", cfg, stats)
    if args.format == "csv" and not args.out:
        write_trials_csv(sys.stdout, cfg, stats.trials)
    else:
        sys.stdout.write(json.dumps({"p_bar": stats.p_bar, "stderr": stats.stderr,
                                     "samples": stats.samples, "config_hash": cfg.digest()}) + "\n")
    return EXIT_OK


def cmd_bench(args) -> int:
    rows = benchmark_runtime(args.algo or "redrec", _ints(args.sizes), args.repeats, args.seed)
    slope = fit_loglog_slope([r.n_traps for r in rows], [r.seconds for r in rows]) if len(rows) > 1 else float("nan")
    if args.format == "json":
        text = json.dumps({"rows": [asdict(r) for r in rows], "slope_vs_n_traps": slope}, indent=1)
    else:
        buf = _io.StringIO()
        w = csv.writer(buf)
        w.writerow(["algo", "width", "height", "n_traps", "seconds"])
        for r in rows:
            w.writerow([r.algo, r.width, r.height, r.n_traps, f"{r.seconds:.6g}"])
        buf.write(f"# loglog slope vs n_traps: {slope:.3f}\n")
        text = buf.getvalue()
    _emit(text, args.out)
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    problem = io.load_problem(args.instance)
    algos = [args.algo] if args.algo else [a for a in ALGOS if a != "exact1d" or problem.geometry.height == 1]
    mode = "exhaustive" if len(problem.targets) <= EXHAUSTIVE_LIMIT else "hungarian"
    oracle = brute_force_min_matching(sorted(problem.sources), sorted(problem.targets), mode=mode)
    verdicts = []
    ok = True
    for algo in algos:
        if algo in ("redrec", "bird") and problem.target_region is None:
            continue
        sol = solve(problem, algo)
        v = check_equivalence(sol.total_displacement, oracle.weight, algo in EXACT)
        ok &= v.ok
        verdicts.append({"algo": algo, "weight": sol.total_displacement, "oracle": oracle.weight,
                         "gap": v.gap, "exact": v.exact, "ok": v.ok})
    _emit(json.dumps({"oracle_mode": mode, "verdicts": verdicts}, indent=1), args.out)
    return EXIT_OK if ok else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="atomreconf", description="Atom reconfiguration solvers and benchmarks")
    sub = ap.add_subparsers(dest="verb", required=True)

    def common(p, algo=True):
        if algo:
            p.add_argument("--algo", choices=ALGOS)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out")
        p.add_argument("--format", choices=["json", "csv"], default="json")

    p = sub.add_parser("gen", help="random centred instance")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, default=1)
    p.add_argument("--h-prime", type=int)
    p.add_argument("--targets", type=int, help="target count on chains")
    p.add_argument("--epsilon", type=float, default=0.6)
    p.add_argument("--loading", choices=["exact", "bernoulli"], default="exact")
    common(p, algo=False)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("solve", help="solve an instance file")
    p.add_argument("instance")
    common(p)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("batch", help="batch a solution")
    p.add_argument("instance")
    p.add_argument("--solution")
    p.add_argument("--constraints", choices=sorted(CONSTRAINTS), default="none")
    p.add_argument("--edge-level", action="store_true")
    common(p)
    p.set_defaults(fn=cmd_batch)

    p = sub.add_parser("simulate", help="Monte Carlo success probability")
    p.add_argument("--grid", type=_pair, default=(32, 64))
    p.add_argument("--target", type=_pair)
    p.add_argument("--chain", type=int, help="chain target size instead of a grid")
    p.add_argument("--eta", type=float, default=0.5)
    p.add_argument("--epsilon", type=float, default=0.6)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--batch", dest="batch", action="store_true")
    p.add_argument("--no-batch", dest="batch", action="store_false")
    p.set_defaults(batch=False)
    p.add_argument("--constraints", choices=sorted(CONSTRAINTS), default="none")
    p.add_argument("--edge-level", action="store_true")
    p.add_argument("--loading", choices=["exact", "bernoulli"], default="exact")
    p.add_argument("--calibrated", action="store_true", help="use the calibrated operation durations")
    for name in ("p_nu", "p_alpha", "tau", "t_nu", "t_alpha", "t_meas"):
        p.add_argument("--" + name.replace("_", "-"), dest=name, type=float)
    p.add_argument("--sweep-ntx", help="comma list; with --sweep-nty runs a success surface")
    p.add_argument("--sweep-nty")
    common(p)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("bench", help="runtime scaling")
    p.add_argument("--sizes", default="8,12,16,24,32")
    p.add_argument("--repeats", type=int, default=3)
    common(p)
    p.set_defaults(fn=cmd_bench, format="csv")

    p = sub.add_parser("oracle-check", help="compare solver weights with a brute-force matching")
    p.add_argument("instance")
    common(p)
    p.set_defaults(fn=cmd_oracle_check)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except InfeasibleError as exc:
        sys.stderr.write(f"infeasible: {exc}\n")
        return EXIT_INFEASIBLE
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"invalid input: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
