"""Monte Carlo success probability on a 32x64 grid (about a minute per algorithm)."""

import sys

from atomreconf.sim import ExperimentConfig, calibrated_loss, estimate_success

samples = int(sys.argv[1]) if len(sys.argv) > 1 else 200
for algo in ("redrec", "bird"):
    cfg = ExperimentConfig(n_tx=32, n_ty=64, algo=algo, samples=samples, seed=0, loss=calibrated_loss())
    stats = estimate_success(cfg)
    print(f"{algo:7s} p = {stats.p_bar:.3f} +- {stats.stderr:.3f}")
    for k, (nu, alpha, n) in enumerate(zip(stats.per_cycle["N_nu"], stats.per_cycle["N_alpha"],
                                           stats.per_cycle["trials"]), 1):
        print(f"   cycle {k}: N_nu {nu:7.1f}  N_alpha {alpha:6.1f}  ({n} trials)")
