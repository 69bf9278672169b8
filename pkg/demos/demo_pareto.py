"""Trace the two-user rate region boundary by sweeping SINR weights.

Each weight vector steers the max-min balance toward one user; the converged
rate pairs are mutually non-dominating points on the boundary.

Run:  python3 demos/demo_pareto.py
"""

import numpy as np

from cellfree_maxmin import (NetworkConfig, algorithm_fp, build_scenario,
                             rate, sample_ensemble)

cfg = NetworkConfig(L=1, N=2, K=2, Q=1, n_sim=150, seed=8,
                    ap_positions=[[500.0, 500.0]])
scn = build_scenario(cfg)
ens = sample_ensemble(scn, cfg.n_sim, cfg.seed, n_antennas=cfg.N)

print("w2/w1   rate 1   rate 2   [bits/s/Hz]")
for t in np.logspace(-0.8, 0.8, 10):
    res = algorithm_fp(ens, scn, weights=np.array([1.0, t]), tol=1e-8,
                       max_iter=200)
    r = rate(res.stats, res.p)
    print(f"{t:5.2f}   {r[0]:.4f}   {r[1]:.4f}")
