"""Check the distributed-beamformer pipeline against brute force.

On a small finite sample space the optimal constrained MMSE beamformer is a
single linear solve over per-cell variables, so the two-stage construction
(local MMSE stage + statistical mixing stage) can be verified exactly.

Run:  python3 demos/demo_oracle.py
"""

import numpy as np

from cellfree_maxmin import build_team_mmse, mse
from cellfree_maxmin.oracle import (exact_team_mmse, random_product_world,
                                    world_ensemble, world_scenario)

rng = np.random.default_rng(0)

for trial in range(5):
    world = random_product_world(rng, n_antennas=trial % 2 + 1,
                                 cluster_size=trial % 2 + 1)
    p = rng.uniform(0.3, 2.0, world.K)
    scn = world_scenario(world)
    ens = world_ensemble(world, scn)
    v = build_team_mmse(ens, scn, p).realize(ens)

    for k in range(world.K):
        v_star, mse_star = exact_team_mmse(world, p, k)
        err = np.max(np.abs(v[..., k] - v_star)) / np.max(np.abs(v_star))
        mse_pipe = mse(ens, v[..., k], k, p)
        print(f"world {trial} (M={world.M:2d}, N={world.N}), UE {k}: "
              f"beamformer err {err:.1e}, "
              f"MSE {mse_pipe:.10f} vs exact {mse_star:.10f}")
