"""Walk through scenario generation: AP grid, path loss, shadowing, clusters.

Run:  python3 demos/demo_scenario.py
"""

import numpy as np

from cellfree_maxmin import NetworkConfig, build_scenario

cfg = NetworkConfig(L=16, N=8, K=64, Q=4, n_sim=1, seed=0)
scn = build_scenario(cfg)

print(f"{cfg.L} APs on a {int(np.sqrt(cfg.L))}x{int(np.sqrt(cfg.L))} grid "
      f"over a {cfg.area_side_m:.0f} m square:")
print(np.unique(scn.ap_positions[:, 0]))

gains_db = 10 * np.log10(scn.gains)
print(f"\nchannel gains over noise: {gains_db.min():.1f} .. "
      f"{gains_db.max():.1f} dB (median {np.median(gains_db):.1f} dB)")

# each UE is served by the Q strongest APs; check how local the clusters are
dist = np.linalg.norm(scn.ap_positions[:, None] - scn.ue_positions[None],
                      axis=-1)
served_dist = np.take_along_axis(dist.T, scn.clusters, axis=1)
print(f"serving-AP distance: mean {served_dist.mean():.0f} m "
      f"(vs {dist.mean():.0f} m over all pairs)")

loads = np.bincount(scn.clusters.ravel(), minlength=cfg.L)
print(f"UEs per AP: min {loads.min()}, max {loads.max()} "
      f"(ideal {cfg.K * cfg.Q // cfg.L})")
