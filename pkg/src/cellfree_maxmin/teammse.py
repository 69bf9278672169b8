"""Distributed beamformer construction: team MMSE and the matched filter.

A beamformer set is stored through its long-term parameters only.  For the
team-MMSE rule these are the per-AP augmented noise scalars psi_l and the
statistical-stage vectors c_{l,k}; realizing the set on an ensemble applies
the per-sample local MMSE stage V_l and mixes it as v_{l,k} = V_l c_{l,k}.
Every realized block is therefore a deterministic function of AP l's local
CSI and long-term parameters alone, which is exactly the information
constraint of distributed operation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .channel import ChannelEnsemble, LocalCSIView, masked_realizations
from .errors import StatisticalStageError
from .scenario import NetworkScenario


@dataclass
class BeamformerSet:
    """Long-term representation of per-UE distributed beamformers."""

    rule: str                      # "team_mmse" | "matched_filter"
    serving_mask: np.ndarray       # (L, K) bool
    clusters: np.ndarray           # (K, Q)
    p: np.ndarray | None = None    # power vector used at build time
    psi: np.ndarray | None = None  # (L,) augmented noise scalars
    c: np.ndarray | None = None    # (L, K, K); c[l, :, k] is c_{l,k}

    def realize(self, ensemble: ChannelEnsemble) -> np.ndarray:
        """Per-sample beamformers, shape (n_sim, L, N, K)."""
        views = masked_realizations(ensemble)
        if self.rule == "matched_filter":
            return views
        V = _local_stage_all(views, self.p, self.psi)
        # v[n, l, :, k] = V_l(n) @ c_{l,k}
        return V @ self.c[None, :, :, :]


def augmented_noise(scenario: NetworkScenario, p: np.ndarray) -> np.ndarray:
    """psi_l = 1 + sum of p_k * gamma_{l,k} over UEs not served by AP l."""
    out_of_cluster = ~scenario.serving_mask
    return 1.0 + (out_of_cluster * scenario.gains * np.asarray(p)[None, :]).sum(axis=1)


def _local_stage_all(views: np.ndarray, p: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """Local MMSE stage for every sample and AP at once.

    views: (n_sim, L, N, K) masked channels; returns V with the same shape,
    V_l = (H_l diag(p) H_l^H + psi_l I)^{-1} H_l diag(p)^{1/2}.
    """
    n_sim, L, N, K = views.shape
    p = np.asarray(p, dtype=float)
    Hp = views * p[None, None, None, :]
    G = Hp @ np.conj(views).transpose(0, 1, 3, 2)            # (n, L, N, N)
    G = G + psi[None, :, None, None] * np.eye(N)[None, None]
    rhs = views * np.sqrt(p)[None, None, None, :]
    return np.linalg.solve(G, rhs)


def local_stage(view: LocalCSIView | np.ndarray, p: np.ndarray, psi_l: float) -> np.ndarray:
    """Local MMSE stage of a single AP, shape (n_sim, N, K)."""
    channels = view.channels if isinstance(view, LocalCSIView) else np.asarray(view)
    V = _local_stage_all(channels[:, None], p, np.asarray([psi_l], dtype=float))
    return V[:, 0]


def estimate_pi(ensemble: ChannelEnsemble, p: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """Pi_l = E[diag(p)^{1/2} Hhat_l^H V_l], stacked as (L, K, K)."""
    views = masked_realizations(ensemble)
    V = _local_stage_all(views, p, psi)
    pi = np.conj(views).transpose(0, 1, 3, 2) @ V             # (n, L, K, K)
    return np.sqrt(np.asarray(p, dtype=float))[None, :, None] * pi.mean(axis=0)


def solve_statistical_stage(pi: np.ndarray, clusters: np.ndarray, k: int) -> np.ndarray:
    """Statistical-stage vectors of UE k, shape (Q, K), aligned with clusters[k].

    Solves the stacked block system with identity diagonal blocks and Pi_j
    off-diagonal blocks:  c_{l,k} + sum_{j in L_k \\ {l}} Pi_j c_{j,k} = e_k.
    """
    members = np.asarray(clusters[k])
    Q = len(members)
    K = pi.shape[1]
    A = np.zeros((Q * K, Q * K), dtype=complex)
    b = np.zeros(Q * K, dtype=complex)
    for i in range(Q):
        A[i * K:(i + 1) * K, i * K:(i + 1) * K] = np.eye(K)
        for j in range(Q):
            if j != i:
                A[i * K:(i + 1) * K, j * K:(j + 1) * K] = pi[members[j]]
        b[i * K + k] = 1.0
    try:
        x = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise StatisticalStageError(
            f"statistical-stage system for UE {k} is singular",
            condition_number=np.linalg.cond(A)) from exc
    if not np.all(np.isfinite(x)):
        raise StatisticalStageError(
            f"statistical-stage solve for UE {k} returned non-finite values",
            condition_number=np.linalg.cond(A))
    return x.reshape(Q, K)


def build_team_mmse(ensemble: ChannelEnsemble, scenario: NetworkScenario,
                    p: np.ndarray) -> BeamformerSet:
    """Optimal distributed beamformers for power vector p (team-MMSE rule)."""
    p = np.asarray(p, dtype=float)
    psi = augmented_noise(scenario, p)
    pi = estimate_pi(ensemble, p, psi)
    K = scenario.K
    c = np.zeros((scenario.L, K, K), dtype=complex)
    for k in range(K):
        ck = solve_statistical_stage(pi, scenario.clusters, k)
        for i, l in enumerate(scenario.clusters[k]):
            c[l, :, k] = ck[i]
    return BeamformerSet(rule="team_mmse", serving_mask=scenario.serving_mask,
                         clusters=scenario.clusters, p=p, psi=psi, c=c)


def build_matched_filter(ensemble: ChannelEnsemble,
                         scenario: NetworkScenario) -> BeamformerSet:
    """Per-sample conjugate beamforming on local CSI (classical baseline)."""
    return BeamformerSet(rule="matched_filter", serving_mask=scenario.serving_mask,
                         clusters=scenario.clusters)


def params_to_dict(bf: BeamformerSet) -> dict:
    """Long-term parameter dump: psi per AP, c vectors as interleaved re/im."""
    if bf.rule != "team_mmse":
        return {"rule": bf.rule}
    c_out = []
    for l in range(bf.c.shape[0]):
        row = []
        for k in range(bf.c.shape[2]):
            vec = bf.c[l, :, k]
            row.append(np.column_stack([vec.real, vec.imag]).ravel().tolist())
        c_out.append(row)
    return {"rule": bf.rule, "psi": bf.psi.tolist(), "c": c_out,
            "p": bf.p.tolist()}


def dump_params(bf: BeamformerSet, path):
    with open(path, "w") as f:
        json.dump(params_to_dict(bf), f)
