"""Use-and-then-forget statistics, SINR/rate evaluation, and the MSE objective.

Convention used throughout the package: h^H v is the conjugate transpose of
the channel times the beamformer.  For fixed beamformers, the SINR depends on
the ensemble only through the long-term moments (a, B, n) collected here, so
power control never touches raw samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelEnsemble
from .errors import DegenerateBeamformerError

# |a_k|^2 below this is treated as E[h_k^H v_k] = 0 (degenerate beamformer)
DEGENERACY_THRESHOLD = 1e-30


@dataclass
class UatFStatistics:
    """Long-term moments sufficient to evaluate SINR_k(v_k, p) for any p.

    a[k] = E[h_k^H v_k], B[j, k] = E[|h_j^H v_k|^2], n[k] = E[||v_k||^2].
    """

    a: np.ndarray    # (K,) complex
    B: np.ndarray    # (K, K) nonnegative
    n: np.ndarray    # (K,) nonnegative

    @property
    def K(self) -> int:
        return len(self.a)

    def degenerate(self) -> np.ndarray:
        """Boolean mask of UEs whose beamformer has a vanishing mean channel."""
        return np.abs(self.a) ** 2 < DEGENERACY_THRESHOLD


def _realized(ensemble, beamformers):
    if hasattr(beamformers, "realize"):
        return beamformers.realize(ensemble)
    return np.asarray(beamformers)


def estimate_statistics(ensemble: ChannelEnsemble, beamformers,
                        sample_weights: np.ndarray | None = None) -> UatFStatistics:
    """Empirical UatF moments of a beamformer set over the ensemble.

    `beamformers` is a BeamformerSet or a (n_sim, L, N, K) array of realized
    beamformers.  `sample_weights` replaces the uniform empirical mean with a
    weighted one (used for exact finite distributions).
    """
    v = _realized(ensemble, beamformers)
    n_sim, L, N, K = v.shape
    H = ensemble.stacked()
    V = v.reshape(n_sim, L * N, K)
    if sample_weights is None:
        w = np.full(n_sim, 1.0 / n_sim)
    else:
        w = np.asarray(sample_weights, dtype=float)
        w = w / w.sum()
    # G[n, j, k] = h_j^H v_k on sample n
    G = np.conj(H).transpose(0, 2, 1) @ V
    a = np.einsum("s,skk->k", w, G)
    B = np.einsum("s,sjk->jk", w, np.abs(G) ** 2).real
    n = np.einsum("s,sak->k", w, np.abs(V) ** 2).real
    return UatFStatistics(a=a, B=B, n=n)


def sinr(stats: UatFStatistics, p: np.ndarray, k: int | None = None):
    """UatF SINR; vector over all UEs if k is None.

    SINR_k = p_k |a_k|^2 / (p_k (B_kk - |a_k|^2) + sum_{j!=k} p_j B_jk + n_k).
    """
    p = np.asarray(p, dtype=float)
    deg = stats.degenerate()
    if k is not None and deg[k]:
        raise DegenerateBeamformerError(f"UE {k}: E[h_k^H v_k] = 0, SINR undefined")
    if k is None and deg.any():
        raise DegenerateBeamformerError(
            f"UEs {np.flatnonzero(deg).tolist()}: E[h_k^H v_k] = 0, SINR undefined")
    a2 = np.abs(stats.a) ** 2
    den = p @ stats.B - p * a2 + stats.n
    # other UEs may carry zero beamformers (0/0); only requested entries matter
    with np.errstate(invalid="ignore", divide="ignore"):
        values = p * a2 / den
    return values if k is None else float(values[k])


def rate(stats: UatFStatistics, p: np.ndarray, k: int | None = None):
    """Achievable rate log2(1 + SINR) in bits/s/Hz."""
    return np.log2(1.0 + sinr(stats, p, k))


def mse(ensemble: ChannelEnsemble, v_k: np.ndarray, k: int, p: np.ndarray,
        sample_weights: np.ndarray | None = None) -> float:
    """Empirical MSE objective for UE k.

    E[||diag(p)^{1/2} H^H v_k - e_k||^2] + E[||v_k||^2], with v_k given per
    sample as (n_sim, N*L) or (n_sim, L, N).
    """
    p = np.asarray(p, dtype=float)
    H = ensemble.stacked()
    v = np.asarray(v_k).reshape(len(H), -1)
    if sample_weights is None:
        w = np.full(len(H), 1.0 / len(H))
    else:
        w = np.asarray(sample_weights, dtype=float)
        w = w / w.sum()
    err = np.sqrt(p)[None, :] * np.einsum("sak,sa->sk", np.conj(H), v)
    err[:, k] -= 1.0
    return float(w @ (np.sum(np.abs(err) ** 2, axis=1) + np.sum(np.abs(v) ** 2, axis=1)))
