"""Brute-force ground truth on tiny finite sample spaces.

A FiniteWorld enumerates the channel distribution explicitly, so team-MMSE
optimality, the MSE-SINR identity and max-min power control can be verified
exactly: expectations are finite sums, the information constraint becomes
"constant on each cell of the AP's partition of atoms", and the constrained
MMSE problem is one positive-definite linear solve over the stacked cell
variables.

Worlds built by `random_product_world` have independent per-AP factors whose
unknown (masked) columns are zero mean, mutually uncorrelated, with exact
covariance gamma * I.  Under those moment conditions the closed-form
statistical-stage construction is the exact optimizer of the enumerated
distribution, which is what makes oracle-vs-pipeline comparisons meaningful
at solver precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelEnsemble
from .scenario import NetworkScenario, serving_mask_from_clusters
from .uatf import UatFStatistics, estimate_statistics, sinr as uatf_sinr


@dataclass
class FiniteWorld:
    """Explicit probability space with per-atom channel matrices."""

    probs: np.ndarray        # (M,) positive, sums to 1
    channels: np.ndarray     # (M, L, N, K) complex
    gains: np.ndarray        # (L, K) per-entry variance of each block
    clusters: np.ndarray     # (K, Q)

    def __post_init__(self):
        if abs(self.probs.sum() - 1.0) > 1e-12 or np.any(self.probs <= 0):
            raise ValueError("atom probabilities must be positive and sum to 1")

    @property
    def M(self) -> int:
        return len(self.probs)

    @property
    def L(self) -> int:
        return self.channels.shape[1]

    @property
    def N(self) -> int:
        return self.channels.shape[2]

    @property
    def K(self) -> int:
        return self.channels.shape[3]

    @property
    def serving_mask(self) -> np.ndarray:
        return serving_mask_from_clusters(self.clusters, self.L)

    def local_channels(self, l: int) -> np.ndarray:
        """Masked local CSI of AP l per atom, shape (M, N, K)."""
        return self.channels[:, l] * self.serving_mask[l][None, None, :]

    def partition(self, l: int) -> np.ndarray:
        """Cell labels of AP l's information partition, shape (M,).

        Atoms with bit-identical local CSI fall in the same cell.
        """
        views = self.local_channels(l) + 0.0   # normalize -0.0 before hashing
        keys = [views[m].tobytes() for m in range(self.M)]
        labels = {}
        out = np.empty(self.M, dtype=int)
        for m, key in enumerate(keys):
            out[m] = labels.setdefault(key, len(labels))
        return out


def world_scenario(world: FiniteWorld, power_budget_lin: float = 1.0,
                   weights: np.ndarray | None = None) -> NetworkScenario:
    """Scenario wrapper so the main pipeline can run on a finite world."""
    return NetworkScenario(
        ap_positions=np.zeros((world.L, 2)),
        ue_positions=np.zeros((world.K, 2)),
        gains=world.gains,
        clusters=world.clusters,
        serving_mask=world.serving_mask,
        power_budget_lin=power_budget_lin,
        weights=np.ones(world.K) if weights is None else np.asarray(weights, float),
    )


def world_ensemble(world: FiniteWorld, scenario: NetworkScenario) -> ChannelEnsemble:
    """Ensemble that enumerates the atoms once (requires uniform atoms)."""
    if not np.allclose(world.probs, 1.0 / world.M):
        raise ValueError("atom-enumerating ensembles need uniform probabilities")
    return ChannelEnsemble(realizations=world.channels.copy(), scenario=scenario)


def exact_statistics(world: FiniteWorld, v: np.ndarray) -> UatFStatistics:
    """Exact UatF moments of per-atom beamformers v, shape (M, L, N, K)."""
    scen = world_scenario(world)
    ens = ChannelEnsemble(realizations=world.channels, scenario=scen)
    return estimate_statistics(ens, v, sample_weights=world.probs)


def exact_sinr(world: FiniteWorld, v: np.ndarray, p: np.ndarray, k: int) -> float:
    """Exact-expectation UatF SINR of UE k for per-atom beamformers v."""
    return uatf_sinr(exact_statistics(world, v), p, k)


def exact_team_mmse(world: FiniteWorld, p: np.ndarray, k: int):
    """Exact constrained MMSE beamformer of UE k and its minimal MSE.

    Minimizes  E[||diag(p)^{1/2} H^H v - e_k||^2] + E[||v||^2]  over all v
    whose block at AP l is constant on each cell of AP l's partition and zero
    for APs outside the serving cluster.  Returns (v, mse) with v of shape
    (M, L, N, K->column k only: (M, L, N)).
    """
    p = np.asarray(p, dtype=float)
    members = list(world.clusters[k])
    N, M = world.N, world.M
    labels = {l: world.partition(l) for l in members}
    n_cells = {l: labels[l].max() + 1 for l in members}
    # variable layout: blocks of size N per (serving AP, cell), in order
    offsets, D = {}, 0
    for l in members:
        offsets[l] = D
        D += N * n_cells[l]

    A = np.zeros((D, D), dtype=complex)
    b = np.zeros(D, dtype=complex)
    sqp = np.sqrt(p)
    for m in range(M):
        w = world.probs[m]
        # per-atom map: rows of F are sqrt(p_j) h_j^H restricted to AP blocks
        F = {l: sqp[:, None] * np.conj(world.channels[m, l]).T for l in members}  # (K, N)
        for l1 in members:
            r = offsets[l1] + N * labels[l1][m]
            for l2 in members:
                cidx = offsets[l2] + N * labels[l2][m]
                blk = np.conj(F[l1]).T @ F[l2]
                if l1 == l2:
                    blk = blk + np.eye(N)
                A[r:r + N, cidx:cidx + N] += w * blk
            b[r:r + N] += w * np.conj(F[l1][k])
    x = np.linalg.solve(A, b)

    v = np.zeros((M, world.L, N), dtype=complex)
    for l in members:
        for m in range(M):
            o = offsets[l] + N * labels[l][m]
            v[m, l] = x[o:o + N]
    return v, objective_mse(world, v, p, k)


def objective_mse(world: FiniteWorld, v: np.ndarray, p: np.ndarray, k: int) -> float:
    """Exact MSE objective of per-atom beamformer v (shape (M, L, N)) for UE k."""
    p = np.asarray(p, dtype=float)
    vs = v.reshape(world.M, world.L * world.N)
    H = world.channels.reshape(world.M, world.L * world.N, world.K)
    err = np.sqrt(p)[None, :] * np.einsum("mak,ma->mk", np.conj(H), vs)
    err[:, k] -= 1.0
    per_atom = np.sum(np.abs(err) ** 2, axis=1) + np.sum(np.abs(vs) ** 2, axis=1)
    return float(world.probs @ per_atom)


def random_feasible_beamformer(world: FiniteWorld, k: int,
                               rng: np.random.Generator) -> np.ndarray:
    """Random competitor satisfying measurability and clustering constraints.

    Draws an unconstrained random per-atom beamformer, then projects: zero
    outside the cluster, and cell-wise probability-weighted averaging (the
    conditional expectation onto each AP's information subfield).
    """
    v = (rng.standard_normal((world.M, world.L, world.N))
         + 1j * rng.standard_normal((world.M, world.L, world.N)))
    out = np.zeros_like(v)
    for l in world.clusters[k]:
        labels = world.partition(l)
        for cell in range(labels.max() + 1):
            idx = labels == cell
            w = world.probs[idx]
            out[idx, l] = (w[:, None] * v[idx, l]).sum(axis=0) / w.sum()
    return out


def grid_maxmin_power(stats: UatFStatistics, P: float, resolution: float,
                      weights: np.ndarray | None = None):
    """Exhaustive grid search of max_p min_k SINR_k / w_k over [0, P]^K.

    Returns (p_star, objective).  Refuses K > 3 (grid blow-up).
    """
    K = stats.K
    if K > 3:
        raise ValueError(f"grid search infeasible for K={K} > 3")
    weights = np.ones(K) if weights is None else np.asarray(weights, dtype=float)
    n = int(round(P / resolution)) + 1
    axes = [np.linspace(0.0, P, n)] * K
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, K)
    a2 = np.abs(stats.a) ** 2
    den = grid @ stats.B - grid * a2[None, :] + stats.n[None, :]
    obj = np.min(grid * a2[None, :] / den / weights[None, :], axis=1)
    best = int(np.argmax(obj))
    return grid[best], float(obj[best])


def random_product_world(rng: np.random.Generator, n_antennas: int = 1,
                         cluster_size: int = 1, L: int = 2, K: int = 2,
                         served_atoms: int = 2) -> FiniteWorld:
    """Random L=2, K=2 product world with exactly moment-matched masked columns.

    Per AP the sample space is a product of an (arbitrary) served-column factor
    and, for Q=1, a masked-column factor with mean zero and covariance
    gamma * I.  The world is the product across APs, uniform over at most 16
    atoms.
    """
    if (L, K) != (2, 2):
        raise ValueError("the product construction is sized for L=2, K=2")
    N, Q = n_antennas, cluster_size
    if Q == 1:
        clusters = np.array([[0], [1]])
    else:
        clusters = np.array([[0, 1], [1, 0]])
    mask = serving_mask_from_clusters(clusters, L)
    gains = 10.0 ** rng.uniform(-0.5, 0.5, size=(L, K))

    def crandn(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    # factor atoms per AP: list of (n_l, N, K) blocks
    factors = []
    for l in range(L):
        served = np.flatnonzero(mask[l])
        masked = np.flatnonzero(~mask[l])
        if len(masked) == 0:
            atoms = crandn(served_atoms * (2 if N > 1 else 1), N, K)
        else:
            # served part: deterministic for N>1 to stay within 16 atoms
            n_served = 1 if N > 1 else served_atoms
            served_vals = crandn(n_served, N, len(served))
            masked_sets = []
            for k in masked:
                g = gains[l, k]
                if N == 1:
                    z = np.sqrt(g) * np.exp(1j * rng.uniform(0, 2 * np.pi))
                    masked_sets.append(np.array([[z], [-z]]))           # (2, 1)
                else:
                    U, _ = np.linalg.qr(crandn(N, N))
                    basis = np.sqrt(N * g) * U                          # columns
                    vals = np.concatenate([basis.T, -basis.T], axis=0)  # (2N, N)
                    masked_sets.append(vals)
            shape_idx = [len(served_vals)] + [len(s) for s in masked_sets]
            atoms = np.zeros((int(np.prod(shape_idx)), N, K), dtype=complex)
            for flat, multi in enumerate(np.ndindex(*shape_idx)):
                blk = np.zeros((N, K), dtype=complex)
                blk[:, served] = served_vals[multi[0]]
                for j, k in enumerate(masked):
                    blk[:, k] = masked_sets[j][multi[j + 1]]
                atoms[flat] = blk
        factors.append(atoms)

    sizes = [len(f) for f in factors]
    M = int(np.prod(sizes))
    channels = np.zeros((M, L, N, K), dtype=complex)
    for m, multi in enumerate(np.ndindex(*sizes)):
        for l in range(L):
            channels[m, l] = factors[l][multi[l]]
    # served-column gains: set to the factor's empirical mean power so the
    # scenario stays sensible (they never enter the team-MMSE construction)
    for l in range(L):
        for k in np.flatnonzero(mask[l]):
            gains[l, k] = float(np.mean(np.abs(channels[:, l, :, k]) ** 2))
    return FiniteWorld(probs=np.full(M, 1.0 / M), channels=channels,
                       gains=gains, clusters=clusters)
