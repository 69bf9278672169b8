"""Network geometry, large-scale channel gains and user-centric clustering.

Gains are noise-normalized at build time (the noise power in dBm is subtracted
from the channel gain in dB), so every downstream SINR formula uses unit noise
and transmit powers in mW (linear dBm scale).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict

import numpy as np

from .errors import ConfigurationError


@dataclass
class NetworkConfig:
    """All inputs needed to build a scenario and run a simulation."""

    L: int = 16                 # number of APs
    N: int = 8                  # antennas per AP
    K: int = 64                 # number of single-antenna UEs
    Q: int = 4                  # serving cluster size (APs per UE)
    area_side_m: float = 1000.0
    ap_height_delta_m: float = 10.0
    pathloss_exponent_coeff: float = 36.7   # dB per decade
    pathloss_intercept_db: float = 30.5
    shadow_std_db: float = 4.0
    shadow_corr_dist_m: float = 9.0
    bandwidth_hz: float = 20e6
    noise_figure_db: float = 7.0
    power_budget_dbm: float = 20.0
    weights: list[float] | None = None      # None means uniform (max-min fair)
    n_sim: int = 1000
    seed: int = 0
    ap_positions: list[list[float]] | None = None  # overrides the grid layout

    def validate(self):
        for name in ("L", "N", "K", "n_sim"):
            if int(getattr(self, name)) < 1:
                raise ConfigurationError(f"{name} must be >= 1")
        if not 1 <= self.Q <= self.L:
            raise ConfigurationError(f"Q must satisfy 1 <= Q <= L, got Q={self.Q}")
        for name in ("area_side_m", "ap_height_delta_m", "pathloss_exponent_coeff",
                     "pathloss_intercept_db", "shadow_std_db", "shadow_corr_dist_m",
                     "bandwidth_hz", "noise_figure_db", "power_budget_dbm"):
            if not np.isfinite(getattr(self, name)):
                raise ConfigurationError(f"{name} must be finite")
        if self.shadow_std_db < 0:
            raise ConfigurationError("shadow_std_db must be nonnegative")
        if self.area_side_m <= 0:
            raise ConfigurationError("area_side_m must be positive")
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if w.shape != (self.K,):
                raise ConfigurationError(f"weights must have length K={self.K}")
            if not np.all(w > 0):
                raise ConfigurationError("weights must be strictly positive")
        if self.ap_positions is not None:
            pos = np.asarray(self.ap_positions, dtype=float)
            if pos.shape != (self.L, 2):
                raise ConfigurationError(f"ap_positions must be L x 2, got {pos.shape}")

    @classmethod
    def from_dict(cls, d: dict) -> "NetworkConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ConfigurationError(f"unknown config fields: {sorted(unknown)}")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, path) -> "NetworkConfig":
        try:
            with open(path) as f:
                d = json.load(f)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(d, dict):
            raise ConfigurationError("config JSON must be an object")
        return cls.from_dict(d)

    def to_dict(self) -> dict:
        return asdict(self)

    def weight_vector(self) -> np.ndarray:
        if self.weights is None:
            return np.ones(self.K)
        return np.asarray(self.weights, dtype=float)


@dataclass
class NetworkScenario:
    """Immutable large-scale state: geometry, noise-normalized gains, clusters."""

    ap_positions: np.ndarray      # (L, 2) meters
    ue_positions: np.ndarray      # (K, 2) meters
    gains: np.ndarray             # (L, K) linear, noise-normalized
    clusters: np.ndarray          # (K, Q) AP indices, decreasing gain order
    serving_mask: np.ndarray      # (L, K) bool, True where AP l serves UE k
    power_budget_lin: float       # mW
    weights: np.ndarray           # (K,) strictly positive

    @property
    def L(self) -> int:
        return self.gains.shape[0]

    @property
    def K(self) -> int:
        return self.gains.shape[1]

    @property
    def Q(self) -> int:
        return self.clusters.shape[1]


def noise_power_dbm(bandwidth_hz: float, noise_figure_db: float) -> float:
    """Thermal noise power over the signal bandwidth, in dBm."""
    return -174.0 + 10.0 * np.log10(bandwidth_hz) + noise_figure_db


def build_ap_grid(config: NetworkConfig) -> np.ndarray:
    """AP positions: explicit list if given, else a sqrt(L) x sqrt(L) grid.

    Grid points sit at the cell centers of a uniform partition of the square,
    i.e. coordinates (2i+1) * side / (2 sqrt(L)).
    """
    if config.ap_positions is not None:
        return np.asarray(config.ap_positions, dtype=float)
    n = round(np.sqrt(config.L))
    if n * n != config.L:
        raise ConfigurationError(
            f"L={config.L} is not a perfect square; supply ap_positions explicitly")
    coords = (2 * np.arange(n) + 1) * config.area_side_m / (2 * n)
    xx, yy = np.meshgrid(coords, coords, indexing="ij")
    return np.column_stack([xx.ravel(), yy.ravel()])


def sample_shadow_fading(config: NetworkConfig, ue_positions: np.ndarray,
                         rng: np.random.Generator) -> np.ndarray:
    """Correlated shadow fading Z in dB, shape (L, K).

    Each AP row is an independent zero-mean Gaussian vector with covariance
    C[k, i] = rho^2 * 2^(-delta_ki / corr_dist) over UE pairs, where delta_ki
    is the UE-UE distance.  Realized through a symmetric matrix square root so
    co-located UEs get identical samples.
    """
    rho = config.shadow_std_db
    K = len(ue_positions)
    if rho == 0.0:
        return np.zeros((config.L, K))
    delta = np.linalg.norm(ue_positions[:, None, :] - ue_positions[None, :, :], axis=-1)
    C = rho**2 * np.exp2(-delta / config.shadow_corr_dist_m)
    w, V = np.linalg.eigh(C)
    if w.min() < -1e-8 * max(w.max(), 1.0):
        raise RuntimeError("shadow-fading covariance is not positive semidefinite")
    S = (V * np.sqrt(np.clip(w, 0.0, None))) @ V.T
    G = rng.standard_normal((K, config.L))
    return (S @ G).T


def compute_gains(config: NetworkConfig, ap_positions: np.ndarray,
                  ue_positions: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """Noise-normalized linear channel gains, shape (L, K).

    gamma_dB = -coeff * log10(D / 1 m) - intercept + Z - sigma^2[dBm], with D
    the 3D AP-UE distance including the height difference.
    """
    planar = np.linalg.norm(ap_positions[:, None, :] - ue_positions[None, :, :], axis=-1)
    D = np.sqrt(planar**2 + config.ap_height_delta_m**2)
    sigma2 = noise_power_dbm(config.bandwidth_hz, config.noise_figure_db)
    gains_db = (-config.pathloss_exponent_coeff * np.log10(D)
                - config.pathloss_intercept_db + Z - sigma2)
    return 10.0 ** (gains_db / 10.0)


def cluster_users(gains: np.ndarray, Q: int) -> np.ndarray:
    """Serving clusters: for each UE the Q strongest APs, shape (K, Q).

    Indices are returned in decreasing-gain order; ties go to the smaller AP
    index (stable sort), so the output is deterministic and purely rank-based.
    """
    L, K = gains.shape
    if not 1 <= Q <= L:
        raise ConfigurationError(f"Q must satisfy 1 <= Q <= L, got Q={Q}")
    order = np.argsort(-gains, axis=0, kind="stable")   # (L, K)
    return order[:Q, :].T.copy()


def serving_mask_from_clusters(clusters: np.ndarray, L: int) -> np.ndarray:
    K = clusters.shape[0]
    mask = np.zeros((L, K), dtype=bool)
    for k in range(K):
        mask[clusters[k], k] = True
    return mask


def scenario_rng(seed: int) -> np.random.Generator:
    """Scenario stream; kept distinct from the channel-ensemble stream."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0,)))


def build_scenario(config: NetworkConfig, rng: np.random.Generator | None = None) -> NetworkScenario:
    """Draw UE positions and shadow fading, then assemble the full scenario."""
    config.validate()
    if rng is None:
        rng = scenario_rng(config.seed)
    ap_positions = build_ap_grid(config)
    ue_positions = rng.uniform(0.0, config.area_side_m, size=(config.K, 2))
    Z = sample_shadow_fading(config, ue_positions, rng)
    gains = compute_gains(config, ap_positions, ue_positions, Z)
    if not np.all(np.isfinite(gains)) or not np.all(gains > 0):
        raise ConfigurationError("channel gains must be strictly positive and finite")
    clusters = cluster_users(gains, config.Q)
    mask = serving_mask_from_clusters(clusters, config.L)
    return NetworkScenario(
        ap_positions=ap_positions,
        ue_positions=ue_positions,
        gains=gains,
        clusters=clusters,
        serving_mask=mask,
        power_budget_lin=10.0 ** (config.power_budget_dbm / 10.0),
        weights=config.weight_vector(),
    )


def scenario_to_dict(scenario: NetworkScenario) -> dict:
    """JSON-serializable scenario dump (gains reported in dB)."""
    return {
        "ap_positions": scenario.ap_positions.tolist(),
        "ue_positions": scenario.ue_positions.tolist(),
        "gains_db": (10.0 * np.log10(scenario.gains)).tolist(),
        "clusters": scenario.clusters.tolist(),
        "power_budget_dbm": float(10.0 * np.log10(scenario.power_budget_lin)),
        "weights": scenario.weights.tolist(),
    }


def dump_scenario(scenario: NetworkScenario, path):
    with open(path, "w") as f:
        json.dump(scenario_to_dict(scenario), f, indent=2)
