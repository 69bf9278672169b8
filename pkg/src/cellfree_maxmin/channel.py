"""Monte Carlo channel ensembles and per-AP local-CSI views.

Realizations are stored realizations-major with shape (n_sim, L, N, K); the
stacked NL x K matrix of sample n is realizations[n].reshape(N*L, K) with AP
blocks in increasing AP order.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .scenario import NetworkScenario

_DUMP_MAGIC = b"CFME"


@dataclass
class ChannelEnsemble:
    """Fixed training set of i.i.d. channel realizations for one scenario."""

    realizations: np.ndarray      # (n_sim, L, N, K) complex128
    scenario: NetworkScenario
    seed: int | None = None

    @property
    def n_sim(self) -> int:
        return self.realizations.shape[0]

    @property
    def L(self) -> int:
        return self.realizations.shape[1]

    @property
    def N(self) -> int:
        return self.realizations.shape[2]

    @property
    def K(self) -> int:
        return self.realizations.shape[3]

    def stacked(self) -> np.ndarray:
        """Realizations as (n_sim, N*L, K) stacked channel matrices."""
        return self.realizations.reshape(self.n_sim, self.L * self.N, self.K)


@dataclass
class LocalCSIView:
    """What AP l knows per realization: served columns exact, the rest zero."""

    ap_index: int
    channels: np.ndarray          # (n_sim, N, K)
    served: np.ndarray            # (K,) bool


def ensemble_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1,)))


def sample_ensemble(scenario: NetworkScenario, n_sim: int, seed: int,
                    n_antennas: int = 1) -> ChannelEnsemble:
    """Draw n_sim i.i.d. realizations of the NL x K channel matrix.

    Entries of block (l, k) are circularly-symmetric complex Gaussian with
    per-entry variance gains[l, k] (real/imag parts i.i.d. N(0, gain/2)).
    """
    if n_sim < 1:
        raise ValueError("n_sim must be >= 1")
    rng = ensemble_rng(seed)
    shape = (n_sim, scenario.L, n_antennas, scenario.K)
    scale = np.sqrt(scenario.gains / 2.0)[None, :, None, :]
    h = scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    return ChannelEnsemble(realizations=h, scenario=scenario, seed=seed)


def local_view(ensemble: ChannelEnsemble, l: int) -> LocalCSIView:
    """Local CSI of AP l: column k equals h_{l,k} if l serves k, else zero.

    Channels are zero mean, so the unknown-column branch E[h_{l,k}] is exactly
    the zero vector.
    """
    served = ensemble.scenario.serving_mask[l]
    channels = ensemble.realizations[:, l] * served[None, None, :]
    return LocalCSIView(ap_index=l, channels=channels, served=served.copy())


def masked_realizations(ensemble: ChannelEnsemble) -> np.ndarray:
    """All local views at once: (n_sim, L, N, K) with non-served columns zeroed."""
    return ensemble.realizations * ensemble.scenario.serving_mask[None, :, None, :]


def save_ensemble(ensemble: ChannelEnsemble, path):
    """Binary dump: magic, header (n_sim, N, L, K, seed), then row-major
    little-endian complex128 pairs of the stacked matrices."""
    header = struct.pack("<4siiiiq", _DUMP_MAGIC, ensemble.n_sim, ensemble.N,
                         ensemble.L, ensemble.K, ensemble.seed or 0)
    with open(path, "wb") as f:
        f.write(header)
        f.write(np.ascontiguousarray(ensemble.realizations).astype("<c16").tobytes())


def load_ensemble(path, scenario: NetworkScenario) -> ChannelEnsemble:
    with open(path, "rb") as f:
        raw = f.read(struct.calcsize("<4siiiiq"))
        magic, n_sim, N, L, K, seed = struct.unpack("<4siiiiq", raw)
        if magic != _DUMP_MAGIC:
            raise ValueError(f"{path} is not a channel ensemble dump")
        data = np.frombuffer(f.read(), dtype="<c16")
    h = data.reshape(n_sim, L, N, K).astype(np.complex128)
    return ChannelEnsemble(realizations=h, scenario=scenario, seed=seed)
