import numpy as np
import pytest

from cellfree_maxmin.channel import ChannelEnsemble
from cellfree_maxmin.scenario import NetworkScenario, serving_mask_from_clusters


def make_scenario(gains, clusters, power_budget_lin=1.0, weights=None):
    """Hand-built scenario around explicit gains/clusters (positions unused)."""
    gains = np.asarray(gains, dtype=float)
    clusters = np.asarray(clusters, dtype=int)
    L, K = gains.shape
    return NetworkScenario(
        ap_positions=np.zeros((L, 2)),
        ue_positions=np.zeros((K, 2)),
        gains=gains,
        clusters=clusters,
        serving_mask=serving_mask_from_clusters(clusters, L),
        power_budget_lin=power_budget_lin,
        weights=np.ones(K) if weights is None else np.asarray(weights, float),
    )


def make_ensemble(realizations, scenario):
    """Ensemble from explicit (n_sim, L, N, K) realizations."""
    return ChannelEnsemble(realizations=np.asarray(realizations, dtype=complex),
                           scenario=scenario)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
