import numpy as np
import pytest

from cellfree_maxmin.errors import ConfigurationError
from cellfree_maxmin.scenario import (NetworkConfig, build_ap_grid,
                                      build_scenario, cluster_users,
                                      compute_gains, noise_power_dbm,
                                      sample_shadow_fading, scenario_rng)


def cfg(**kw):
    base = dict(L=4, N=2, K=8, Q=2, n_sim=10, seed=0)
    base.update(kw)
    return NetworkConfig(**base)


class TestApGrid:
    def test_4x4_grid_cell_centers(self):
        pos = build_ap_grid(cfg(L=16, Q=4, area_side_m=1000.0))
        expected = {125.0, 375.0, 625.0, 875.0}
        assert set(pos[:, 0]) == expected and set(pos[:, 1]) == expected
        assert pos.shape == (16, 2)
        # symmetry of the partition: grid is invariant under x -> side - x
        mirrored = np.sort((1000.0 - pos[:, 0]))
        assert np.allclose(mirrored, np.sort(pos[:, 0]))

    def test_single_ap_at_center(self):
        pos = build_ap_grid(cfg(L=1, K=1, Q=1, area_side_m=1000.0))
        assert np.allclose(pos, [[500.0, 500.0]])

    def test_non_square_L_rejected(self):
        with pytest.raises(ConfigurationError):
            build_ap_grid(cfg(L=5, Q=2))

    def test_explicit_positions_override(self):
        pos = [[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0], [4.0, 4.0]]
        got = build_ap_grid(cfg(L=5, Q=2, ap_positions=pos))
        assert np.array_equal(got, np.asarray(pos))


class TestShadowFading:
    def test_zero_deviation_gives_zero(self, rng):
        c = cfg(shadow_std_db=0.0)
        ue = rng.uniform(0, 1000, (c.K, 2))
        assert np.all(sample_shadow_fading(c, ue, rng) == 0.0)

    def test_colocated_ues_identical(self, rng):
        c = cfg(K=3)
        ue = np.array([[100.0, 100.0], [100.0, 100.0], [700.0, 200.0]])
        Z = sample_shadow_fading(c, ue, rng)
        assert np.allclose(Z[:, 0], Z[:, 1], atol=1e-9)

    def test_correlation_half_at_nine_meters(self):
        # covariance rho^2 * 2^(-delta/9): at delta = 9 m the coefficient is 0.5
        c = cfg(K=2, shadow_std_db=4.0)
        ue = np.array([[0.0, 0.0], [9.0, 0.0]])
        draws = []
        g = np.random.default_rng(7)
        for _ in range(4000):
            draws.append(sample_shadow_fading(c, ue, g))
        Z = np.array(draws)  # (n, L, K)
        corr = np.corrcoef(Z[:, :, 0].ravel(), Z[:, :, 1].ravel())[0, 1]
        assert abs(corr - 0.5) < 0.03

    def test_sample_covariance_matches(self):
        c = cfg(K=4, L=1, Q=1, shadow_std_db=4.0, ap_positions=[[500.0, 500.0]])
        g = np.random.default_rng(11)
        ue = g.uniform(0, 1000, (4, 2))
        n = 10_000
        Z = np.array([sample_shadow_fading(c, ue, g)[0] for _ in range(n)])
        delta = np.linalg.norm(ue[:, None] - ue[None, :], axis=-1)
        C = c.shadow_std_db**2 * np.exp2(-delta / 9.0)
        C_hat = Z.T @ Z / n
        assert np.max(np.abs(C_hat - C)) < 5 * c.shadow_std_db**2 / np.sqrt(n)


class TestGains:
    def test_noise_power_value(self):
        assert noise_power_dbm(20e6, 7.0) == pytest.approx(-93.9897, abs=1e-3)

    def test_gain_above_ap(self):
        c = cfg(L=1, K=1, Q=1, ap_positions=[[500.0, 500.0]])
        g = compute_gains(c, np.array([[500.0, 500.0]]),
                          np.array([[500.0, 500.0]]), np.zeros((1, 1)))
        # D = 10 m: -36.7 - 30.5 + 93.9897 dB
        assert 10 * np.log10(g[0, 0]) == pytest.approx(26.7897, abs=1e-3)

    def test_shadow_shift_is_linear_ratio(self):
        c = cfg(L=1, K=1, Q=1, ap_positions=[[0.0, 0.0]])
        ue = np.array([[300.0, 400.0]])
        g0 = compute_gains(c, np.array([[0.0, 0.0]]), ue, np.zeros((1, 1)))
        g3 = compute_gains(c, np.array([[0.0, 0.0]]), ue, np.full((1, 1), 3.0))
        assert g3[0, 0] / g0[0, 0] == pytest.approx(10**0.3, rel=1e-12)


class TestClustering:
    def test_full_cooperation(self, rng):
        gains = rng.uniform(0.1, 1.0, (4, 3))
        cl = cluster_users(gains, 4)
        assert cl.shape == (3, 4)
        for k in range(3):
            assert sorted(cl[k]) == [0, 1, 2, 3]

    def test_strongest_selected(self):
        gains = 10 ** (np.array([[5.0], [3.0]]) / 10)
        assert cluster_users(gains, 1).tolist() == [[0]]

    def test_decreasing_gain_order_and_tiebreak(self):
        gains = np.array([[1.0, 2.0], [3.0, 2.0], [2.0, 2.0]])
        cl = cluster_users(gains, 3)
        assert cl[0].tolist() == [1, 2, 0]
        assert cl[1].tolist() == [0, 1, 2]  # ties -> smaller AP index first

    def test_invariant_under_monotone_transform(self, rng):
        gains = rng.uniform(0.1, 2.0, (6, 5))
        cl = cluster_users(gains, 3)
        assert np.array_equal(cl, cluster_users(gains**1.7, 3))
        assert np.array_equal(cl, cluster_users(3.0 * gains, 3))


class TestBuildScenario:
    def test_deterministic_given_seed(self):
        c = cfg(seed=42)
        s1, s2 = build_scenario(c), build_scenario(c)
        assert np.array_equal(s1.gains, s2.gains)
        assert np.array_equal(s1.ue_positions, s2.ue_positions)
        assert np.array_equal(s1.clusters, s2.clusters)

    def test_gains_positive_and_cluster_dominance(self):
        s = build_scenario(cfg(seed=5))
        assert np.all(s.gains > 0) and np.all(np.isfinite(s.gains))
        for k in range(s.K):
            inside = s.gains[s.clusters[k], k]
            outside = s.gains[~s.serving_mask[:, k], k]
            if len(outside):
                assert inside.min() >= outside.max()

    def test_power_budget_linear(self):
        s = build_scenario(cfg(power_budget_dbm=20.0))
        assert s.power_budget_lin == pytest.approx(100.0)

    def test_config_validation(self):
        with pytest.raises(ConfigurationError):
            NetworkConfig.from_dict({"L": 4, "Q": 5})
        with pytest.raises(ConfigurationError):
            NetworkConfig.from_dict({"K": 2, "weights": [1.0, -1.0]})
        with pytest.raises(ConfigurationError):
            NetworkConfig.from_dict({"unknown_field": 3})
        with pytest.raises(ConfigurationError):
            NetworkConfig.from_dict({"bandwidth_hz": float("inf")})
