import numpy as np
import pytest
from scipy import stats

from tollopt import (
    ConfigurationError,
    PopulationConfig,
    SamplingError,
    build_population,
    sample_penalties,
    sample_truncated_normal,
)


class TestTruncatedNormal:
    def test_positive_trip_lengths_and_mean(self):
        rng = np.random.default_rng(0)
        draws = np.array(
            [sample_truncated_normal(4600, 920, 0, np.inf, rng) for _ in range(100_000)]
        )
        assert np.all(draws > 0)
        assert abs(draws.mean() - 4600) < 15

    def test_degenerate_sd_returns_mean(self):
        rng = np.random.default_rng(0)
        assert sample_truncated_normal(5, 0, 0, 10, rng) == 5.0

    def test_degenerate_sd_outside_interval(self):
        rng = np.random.default_rng(0)
        with pytest.raises(SamplingError):
            sample_truncated_normal(20, 0, 0, 10, rng)

    def test_interval_variance_matches_closed_form(self):
        # independent oracle: the closed-form variance of N(0,1) on [-1, 1]
        expected = stats.truncnorm.var(-1, 1)  # = 0.29112...
        rng = np.random.default_rng(1)
        draws = np.array(
            [sample_truncated_normal(0, 1, -1, 1, rng) for _ in range(100_000)]
        )
        assert abs(draws.var() - expected) < 0.01

    def test_bounds_always_respected(self):
        rng = np.random.default_rng(2)
        for _ in range(2000):
            x = sample_truncated_normal(0.5, 2.0, -0.25, 1.5, rng)
            assert -0.25 <= x <= 1.5

    def test_negligible_mass_raises(self):
        rng = np.random.default_rng(3)
        with pytest.raises(SamplingError):
            sample_truncated_normal(0, 1, 50, 51, rng, max_rejections=1000)

    def test_empty_interval_rejected(self):
        rng = np.random.default_rng(4)
        with pytest.raises(ConfigurationError):
            sample_truncated_normal(0, 1, 2, 2, rng)


class TestPenalties:
    def test_bounds_always_respected(self):
        cfg = PopulationConfig()
        rng = np.random.default_rng(5)
        for _ in range(5000):
            sde, sdl = sample_penalties(cfg, rng)
            assert 0.3 <= sde <= 0.7
            assert 2.5 <= sdl <= 5.5

    def test_zero_covariance_degenerates_to_means(self):
        cfg = PopulationConfig(penalty_cov=np.zeros((2, 2)))
        rng = np.random.default_rng(6)
        assert sample_penalties(cfg, rng) == (0.5, 4.0)

    def test_non_psd_covariance_rejected(self):
        cfg = PopulationConfig(penalty_cov=np.array([[1.0, 2.0], [2.0, 1.0]]))
        with pytest.raises(ConfigurationError):
            sample_penalties(cfg, np.random.default_rng(7))

    def test_correlation_matches_independent_rejection_oracle(self):
        # oracle: brute-force rejection sampler built on scipy's rvs
        cfg = PopulationConfig()
        oracle_rng = np.random.default_rng(123)
        raw = stats.multivariate_normal(cfg.penalty_mean, cfg.penalty_cov).rvs(
            400_000, random_state=oracle_rng
        )
        keep = (
            (raw[:, 0] >= 0.3) & (raw[:, 0] <= 0.7) & (raw[:, 1] >= 2.5) & (raw[:, 1] <= 5.5)
        )
        oracle_corr = np.corrcoef(raw[keep].T)[0, 1]

        rng = np.random.default_rng(8)
        draws = np.array([sample_penalties(cfg, rng) for _ in range(100_000)])
        assert abs(np.corrcoef(draws.T)[0, 1] - oracle_corr) < 0.02


class TestBuildPopulation:
    def test_full_population_invariants(self):
        pop = build_population(PopulationConfig(seed=42))
        assert len(pop) == 3700
        for p in pop:
            p.validate()
            assert 0.3 <= p.sde <= 0.7
            assert 2.5 <= p.sdl <= 5.5
            assert p.trip_length > 0
            assert p.value_of_time == 1.1
            assert np.all(p.time_window < p.desired_arrival)

    def test_single_traveler(self):
        pop = build_population(PopulationConfig(n_travelers=1, seed=0))
        assert len(pop) == 1

    def test_determinism(self):
        a = build_population(PopulationConfig(n_travelers=200, seed=7))
        b = build_population(PopulationConfig(n_travelers=200, seed=7))
        for pa, pb in zip(a, b):
            assert pa.trip_length == pb.trip_length
            assert (pa.sde, pa.sdl) == (pb.sde, pb.sdl)
            assert pa.desired_arrival == pb.desired_arrival
            assert np.array_equal(pa.time_window, pb.time_window)

    def test_trip_length_mean_within_one_percent(self):
        pop = build_population(PopulationConfig(n_travelers=100_000, seed=9))
        lengths = np.array([p.trip_length for p in pop])
        assert abs(lengths.mean() - 4600) / 4600 < 0.01

    def test_menu_shape_follows_window_settings(self):
        cfg = PopulationConfig(n_travelers=5, seed=0, window_before=45, window_step=5)
        for p in build_population(cfg):
            assert p.time_window.size == 9
            assert np.allclose(np.diff(p.time_window), 5.0)
            assert p.time_window[-1] == pytest.approx(p.desired_arrival - 5)

    def test_invalid_config_rejected(self):
        with pytest.raises(ConfigurationError):
            build_population(PopulationConfig(n_travelers=0))
        with pytest.raises(ConfigurationError):
            build_population(PopulationConfig(window_step=0))
        with pytest.raises(ConfigurationError):
            build_population(PopulationConfig(trip_length_sd=-1))
