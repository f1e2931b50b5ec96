import numpy as np
import pytest

from tollopt import (
    ConfigurationError,
    DaySimResult,
    GridlockError,
    NetworkParams,
    TrajectoryIntegrator,
    critical_accumulation,
    probe_travel_time,
    simulate_day,
    speed,
)

NET = NetworkParams()  # n_jam=4500, v_f=9.78 m/s


class TestSpeed:
    def test_free_flow(self):
        assert speed(0, NET) == pytest.approx(60 * 9.78)  # 586.8 m/min

    def test_jam_and_beyond(self):
        assert speed(4500, NET) == 0.0
        assert speed(9000, NET) == 0.0

    def test_critical_point_value(self):
        assert speed(1500, NET) == pytest.approx(586.8 * (2 / 3) ** 2)

    def test_vectorized(self):
        out = speed(np.array([0, 1500, 4500]), NET)
        np.testing.assert_allclose(out, [586.8, 586.8 * 4 / 9, 0.0])


class TestCriticalAccumulation:
    @pytest.mark.parametrize("n_jam,expected", [(4500, 1500), (3, 1), (6000, 2000)])
    def test_closed_form(self, n_jam, expected):
        assert critical_accumulation(NetworkParams(n_jam=n_jam)) == pytest.approx(expected)

    def test_matches_numeric_flow_maximization(self):
        net = NetworkParams(n_jam=6000)
        grid = np.linspace(0, 6000, 600_001)
        flow = grid * speed(grid, net)
        assert grid[np.argmax(flow)] == pytest.approx(critical_accumulation(net), abs=0.05)


class TestSimulateDay:
    def test_single_traveler_closed_form(self):
        length = 4693.44
        res = simulate_day([0.0], [length], NET)
        expected = length / (586.8 * (1 - 1 / 4500) ** 2)  # rides alone at n=1
        assert res.travel_times[0] == pytest.approx(expected, rel=1e-12)
        np.testing.assert_allclose(res.trajectory, [[0.0, 1], [expected, 0]])
        assert res.peak_accumulation == 1

    def test_identical_travelers_identical_times(self):
        res = simulate_day([5.0, 5.0], [3000.0, 3000.0], NET)
        assert res.travel_times[0] == pytest.approx(res.travel_times[1], rel=1e-12)

    def test_non_overlapping_trips_dont_interact(self):
        solo = 1000 / speed(1, NET)
        res = simulate_day([0.0, 100.0], [1000.0, 1000.0], NET)
        np.testing.assert_allclose(res.travel_times, [solo, solo], rtol=1e-12)

    def test_two_traveler_overlap_hand_computed(self):
        v1, v2 = speed(1, NET), speed(2, NET)
        # traveler 0 departs at 0, traveler 1 at 2; both 3000 m, so they overlap
        t_arr0 = 2 + (3000 - 2 * v1) / v2
        t_arr1 = t_arr0 + (3000 - (t_arr0 - 2) * v2) / v1
        res = simulate_day([0.0, 2.0], [3000.0, 3000.0], NET)
        assert res.travel_times[0] == pytest.approx(t_arr0, rel=1e-12)
        assert res.travel_times[1] == pytest.approx(t_arr1 - 2, rel=1e-12)

    def test_conservation_and_event_count(self):
        rng = np.random.default_rng(0)
        n = 400
        res = simulate_day(rng.uniform(0, 60, n), rng.uniform(500, 8000, n), NET)
        assert res.trajectory.shape == (2 * n, 2)
        assert res.trajectory[-1, 1] == 0
        assert np.all(np.diff(res.trajectory[:, 0]) >= 0)
        assert np.all(res.trajectory[:, 1] >= 0)

    def test_trip_length_integral_identity(self):
        rng = np.random.default_rng(1)
        n = 300
        deps = rng.uniform(0, 45, n)
        lens = rng.uniform(1000, 9000, n)
        res = simulate_day(deps, lens, NET)
        integ = TrajectoryIntegrator(res, NET)
        covered = integ.distance_at(deps + res.travel_times) - integ.distance_at(deps)
        np.testing.assert_allclose(covered, lens, rtol=1e-4)

    def test_doubling_population_never_speeds_anyone_up(self):
        rng = np.random.default_rng(2)
        n = 150
        deps = rng.uniform(0, 30, n)
        lens = rng.uniform(1000, 6000, n)
        base = simulate_day(deps, lens, NET)
        doubled = simulate_day(np.tile(deps, 2), np.tile(lens, 2), NET)
        assert np.all(doubled.travel_times[:n] >= base.travel_times - 1e-9)

    def test_determinism_under_ties(self):
        deps = np.zeros(6)
        lens = np.full(6, 2000.0)
        a = simulate_day(deps, lens, NET)
        b = simulate_day(deps, lens, NET)
        np.testing.assert_array_equal(a.trajectory, b.trajectory)
        assert a.peak_accumulation == 6

    def test_gridlock_raises_with_stall_time(self):
        net = NetworkParams(n_jam=2, v_f=9.78)
        with pytest.raises(GridlockError) as err:
            simulate_day([0.0, 0.0, 1.0], [5000.0, 5000.0, 5000.0], net)
        assert err.value.stall_time == 0.0
        assert err.value.accumulation >= 2

    def test_input_validation(self):
        with pytest.raises(ConfigurationError):
            simulate_day([0.0], [0.0], NET)
        with pytest.raises(ConfigurationError):
            simulate_day([np.inf], [100.0], NET)


class TestProbes:
    def test_empty_network_probe_is_free_flow(self):
        res = DaySimResult(
            travel_times=np.array([]),
            trajectory=np.array([[0.0, 0.0], [1.0, 0.0]]),
            peak_accumulation=0,
        )
        assert probe_travel_time(res, 10.0, 2934.0, NET) == pytest.approx(2934.0 / 586.8)

    def test_probe_matches_real_traveler(self):
        rng = np.random.default_rng(3)
        n = 200
        deps = rng.uniform(0, 30, n)
        lens = rng.uniform(1000, 6000, n)
        res = simulate_day(deps, lens, NET)
        integ = TrajectoryIntegrator(res, NET)
        np.testing.assert_allclose(integ.travel_times(deps, lens), res.travel_times, rtol=1e-9)

    def test_tiny_length_gives_tiny_time(self):
        res = simulate_day([0.0], [1000.0], NET)
        assert probe_travel_time(res, 0.5, 1e-6, NET) < 1e-8

    def test_two_phase_trajectory_hand_computed(self):
        # accumulation 2 for five minutes, then empty
        res = DaySimResult(
            travel_times=np.array([]),
            trajectory=np.array([[0.0, 2.0], [5.0, 0.0]]),
            peak_accumulation=2,
        )
        v2, v0 = speed(2, NET), speed(0, NET)
        length = 5 * v2 + 3 * v0  # spans the phase boundary by 3 free-flow minutes
        assert probe_travel_time(res, 0.0, length, NET) == pytest.approx(8.0, rel=1e-12)

    def test_probe_before_first_event_rides_empty_network(self):
        res = simulate_day([10.0], [1000.0], NET)
        tt = probe_travel_time(res, 0.0, 5 * 586.8, NET)
        assert tt == pytest.approx(5.0, rel=1e-12)  # finishes before the departure

    def test_probe_after_last_event_continues_free_flow(self):
        res = simulate_day([0.0], [1000.0], NET)
        end = res.trajectory[-1, 0]
        tt = probe_travel_time(res, end + 10.0, 586.8 * 2.5, NET)
        assert tt == pytest.approx(2.5, rel=1e-12)

    def test_nonpositive_length_rejected(self):
        res = simulate_day([0.0], [1000.0], NET)
        with pytest.raises(ConfigurationError):
            probe_travel_time(res, 0.0, 0.0, NET)
