"""Event-based single-reservoir traffic simulation.

All travelers share one network-wide speed V(n) that depends only on the
current accumulation n. A trip of length L departing at time t finishes at
the time when the integral of V(n(t)) since departure reaches L. Because
n is piecewise constant between departure/arrival events, that integral is
piecewise linear and the whole day can be resolved exactly, event by event.

The implementation keeps a running "distance clock" Lambda(t) = integral of
V from the first event: a traveler departing when the clock reads d with
trip length L arrives exactly when the clock reads d + L, so the next
arrival is always the active traveler with the smallest clock target.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, GridlockError


@dataclass(frozen=True)
class NetworkParams:
    n_jam: float = 4500.0  # vehicles
    v_f: float = 9.78  # meters per second

    def __post_init__(self):
        if self.n_jam <= 0:
            raise ConfigurationError("n_jam must be > 0")
        if self.v_f <= 0:
            raise ConfigurationError("v_f must be > 0")


def speed(n, net: NetworkParams):
    """Network speed in meters per minute: 60 v_f (1 - n/n_jam)^2, zero at jam."""
    frac = np.clip(np.asarray(n, dtype=float), 0.0, net.n_jam) / net.n_jam
    out = 60.0 * net.v_f * (1.0 - frac) ** 2
    return out if out.ndim else float(out)


def critical_accumulation(net: NetworkParams) -> float:
    """Accumulation maximizing flow n*V(n); n_jam/3 for the quadratic speed law."""
    return net.n_jam / 3.0


@dataclass
class DaySimResult:
    """One day's outcome: exact travel times plus the accumulation trace.

    ``trajectory`` has one (event_time, accumulation_after) row per event,
    2N rows total; accumulation is constant between consecutive rows.
    """

    travel_times: np.ndarray  # (N,) minutes
    trajectory: np.ndarray  # (2N, 2)
    peak_accumulation: int


def simulate_day(departures, lengths, net: NetworkParams) -> DaySimResult:
    """Run the event loop for one day.

    Ties are deterministic: departures are processed before arrivals at
    equal timestamps, and equal-time events of the same kind go in traveler
    id order. Raises :class:`GridlockError` if the speed hits zero while
    trips are unfinished and no event can release the jam.
    """
    departures = np.asarray(departures, dtype=float)
    lengths = np.asarray(lengths, dtype=float)
    n_travelers = departures.size
    if lengths.size != n_travelers:
        raise ConfigurationError("departures and lengths must have equal length")
    if np.any(lengths <= 0):
        raise ConfigurationError("all trip lengths must be > 0")
    if not np.all(np.isfinite(departures)):
        raise ConfigurationError("all departure times must be finite")

    order = np.lexsort((np.arange(n_travelers), departures))
    dep_sorted = departures[order]

    events = np.empty((2 * n_travelers, 2))
    travel_times = np.empty(n_travelers)
    active: list[tuple[float, int]] = []  # (clock target, traveler id)

    clock = 0.0  # integral of V since the first event, meters
    t_now = dep_sorted[0] if n_travelers else 0.0
    n = 0
    v = speed(0, net)
    stall_time = None
    dep_idx = 0
    peak = 0

    for k in range(2 * n_travelers):
        t_dep = dep_sorted[dep_idx] if dep_idx < n_travelers else np.inf
        if active and v > 0.0:
            t_arr = t_now + (active[0][0] - clock) / v
            t_arr = max(t_arr, t_now)  # guard round-off from pushing time backwards
        else:
            t_arr = np.inf
        if t_dep == np.inf and t_arr == np.inf:
            raise GridlockError(stall_time if stall_time is not None else t_now, n)

        if t_dep <= t_arr:  # departures first on ties
            clock += v * (t_dep - t_now)
            t_now = t_dep
            i = order[dep_idx]
            dep_idx += 1
            heapq.heappush(active, (clock + lengths[i], i))
            n += 1
        else:
            clock += v * (t_arr - t_now)
            t_now = t_arr
            _, i = heapq.heappop(active)
            n -= 1
            travel_times[i] = t_now - departures[i]
        v = speed(n, net)
        if v == 0.0 and active and stall_time is None:
            stall_time = t_now
        elif v > 0.0:
            stall_time = None
        peak = max(peak, n)
        events[k, 0] = t_now
        events[k, 1] = n

    return DaySimResult(travel_times=travel_times, trajectory=events, peak_accumulation=peak)


class TrajectoryIntegrator:
    """Distance-vs-time lookup along a completed day's trajectory.

    Supports vectorized "fictional traveler" queries: travel times for
    arbitrary (departure, length) pairs, without altering the accumulation
    they ride through. Before the first and after the last event the
    network is empty, so free-flow speed applies.
    """

    def __init__(self, result: DaySimResult, net: NetworkParams):
        traj = result.trajectory
        self.times = traj[:, 0]
        self.speeds = speed(traj[:, 1], net)
        if np.any(self.speeds <= 0.0):
            k = int(np.argmax(self.speeds <= 0.0))
            raise GridlockError(float(self.times[k]), int(traj[k, 1]))
        self.v_free = speed(0, net)
        self.cum = np.concatenate(
            ([0.0], np.cumsum(self.speeds[:-1] * np.diff(self.times)))
        )

    def distance_at(self, t) -> np.ndarray:
        """Meters traveled along the trajectory from the first event to t."""
        t = np.asarray(t, dtype=float)
        j = np.searchsorted(self.times, t, side="right") - 1
        jc = np.clip(j, 0, len(self.times) - 1)
        d = self.cum[jc] + self.speeds[jc] * (t - self.times[jc])
        return np.where(j < 0, self.v_free * (t - self.times[0]), d)

    def travel_times(self, deps, lengths) -> np.ndarray:
        """Minutes needed to cover ``lengths`` starting at ``deps``."""
        deps = np.asarray(deps, dtype=float)
        target = self.distance_at(deps) + np.asarray(lengths, dtype=float)
        j = np.searchsorted(self.cum, target, side="right") - 1
        jc = np.clip(j, 0, len(self.cum) - 1)
        arrival = self.times[jc] + (target - self.cum[jc]) / self.speeds[jc]
        arrival = np.where(j < 0, self.times[0] + target / self.v_free, arrival)
        return arrival - deps


def probe_travel_time(result: DaySimResult, dep: float, length: float, net: NetworkParams) -> float:
    """Travel time of one fictional traveler riding the day's trajectory."""
    if length <= 0:
        raise ConfigurationError("probe length must be > 0")
    return float(TrajectoryIntegrator(result, net).travel_times(dep, length))
