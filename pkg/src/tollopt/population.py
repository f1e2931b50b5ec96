"""Synthetic commuter population.

Travelers are heterogeneous in trip length and schedule-deviation penalties,
both drawn from truncated normal distributions, and homogeneous in their
value of time. Each traveler gets a desired arrival time and a menu of
candidate departure minutes strictly before that arrival.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, SamplingError

MAX_REJECTIONS = 100_000


@dataclass(frozen=True, eq=False)
class TravelerProfile:
    """One commuter: trip attributes, taste parameters and departure menu."""

    id: int
    trip_length: float  # meters
    value_of_time: float  # DKK per minute
    sde: float  # early-arrival penalty factor
    sdl: float  # late-arrival penalty factor
    desired_arrival: float  # minutes from window start
    time_window: np.ndarray  # candidate departure minutes, strictly increasing

    def validate(self) -> None:
        if self.trip_length <= 0:
            raise ConfigurationError(f"traveler {self.id}: trip_length must be > 0")
        tw = np.asarray(self.time_window, dtype=float)
        if tw.size == 0:
            raise ConfigurationError(f"traveler {self.id}: empty time window")
        if np.any(np.diff(tw) <= 0):
            raise ConfigurationError(f"traveler {self.id}: time window not strictly increasing")
        if tw[0] < 0:
            raise ConfigurationError(f"traveler {self.id}: negative departure minute")
        if tw[-1] >= self.desired_arrival:
            raise ConfigurationError(
                f"traveler {self.id}: menu contains departures at/after the desired arrival"
            )


def _default_penalty_cov() -> np.ndarray:
    return np.array([[0.05**2, 0.1**2], [0.1**2, 0.4**2]])


@dataclass
class PopulationConfig:
    """Distributional settings for the synthetic population.

    Defaults reproduce the reference calibration: 3700 travelers, trip
    lengths 4600 m +/- 20%, early/late penalties centered at (0.5, 4.0)
    and truncated to [0.3, 0.7] x [2.5, 5.5].
    """

    n_travelers: int = 3700
    trip_length_mean: float = 4600.0  # meters
    trip_length_sd: float = 0.2 * 4600.0
    value_of_time: float = 1.1  # DKK per minute, homogeneous
    penalty_mean: tuple[float, float] = (0.5, 4.0)
    penalty_cov: np.ndarray = field(default_factory=_default_penalty_cov)
    penalty_bounds: tuple[tuple[float, float], tuple[float, float]] = ((0.3, 0.7), (2.5, 5.5))
    desired_arrival_lo: float = 100.0  # minutes
    desired_arrival_hi: float = 110.0
    window_before: float = 45.0  # minutes of menu before the desired arrival
    window_after: float = 0.0  # kept for symmetry; entries >= T* are dropped
    window_step: float = 5.0
    seed: int = 0

    def validate(self) -> None:
        if self.n_travelers <= 0:
            raise ConfigurationError("n_travelers must be > 0")
        if self.trip_length_sd < 0:
            raise ConfigurationError("trip_length_sd must be >= 0")
        if self.window_step <= 0:
            raise ConfigurationError("window_step must be > 0")
        if self.window_before < self.window_step:
            raise ConfigurationError("window_before must cover at least one step")
        if self.desired_arrival_lo > self.desired_arrival_hi:
            raise ConfigurationError("desired arrival bounds are reversed")
        if self.desired_arrival_lo < self.window_before:
            raise ConfigurationError(
                "desired_arrival_lo < window_before would put departures before minute 0"
            )
        cov = np.asarray(self.penalty_cov, dtype=float)
        if cov.shape != (2, 2) or not np.allclose(cov, cov.T):
            raise ConfigurationError("penalty_cov must be a symmetric 2x2 matrix")
        _penalty_factor(cov)  # raises on non-PSD


def sample_truncated_normal(
    mean: float,
    sd: float,
    lo: float,
    hi: float,
    rng: np.random.Generator,
    max_rejections: int = MAX_REJECTIONS,
) -> float:
    """Draw from a normal conditioned on [lo, hi] by rejection.

    ``sd == 0`` degenerates to the mean (which must lie in the interval).
    Raises :class:`SamplingError` when the interval mass is so small that
    ``max_rejections`` draws all miss it.
    """
    if lo >= hi:
        raise ConfigurationError("truncation interval is empty")
    if sd < 0:
        raise ConfigurationError("sd must be >= 0")
    if sd == 0:
        if lo <= mean <= hi:
            return float(mean)
        raise SamplingError("degenerate distribution lies outside the truncation interval")
    for _ in range(max_rejections):
        x = rng.normal(mean, sd)
        if lo <= x <= hi:
            return float(x)
    raise SamplingError(
        f"no draw in [{lo}, {hi}] after {max_rejections} rejections "
        f"(mean={mean}, sd={sd})"
    )


def _penalty_factor(cov: np.ndarray) -> np.ndarray:
    """Matrix square root of a PSD covariance, tolerant of zero eigenvalues."""
    cov = np.asarray(cov, dtype=float)
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        pass
    eigvals, eigvecs = np.linalg.eigh(cov)
    floor = -1e-9 * max(1.0, float(np.max(np.abs(eigvals))))
    if np.any(eigvals < floor):
        raise ConfigurationError("penalty_cov is not positive semi-definite")
    return eigvecs @ np.diag(np.sqrt(np.clip(eigvals, 0.0, None)))


def sample_penalties(
    cfg: PopulationConfig,
    rng: np.random.Generator,
    max_rejections: int = MAX_REJECTIONS,
) -> tuple[float, float]:
    """Draw one (sde, sdl) pair: bivariate normal, rejected until in bounds."""
    mean = np.asarray(cfg.penalty_mean, dtype=float)
    factor = _penalty_factor(cfg.penalty_cov)
    (sde_lo, sde_hi), (sdl_lo, sdl_hi) = cfg.penalty_bounds
    for _ in range(max_rejections):
        draw = mean + factor @ rng.standard_normal(2)
        if sde_lo <= draw[0] <= sde_hi and sdl_lo <= draw[1] <= sdl_hi:
            return float(draw[0]), float(draw[1])
    raise SamplingError(f"no penalty draw in bounds after {max_rejections} rejections")


def _build_time_window(t_star: float, cfg: PopulationConfig) -> np.ndarray:
    offsets = np.arange(-cfg.window_before, cfg.window_after + cfg.window_step / 2, cfg.window_step)
    times = t_star + offsets
    times = times[(times >= 0) & (times < t_star)]
    if times.size == 0:
        raise ConfigurationError("window settings produce an empty departure menu")
    return times


def build_population(cfg: PopulationConfig) -> list[TravelerProfile]:
    """Synthesize the full population; a pure function of ``cfg`` (incl. seed)."""
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    travelers = []
    for i in range(cfg.n_travelers):
        length = sample_truncated_normal(cfg.trip_length_mean, cfg.trip_length_sd, 0.0, np.inf, rng)
        sde, sdl = sample_penalties(cfg, rng)
        t_star = rng.uniform(cfg.desired_arrival_lo, cfg.desired_arrival_hi)
        profile = TravelerProfile(
            id=i,
            trip_length=length,
            value_of_time=cfg.value_of_time,
            sde=sde,
            sdl=sdl,
            desired_arrival=t_star,
            time_window=_build_time_window(t_star, cfg),
        )
        profile.validate()
        travelers.append(profile)
    return travelers


def population_table(population: list[TravelerProfile]) -> np.ndarray:
    """Rows of (id, L, theta, sde, sdl, t_star) for CSV export."""
    return np.array(
        [
            [p.id, p.trip_length, p.value_of_time, p.sde, p.sdl, p.desired_arrival]
            for p in population
        ]
    )
