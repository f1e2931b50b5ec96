"""Within-day choice and between-day learning.

Each day every traveler picks a departure minute from their personal menu,
the day is simulated, and the perceived money cost of every menu slot is
nudged toward what was experienced (chosen slot) or estimated by fictional
probe trips (all other slots):

    C_next = w_learn * C + (1 - w_learn) * c

Convergence is tracked by the per-capita L1 gap between the perceived and
experienced cost tables.

Choice follows a multinomial logit in the money costs. By default each
traveler carries one fixed Gumbel draw per menu slot, realized once, and
chooses the slot maximizing C + eps; marginally this reproduces the logit
probabilities while letting choices (and therefore the whole system) settle
to a fixed point. Setting ``resample_choices=True`` instead redraws the
choice from the logit probabilities every day, which keeps a noise floor in
the convergence metric.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .mfd import DaySimResult, NetworkParams, TrajectoryIntegrator, simulate_day
from .population import TravelerProfile
from .toll import TollProfile, eval_toll


@dataclass
class DayToDayConfig:
    logit_scale: float = 0.1  # per DKK
    learning_weight: float = 0.7
    toll_scale: float = 2e-4  # per meter
    max_days: int = 80  # learning days after the warm-up day
    convergence_tol: float = 0.5  # DKK
    stable_days: int = 5
    seed: int = 0
    resample_choices: bool = False

    def validate(self) -> None:
        if not 0 < self.learning_weight < 1:
            raise ConfigurationError("learning_weight must lie in (0, 1)")
        if self.logit_scale <= 0:
            raise ConfigurationError("logit_scale must be > 0")
        if self.convergence_tol <= 0:
            raise ConfigurationError("convergence_tol must be > 0")
        if self.max_days < 1 or self.stable_days < 1:
            raise ConfigurationError("max_days and stable_days must be >= 1")


@dataclass
class CostTable:
    """Perceived and experienced/estimated utilities, one row per traveler.

    Rows are padded to the longest menu; ``mask`` marks real slots.
    """

    perceived: np.ndarray  # (N, S) DKK
    experienced: np.ndarray  # (N, S) DKK
    mask: np.ndarray  # (N, S) bool


@dataclass
class DayRecord:
    """Per-day summary kept in the equilibrium result and CSV output."""

    day: int
    inconsistency: float | None  # None on the warm-up day
    consumer_surplus: float  # mean experienced cost at chosen slots, DKK
    welfare: float  # consumer surplus + mean toll revenue, DKK
    peak_accumulation: int
    mean_travel_time: float  # minutes


@dataclass
class EquilibriumResult:
    final_costs: CostTable
    final_departures: np.ndarray  # (N,) minutes
    inconsistency_series: np.ndarray  # (days_run,) DKK
    day_results: list[DayRecord]  # warm-up day + one per learning day
    converged: bool
    days_run: int  # learning days actually simulated
    gumbel_draws: np.ndarray  # (N, S) realized taste shocks, DKK
    chosen_slots: np.ndarray  # (N,) menu index chosen on the final day
    final_travel_times: np.ndarray  # (N,) minutes
    final_day: DaySimResult
    toll: TollProfile | None
    toll_scale: float
    kept_trajectories: dict[int, np.ndarray] = field(default_factory=dict)  # day -> events


@dataclass
class PopulationArrays:
    """Stacked per-traveler attributes plus the padded menu matrix."""

    trip_length: np.ndarray
    value_of_time: np.ndarray
    sde: np.ndarray
    sdl: np.ndarray
    desired_arrival: np.ndarray
    menu_times: np.ndarray  # (N, S), padded with each row's last entry
    menu_mask: np.ndarray  # (N, S) bool
    menu_sizes: np.ndarray  # (N,) int

    @property
    def n(self) -> int:
        return self.trip_length.size


def as_arrays(population: list[TravelerProfile]) -> PopulationArrays:
    n = len(population)
    sizes = np.array([p.time_window.size for p in population])
    s_max = int(sizes.max())
    menu = np.empty((n, s_max))
    mask = np.zeros((n, s_max), dtype=bool)
    for i, p in enumerate(population):
        k = p.time_window.size
        menu[i, :k] = p.time_window
        menu[i, k:] = p.time_window[-1]
        mask[i, :k] = True
    return PopulationArrays(
        trip_length=np.array([p.trip_length for p in population]),
        value_of_time=np.array([p.value_of_time for p in population]),
        sde=np.array([p.sde for p in population]),
        sdl=np.array([p.sdl for p in population]),
        desired_arrival=np.array([p.desired_arrival for p in population]),
        menu_times=menu,
        menu_mask=mask,
        menu_sizes=sizes,
    )


def experienced_cost(
    traveler: TravelerProfile,
    dep: float,
    travel_time: float,
    toll: TollProfile | None,
    w: float,
) -> float:
    """Money utility of one completed trip (negative cost), in DKK.

    Sums travel time, early/late schedule deviation weighted by the
    traveler's penalties, and the distance-scaled toll payment.
    """
    if travel_time < 0:
        raise ConfigurationError("travel_time must be >= 0")
    early = max(traveler.desired_arrival - dep - travel_time, 0.0)
    late = max(dep + travel_time - traveler.desired_arrival, 0.0)
    tc = travel_time + traveler.sde * early + traveler.sdl * late
    cost = -traveler.value_of_time * tc
    if toll is not None:
        cost -= eval_toll(toll, dep) * traveler.trip_length * w
    return float(cost)


def _cost_matrix(
    arrs: PopulationArrays,
    travel_time: np.ndarray,
    toll: TollProfile | None,
    w: float,
) -> np.ndarray:
    """Vectorized experienced_cost over the whole (traveler, slot) grid."""
    dep = arrs.menu_times
    t_star = arrs.desired_arrival[:, None]
    early = np.maximum(t_star - dep - travel_time, 0.0)
    late = np.maximum(dep + travel_time - t_star, 0.0)
    tc = travel_time + arrs.sde[:, None] * early + arrs.sdl[:, None] * late
    cost = -arrs.value_of_time[:, None] * tc
    if toll is not None:
        cost = cost - eval_toll(toll, dep) * arrs.trip_length[:, None] * w
    return cost


def choice_probabilities(perceived_row: np.ndarray, logit_scale: float) -> np.ndarray:
    """Logit probabilities over one menu: softmax of logit_scale * cost."""
    row = np.asarray(perceived_row, dtype=float)
    if row.size == 0:
        raise ConfigurationError("empty menu")
    if not np.all(np.isfinite(row)):
        raise ConfigurationError("costs must be finite")
    z = logit_scale * row
    z = z - z.max()
    e = np.exp(z)
    return e / e.sum()


def learning_update(perceived, experienced, learning_weight: float):
    """Convex blend of prior perception and today's outcome (elementwise)."""
    if not 0 < learning_weight < 1:
        raise ConfigurationError("learning_weight must lie in (0, 1)")
    return learning_weight * np.asarray(perceived) + (1 - learning_weight) * np.asarray(experienced)


def inconsistency(costs: CostTable) -> float:
    """Per-capita L1 gap between the perceived and experienced tables."""
    if costs.perceived.shape != costs.experienced.shape:
        raise ConfigurationError("cost tables must share a shape")
    gap = np.abs(costs.perceived - costs.experienced)
    return float(np.sum(gap, where=costs.mask) / costs.perceived.shape[0])


def _masked_probabilities(perceived: np.ndarray, mask: np.ndarray, logit_scale: float) -> np.ndarray:
    z = np.where(mask, logit_scale * perceived, -np.inf)
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _choose_slots(
    perceived: np.ndarray,
    mask: np.ndarray,
    gumbel: np.ndarray,
    cfg: DayToDayConfig,
    rng: np.random.Generator,
) -> np.ndarray:
    if cfg.resample_choices:
        probs = _masked_probabilities(perceived, mask, cfg.logit_scale)
        u = rng.random(perceived.shape[0])[:, None]
        idx = (probs.cumsum(axis=1) < u).sum(axis=1)
        return np.minimum(idx, mask.sum(axis=1) - 1)  # guard cumsum round-off
    utility = np.where(mask, perceived + gumbel, -np.inf)
    return utility.argmax(axis=1)


def _run_one_day(
    arrs: PopulationArrays,
    slots: np.ndarray,
    net: NetworkParams,
    toll: TollProfile | None,
    w: float,
) -> tuple[DaySimResult, np.ndarray, np.ndarray]:
    """Simulate chosen departures, then fill the full cost matrix.

    Chosen slots use the traveler's own simulated travel time; every other
    slot is estimated with a fictional probe along the same trajectory.
    """
    rows = np.arange(arrs.n)
    departures = arrs.menu_times[rows, slots]
    result = simulate_day(departures, arrs.trip_length, net)
    probe = TrajectoryIntegrator(result, net)
    tt = probe.travel_times(
        arrs.menu_times.ravel(),
        np.repeat(arrs.trip_length, arrs.menu_times.shape[1]),
    ).reshape(arrs.menu_times.shape)
    tt[rows, slots] = result.travel_times
    costs = _cost_matrix(arrs, tt, toll, w)
    return result, costs, tt


def _day_record(
    day: int,
    inconsistency_value: float | None,
    arrs: PopulationArrays,
    slots: np.ndarray,
    costs: np.ndarray,
    result: DaySimResult,
    toll: TollProfile | None,
    w: float,
) -> DayRecord:
    rows = np.arange(arrs.n)
    chosen_cost = costs[rows, slots]
    cs = float(chosen_cost.mean())
    revenue = 0.0
    if toll is not None:
        deps = arrs.menu_times[rows, slots]
        revenue = float(np.mean(eval_toll(toll, deps) * arrs.trip_length * w))
    return DayRecord(
        day=day,
        inconsistency=inconsistency_value,
        consumer_surplus=cs,
        welfare=cs + revenue,
        peak_accumulation=result.peak_accumulation,
        mean_travel_time=float(result.travel_times.mean()),
    )


def run_day_to_day(
    population: list[TravelerProfile],
    net: NetworkParams,
    toll: TollProfile | None,
    cfg: DayToDayConfig,
    keep_days: tuple[int, ...] = (),
) -> EquilibriumResult:
    """Iterate days until the perceived costs stop moving.

    Day 0 is a warm-up: departures are uniform over each menu and the
    resulting cost table becomes the initial perception. Learning days then
    run until the inconsistency stays below ``convergence_tol`` for
    ``stable_days`` consecutive days, or ``max_days`` is reached (the
    result is then flagged ``converged=False``). Full event traces of the
    days listed in ``keep_days`` are retained in the result.
    """
    cfg.validate()
    arrs = as_arrays(population)
    w = cfg.toll_scale
    seeds = np.random.SeedSequence(cfg.seed).spawn(3)
    gumbel = np.random.default_rng(seeds[0]).gumbel(
        0.0, 1.0 / cfg.logit_scale, size=arrs.menu_times.shape
    )
    day0_rng = np.random.default_rng(seeds[1])
    choice_rng = np.random.default_rng(seeds[2])
    kept: dict[int, np.ndarray] = {}

    # warm-up day: no perception yet, uniform random departures
    slots = (day0_rng.random(arrs.n) * arrs.menu_sizes).astype(int)
    result, costs, _ = _run_one_day(arrs, slots, net, toll, w)
    perceived = costs.copy()
    records = [_day_record(0, None, arrs, slots, costs, result, toll, w)]
    if 0 in keep_days:
        kept[0] = result.trajectory.copy()

    series: list[float] = []
    streak = 0
    converged = False
    for day in range(1, cfg.max_days + 1):
        slots = _choose_slots(perceived, arrs.menu_mask, gumbel, cfg, choice_rng)
        result, costs, _ = _run_one_day(arrs, slots, net, toll, w)
        inc = inconsistency(CostTable(perceived, costs, arrs.menu_mask))
        series.append(inc)
        records.append(_day_record(day, inc, arrs, slots, costs, result, toll, w))
        perceived = learning_update(perceived, costs, cfg.learning_weight)
        if day in keep_days:
            kept[day] = result.trajectory.copy()
        streak = streak + 1 if inc < cfg.convergence_tol else 0
        if streak >= cfg.stable_days:
            converged = True
            break

    rows = np.arange(arrs.n)
    return EquilibriumResult(
        final_costs=CostTable(perceived, costs, arrs.menu_mask),
        final_departures=arrs.menu_times[rows, slots],
        inconsistency_series=np.array(series),
        day_results=records,
        converged=converged,
        days_run=len(series),
        gumbel_draws=gumbel,
        chosen_slots=slots,
        final_travel_times=result.travel_times,
        final_day=result,
        toll=toll,
        toll_scale=w,
        kept_trajectories=kept,
    )
