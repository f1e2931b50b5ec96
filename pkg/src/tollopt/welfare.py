"""Social-welfare accounting at equilibrium.

Welfare per capita is consumer surplus plus regulator revenue. Toll
payments are a transfer between the two, so welfare always reduces to the
mean of travel-time and schedule-deviation costs (plus, optionally, the
realized taste shocks); the implementation computes it both ways and
checks that they agree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import EquilibriumResult, as_arrays
from .population import TravelerProfile
from .toll import TollProfile, eval_toll

DECOMPOSITION_TOL = 1e-9


@dataclass(frozen=True)
class WelfareReport:
    welfare_per_capita: float  # DKK
    consumer_surplus_per_capita: float
    revenue_per_capita: float
    avg_travel_time_cost: float  # DKK, utility-signed (<= 0)
    avg_schedule_delay_cost: float  # DKK, utility-signed (<= 0)
    include_epsilon: bool


def _chosen_components(eq: EquilibriumResult, population: list[TravelerProfile]):
    arrs = as_arrays(population)
    dep = eq.final_departures
    tt = eq.final_travel_times
    early = np.maximum(arrs.desired_arrival - dep - tt, 0.0)
    late = np.maximum(dep + tt - arrs.desired_arrival, 0.0)
    tt_cost = -arrs.value_of_time * tt
    sd_cost = -arrs.value_of_time * (arrs.sde * early + arrs.sdl * late)
    eps = eq.gumbel_draws[np.arange(arrs.n), eq.chosen_slots]
    return arrs, tt_cost, sd_cost, eps


def welfare_nte(
    eq: EquilibriumResult,
    population: list[TravelerProfile],
    include_epsilon: bool = False,
) -> WelfareReport:
    """Welfare of a no-toll equilibrium; all of it is consumer surplus."""
    if eq.toll is not None:
        raise ValueError("welfare_nte got an equilibrium produced under a toll")
    _, tt_cost, sd_cost, eps = _chosen_components(eq, population)
    w = float(np.mean(tt_cost + sd_cost + (eps if include_epsilon else 0.0)))
    return WelfareReport(
        welfare_per_capita=w,
        consumer_surplus_per_capita=w,
        revenue_per_capita=0.0,
        avg_travel_time_cost=float(tt_cost.mean()),
        avg_schedule_delay_cost=float(sd_cost.mean()),
        include_epsilon=include_epsilon,
    )


def welfare_todp(
    eq: EquilibriumResult,
    population: list[TravelerProfile],
    toll: TollProfile,
    w: float,
    include_epsilon: bool = False,
) -> WelfareReport:
    """Welfare of a tolled equilibrium: consumer surplus plus revenue."""
    if eq.toll != toll or eq.toll_scale != w:
        raise ValueError("equilibrium was produced under a different toll")
    arrs, tt_cost, sd_cost, eps = _chosen_components(eq, population)
    paid = eval_toll(toll, eq.final_departures) * arrs.trip_length * w
    eps_term = eps if include_epsilon else np.zeros_like(eps)
    cs = float(np.mean(tt_cost + sd_cost - paid + eps_term))
    rr = float(np.mean(paid))
    welfare = cs + rr
    direct = float(np.mean(tt_cost + sd_cost + eps_term))
    assert abs(welfare - direct) < DECOMPOSITION_TOL, (welfare, direct)
    return WelfareReport(
        welfare_per_capita=welfare,
        consumer_surplus_per_capita=cs,
        revenue_per_capita=rr,
        avg_travel_time_cost=float(tt_cost.mean()),
        avg_schedule_delay_cost=float(sd_cost.mean()),
        include_epsilon=include_epsilon,
    )


def cost_components(
    eq: EquilibriumResult, population: list[TravelerProfile]
) -> tuple[float, float]:
    """(avg travel-time cost, avg schedule-delay cost), both utility-signed."""
    _, tt_cost, sd_cost, _ = _chosen_components(eq, population)
    return float(tt_cost.mean()), float(sd_cost.mean())
