"""Day-to-day learning without a toll: convergence to equilibrium.

Travelers start with no cost perception, learn from experienced and
probe-estimated costs, and settle into a stable peak within a few weeks.
The inconsistency metric (per-capita L1 gap between perceived and
experienced costs) tracks the convergence.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from tollopt import (
    DayToDayConfig,
    NetworkParams,
    PopulationConfig,
    build_population,
    critical_accumulation,
    run_day_to_day,
    welfare_nte,
)

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

net = NetworkParams()
population = build_population(PopulationConfig(seed=42))
cfg = DayToDayConfig(seed=42, max_days=60)

eq = run_day_to_day(population, net, None, cfg, keep_days=(1, 5, 10))
print(f"converged: {eq.converged} after {eq.days_run} learning days")
print(f"final inconsistency: {eq.inconsistency_series[-1]:.4f} DKK")
print(f"equilibrium peak accumulation: {eq.day_results[-1].peak_accumulation} "
      f"(critical value {critical_accumulation(net):.0f})")
report = welfare_nte(eq, population)
print(f"welfare per capita: {report.welfare_per_capita:.2f} DKK "
      f"(travel time {report.avg_travel_time_cost:.2f}, "
      f"schedule {report.avg_schedule_delay_cost:.2f})")

days = [r.day for r in eq.day_results[1:]]
fig, axes = plt.subplots(1, 3, figsize=(13, 3.5))
axes[0].semilogy(days, eq.inconsistency_series)
axes[0].axhline(cfg.convergence_tol, ls="--", color="gray")
axes[0].set_xlabel("day")
axes[0].set_ylabel("inconsistency (DKK)")
axes[1].plot(days, [r.welfare for r in eq.day_results[1:]])
axes[1].set_xlabel("day")
axes[1].set_ylabel("welfare per capita (DKK)")
for day, traj in sorted(eq.kept_trajectories.items()):
    axes[2].step(traj[:, 0], traj[:, 1], where="post", lw=0.8, label=f"day {day}")
axes[2].step(eq.final_day.trajectory[:, 0], eq.final_day.trajectory[:, 1],
             where="post", lw=1.2, color="black", label=f"day {eq.days_run} (final)")
axes[2].axhline(critical_accumulation(net), ls="--", color="gray")
axes[2].set_xlabel("time (min)")
axes[2].set_ylabel("accumulation")
axes[2].legend(fontsize=7)
fig.tight_layout()
fig.savefig(OUT / "no_toll_convergence.png", dpi=120)
print(f"plot in {OUT}/no_toll_convergence.png")
