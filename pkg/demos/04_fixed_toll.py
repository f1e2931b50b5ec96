"""A hand-picked time-of-day toll versus the no-toll equilibrium.

The toll is a Gaussian bump in the middle of the peak. Travelers shift
away from the expensive window; welfare splits into consumer surplus and
collected revenue.
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
    TollProfile,
    build_population,
    eval_toll,
    run_day_to_day,
    welfare_nte,
    welfare_todp,
)

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

net = NetworkParams()
population = build_population(PopulationConfig(seed=42))
cfg = DayToDayConfig(seed=42, max_days=60)
toll = TollProfile.single(11.0, 80.0, 18.0)

nte = run_day_to_day(population, net, None, cfg)
tolled = run_day_to_day(population, net, toll, cfg)

rep_nte = welfare_nte(nte, population)
rep_toll = welfare_todp(tolled, population, toll, cfg.toll_scale)
print("                      no toll     tolled")
print(f"welfare per capita  {rep_nte.welfare_per_capita:9.2f}  {rep_toll.welfare_per_capita:9.2f}  DKK")
print(f"consumer surplus    {rep_nte.consumer_surplus_per_capita:9.2f}  {rep_toll.consumer_surplus_per_capita:9.2f}  DKK")
print(f"revenue             {rep_nte.revenue_per_capita:9.2f}  {rep_toll.revenue_per_capita:9.2f}  DKK")
print(f"peak accumulation   {nte.day_results[-1].peak_accumulation:9d}  {tolled.day_results[-1].peak_accumulation:9d}")

fig, ax = plt.subplots(figsize=(8, 4))
ax.step(nte.final_day.trajectory[:, 0], nte.final_day.trajectory[:, 1],
        where="post", label="no toll", lw=1.0)
ax.step(tolled.final_day.trajectory[:, 0], tolled.final_day.trajectory[:, 1],
        where="post", label="tolled", lw=1.0)
ax.set_xlabel("time (min)")
ax.set_ylabel("accumulation")
t = np.linspace(0, 150, 400)
ax2 = ax.twinx()
ax2.plot(t, eval_toll(toll, t), ls="--", color="gray", lw=1.0, label="toll rate")
ax2.set_ylabel("toll rate")
ax.legend(loc="upper left")
fig.tight_layout()
fig.savefig(OUT / "fixed_toll.png", dpi=120)
print(f"plot in {OUT}/fixed_toll.png")
