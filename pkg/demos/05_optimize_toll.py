"""Bayesian optimization of a single-bump toll profile.

The objective is equilibrium welfare per capita: each evaluation runs the
full day-to-day loop under the candidate toll. A Latin-hypercube warm
start seeds the Gaussian-process surrogate; upper-confidence-bound steps
then home in on the welfare-maximizing amplitude, center and width.

Takes a couple of minutes at full scale.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from tollopt import (
    BOConfig,
    DayToDayConfig,
    NetworkParams,
    PopulationConfig,
    TollBounds,
    build_population,
    eval_toll,
    from_vector,
    run_bo,
    run_day_to_day,
    welfare_nte,
    welfare_todp,
)

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

net = NetworkParams()
population = build_population(PopulationConfig(seed=42))
dyn = DayToDayConfig(seed=42, max_days=60)
bounds = TollBounds()

nte = run_day_to_day(population, net, None, dyn)
w_nte = welfare_nte(nte, population).welfare_per_capita
print(f"no-toll welfare {w_nte:.2f} DKK, peak {nte.day_results[-1].peak_accumulation}")


def objective(vector):
    toll = from_vector(vector, 1)
    eq = run_day_to_day(population, net, toll, dyn)
    return welfare_todp(eq, population, toll, dyn.toll_scale).welfare_per_capita


trace = run_bo(objective, bounds.as_array(1), BOConfig(n_init=12, budget=30, seed=42))
best_vector, best_welfare = trace.final_best
toll = from_vector(best_vector, 1)
eq = run_day_to_day(population, net, toll, dyn)
rep = welfare_todp(eq, population, toll, dyn.toll_scale)

print(f"best toll: amplitude {best_vector[0]:.1f}, center {best_vector[1]:.1f} min, "
      f"width {best_vector[2]:.1f} min")
print(f"welfare {best_welfare:.2f} DKK ({(best_welfare - w_nte) / abs(w_nte) * 100:+.1f}% vs no toll)")
print(f"peak accumulation {eq.day_results[-1].peak_accumulation} "
      f"(no toll: {nte.day_results[-1].peak_accumulation})")

fig, axes = plt.subplots(1, 2, figsize=(11, 4))
axes[0].plot(trace.incumbent_series, marker=".", ms=4)
axes[0].axhline(w_nte, ls="--", color="gray", label="no toll")
axes[0].set_xlabel("evaluation")
axes[0].set_ylabel("best welfare so far (DKK)")
axes[0].legend()
axes[1].step(nte.final_day.trajectory[:, 0], nte.final_day.trajectory[:, 1],
             where="post", label="no toll", lw=1.0)
axes[1].step(eq.final_day.trajectory[:, 0], eq.final_day.trajectory[:, 1],
             where="post", label="optimized toll", lw=1.0)
t = np.linspace(0, 150, 400)
ax2 = axes[1].twinx()
ax2.plot(t, eval_toll(toll, t), ls="--", color="gray", lw=1.0)
ax2.set_ylabel("toll rate")
axes[1].set_xlabel("time (min)")
axes[1].set_ylabel("accumulation")
axes[1].legend(loc="upper left")
fig.tight_layout()
fig.savefig(OUT / "optimized_toll.png", dpi=120)
print(f"plot in {OUT}/optimized_toll.png")
