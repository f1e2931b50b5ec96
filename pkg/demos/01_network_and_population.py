"""Synthesize the commuter population and look at the network's speed law.

Run as:  python demos/01_network_and_population.py
Writes plots to demos/output/.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from tollopt import NetworkParams, PopulationConfig, build_population, critical_accumulation, speed

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

# ---- population -----------------------------------------------------------
cfg = PopulationConfig(seed=42)
population = build_population(cfg)
lengths = np.array([p.trip_length for p in population])
sde = np.array([p.sde for p in population])
sdl = np.array([p.sdl for p in population])
t_star = np.array([p.desired_arrival for p in population])

print(f"{len(population)} travelers")
print(f"trip length: mean {lengths.mean():.0f} m, sd {lengths.std():.0f} m, min {lengths.min():.0f} m")
print(f"early penalty factor: mean {sde.mean():.3f}, range [{sde.min():.3f}, {sde.max():.3f}]")
print(f"late penalty factor:  mean {sdl.mean():.3f}, range [{sdl.min():.3f}, {sdl.max():.3f}]")
print(f"desired arrivals span [{t_star.min():.1f}, {t_star.max():.1f}] min")
print(f"menu per traveler: {population[0].time_window.size} departure slots, "
      f"{cfg.window_step:.0f}-minute spacing")

fig, axes = plt.subplots(1, 3, figsize=(13, 3.5))
axes[0].hist(lengths, bins=50, color="steelblue")
axes[0].set_xlabel("trip length (m)")
axes[1].scatter(sde, sdl, s=3, alpha=0.3, color="darkred")
axes[1].set_xlabel("early penalty factor")
axes[1].set_ylabel("late penalty factor")
axes[2].hist(t_star, bins=30, color="seagreen")
axes[2].set_xlabel("desired arrival (min)")
fig.tight_layout()
fig.savefig(OUT / "population.png", dpi=120)

# ---- network --------------------------------------------------------------
net = NetworkParams()
n = np.linspace(0, net.n_jam, 500)
v = speed(n, net)
n_cr = critical_accumulation(net)
print(f"\nfree-flow speed {speed(0, net):.1f} m/min, jam at {net.n_jam:.0f} vehicles")
print(f"flow-maximizing accumulation: {n_cr:.0f} vehicles")

fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
axes[0].plot(n, v)
axes[0].set_xlabel("accumulation")
axes[0].set_ylabel("speed (m/min)")
axes[1].plot(n, n * v / 1000)
axes[1].axvline(n_cr, ls="--", color="gray")
axes[1].set_xlabel("accumulation")
axes[1].set_ylabel("production (km/min)")
fig.tight_layout()
fig.savefig(OUT / "network.png", dpi=120)
print(f"plots in {OUT}/")
