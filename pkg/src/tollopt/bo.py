"""Bayesian optimization over box-bounded decision vectors.

The loop is standard: a Latin-hypercube warm start, a Matern GP surrogate
refitted after every evaluation, and an upper-confidence-bound acquisition
maximized by quasi-random probing plus local refinement. For
high-dimensional searches the acquisition can be restricted each iteration
to a dropout subset of coordinates, the rest pinned at the incumbent:
either a uniform random subset, or structured subsets that group the toll
encoding [A1, xi1, s1, A2, ...] by parameter type (one group of
amplitudes, one of centers, one of widths) or by component.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from .errors import ConfigurationError, GridlockError
from .gp import GPModel, fit_hyperparameters, ucb


@dataclass(frozen=True)
class DropoutSpec:
    """Which coordinates the acquisition may move each iteration."""

    kind: str = "none"  # none | random | s1 | s2
    d: int | None = None

    def __post_init__(self):
        if self.kind not in ("none", "random", "s1", "s2"):
            raise ConfigurationError(f"unknown dropout kind {self.kind!r}")
        if self.kind != "none" and (self.d is None or self.d < 1):
            raise ConfigurationError("dropout needs d >= 1")


@dataclass
class BOConfig:
    n_init: int = 30
    budget: int = 90  # total evaluations including the initial design
    ucb_beta: float = 2.0
    dropout: DropoutSpec = field(default_factory=DropoutSpec)
    acq_restarts: int = 5
    acq_probe_points: int = 1024
    seed: int = 0
    objective_seed: int = 0  # bookkeeping only: recorded with each evaluation
    stall_penalty: float = -1000.0
    fit_restarts: int = 8

    def validate(self, dims: int) -> None:
        if self.n_init < 1:
            raise ConfigurationError("n_init must be >= 1")
        if self.budget < self.n_init:
            raise ConfigurationError("budget must be >= n_init")
        if self.dropout.kind != "none" and not 1 <= self.dropout.d <= dims:
            raise ConfigurationError("dropout d must lie in [1, D]")


@dataclass
class BOTrace:
    evaluations: list[tuple[np.ndarray, float, int]]  # (vector, objective, seed used)
    incumbent_series: np.ndarray  # best objective so far, per evaluation
    final_best: tuple[np.ndarray, float]


def lhs(n: int, dims: int, rng: np.random.Generator) -> np.ndarray:
    """Latin hypercube in [0,1)^dims: one point per stratum per dimension."""
    if n < 1 or dims < 1:
        raise ConfigurationError("n and dims must be >= 1")
    pts = np.empty((n, dims))
    for d in range(dims):
        pts[:, d] = (rng.permutation(n) + rng.random(n)) / n
    return pts


def dropout_select(spec: DropoutSpec, dims: int, rng: np.random.Generator) -> np.ndarray:
    """Pick the active coordinate indices for one iteration (sorted)."""
    if spec.kind == "none":
        return np.arange(dims)
    d = spec.d
    if not 1 <= d <= dims:
        raise ConfigurationError(f"d={d} infeasible for {dims} dimensions")
    if spec.kind == "random":
        return np.sort(rng.choice(dims, size=d, replace=False))
    if dims % 3 != 0:
        raise ConfigurationError("structured dropout needs a 3K-dimensional encoding")
    if spec.kind == "s1":
        # groups by parameter type; every type must be represented
        if d < 3:
            raise ConfigurationError("s1 needs d >= 3 to cover all three groups")
        chosen = [rng.choice(np.arange(g, dims, 3)) for g in range(3)]
        rest = np.setdiff1d(np.arange(dims), chosen)
        if d > 3:
            chosen.extend(rng.choice(rest, size=d - 3, replace=False))
        return np.sort(np.array(chosen, dtype=int))
    # s2: groups by component; one variable from each of d chosen components
    k = dims // 3
    if d > k:
        raise ConfigurationError(f"s2 needs d <= {k} components")
    comps = rng.choice(k, size=d, replace=False)
    return np.sort(np.array([3 * c + rng.integers(3) for c in comps], dtype=int))


def _to_unit(x: np.ndarray, bounds: np.ndarray) -> np.ndarray:
    return (x - bounds[:, 0]) / (bounds[:, 1] - bounds[:, 0])


def _from_unit(u: np.ndarray, bounds: np.ndarray) -> np.ndarray:
    return bounds[:, 0] + u * (bounds[:, 1] - bounds[:, 0])


def maximize_acquisition(
    model: GPModel,
    bounds: np.ndarray,
    beta: float,
    active_dims: np.ndarray,
    fill_in: np.ndarray,
    cfg: BOConfig,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Return the in-bounds vector maximizing the UCB over the active dims.

    Inactive coordinates stay at ``fill_in``. The search evaluates
    ``acq_probe_points`` quasi-random probes, refines the best few with
    L-BFGS, and is guaranteed to return a point at least as good as every
    probe. The model is expected to live on the unit cube; ``bounds`` maps
    it back to decision units.
    """
    bounds = np.asarray(bounds, dtype=float)
    active_dims = np.asarray(active_dims, dtype=int)
    if active_dims.size == 0:
        raise ConfigurationError("active_dims must be non-empty")
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    fill_unit = np.clip(_to_unit(np.asarray(fill_in, dtype=float), bounds), 0.0, 1.0)

    sampler = qmc.Halton(d=active_dims.size, scramble=True, seed=rng)
    probes_active = sampler.random(cfg.acq_probe_points)
    probes = np.tile(fill_unit, (cfg.acq_probe_points, 1))
    probes[:, active_dims] = probes_active
    scores = ucb(model, probes, beta)

    order = np.argsort(scores)[::-1]
    best_u = probes[order[0]]
    best_score = scores[order[0]]

    def neg_ucb(sub):
        full = fill_unit.copy()
        full[active_dims] = sub
        return -ucb(model, full, beta)

    for idx in order[: max(cfg.acq_restarts, 1)]:
        res = minimize(
            neg_ucb,
            probes[idx, active_dims],
            method="L-BFGS-B",
            bounds=[(0.0, 1.0)] * active_dims.size,
        )
        if -res.fun > best_score:
            best_score = -res.fun
            best_u = fill_unit.copy()
            best_u[active_dims] = res.x
    return _from_unit(np.clip(best_u, 0.0, 1.0), bounds)


def run_bo(objective, bounds: np.ndarray, cfg: BOConfig) -> BOTrace:
    """Maximize a black-box objective over a box.

    Evaluations that raise :class:`GridlockError` are recorded with
    ``cfg.stall_penalty`` instead of aborting the campaign. Deterministic
    given ``cfg.seed`` and a deterministic objective.
    """
    bounds = np.asarray(bounds, dtype=float)
    dims = len(bounds)
    cfg.validate(dims)
    rng = np.random.default_rng(cfg.seed)

    def evaluate(x):
        try:
            return float(objective(x))
        except GridlockError:
            return float(cfg.stall_penalty)

    xs: list[np.ndarray] = []
    ys: list[float] = []
    for u in lhs(cfg.n_init, dims, rng):
        x = _from_unit(u, bounds)
        xs.append(x)
        ys.append(evaluate(x))

    while len(ys) < cfg.budget:
        unit_x = _to_unit(np.array(xs), bounds)
        model = fit_hyperparameters(unit_x, np.array(ys), n_restarts=cfg.fit_restarts, seed=rng)
        incumbent = xs[int(np.argmax(ys))]
        active = dropout_select(cfg.dropout, dims, rng)
        x_next = maximize_acquisition(
            model, bounds, cfg.ucb_beta, active, incumbent, cfg, rng=rng
        )
        xs.append(x_next)
        ys.append(evaluate(x_next))

    incumbents = np.maximum.accumulate(np.array(ys))
    best_idx = int(np.argmax(ys))
    return BOTrace(
        evaluations=[(x, y, cfg.objective_seed) for x, y in zip(xs, ys)],
        incumbent_series=incumbents,
        final_best=(xs[best_idx], ys[best_idx]),
    )
