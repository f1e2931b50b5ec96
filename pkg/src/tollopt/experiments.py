"""Experiment runners and result-file writers.

Three experiment types share one config file format: a no-toll baseline,
a fixed-toll run, and a toll-optimization campaign. Every run writes its
effective config (``config.echo``), per-day CSVs and a ``summary.json``
into the output directory; see FORMATS.md for the column definitions.

Replication r shifts the dynamics and optimizer seeds by +r, so a summary
aggregates statistically independent runs while each stays bit-for-bit
reproducible from (config, seed).
"""

from __future__ import annotations

import dataclasses
import json
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .bo import BOTrace, run_bo
from .config import ExperimentConfig, dump_config
from .dynamics import DayToDayConfig, EquilibriumResult, run_day_to_day
from .errors import ConfigurationError
from .population import build_population, population_table
from .toll import TollProfile, from_vector
from .welfare import welfare_nte, welfare_todp


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(x) if isinstance(x, float) else str(x) for x in row) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _days_csv(path: Path, eq: EquilibriumResult) -> None:
    rows = [
        (
            r.day,
            float("nan") if r.inconsistency is None else r.inconsistency,
            r.consumer_surplus,
            r.welfare,
            r.peak_accumulation,
        )
        for r in eq.day_results
    ]
    _write_csv(
        path,
        ["day", "inconsistency", "mean_consumer_surplus", "welfare", "peak_accumulation"],
        rows,
    )


def _trajectory_csv(path: Path, trajectory: np.ndarray) -> None:
    _write_csv(
        path,
        ["event_time_min", "accumulation"],
        ((float(t), int(n)) for t, n in trajectory),
    )


def _scenario_summary(
    eq: EquilibriumResult, population, toll: TollProfile | None, w: float
) -> dict:
    if toll is None:
        rep = welfare_nte(eq, population)
        rep_eps = welfare_nte(eq, population, include_epsilon=True)
    else:
        rep = welfare_todp(eq, population, toll, w)
        rep_eps = welfare_todp(eq, population, toll, w, include_epsilon=True)
    return {
        "welfare": rep.welfare_per_capita,
        "consumer_surplus": rep.consumer_surplus_per_capita,
        "revenue": rep.revenue_per_capita,
        "avg_travel_time_cost": rep.avg_travel_time_cost,
        "avg_schedule_delay_cost": rep.avg_schedule_delay_cost,
        "welfare_with_epsilon": rep_eps.welfare_per_capita,
        "consumer_surplus_with_epsilon": rep_eps.consumer_surplus_per_capita,
        "peak_accumulation": eq.day_results[-1].peak_accumulation,
        "days_to_converge": eq.days_run,
        "converged": eq.converged,
    }


def _replication_dynamics(cfg: ExperimentConfig, rep: int) -> DayToDayConfig:
    return dataclasses.replace(cfg.dynamics, seed=cfg.dynamics.seed + rep)


def _run_equilibrium_rep(args) -> tuple[int, EquilibriumResult]:
    cfg, toll, rep, keep_days = args
    population = build_population(cfg.population)
    eq = run_day_to_day(
        population, cfg.network, toll, _replication_dynamics(cfg, rep), keep_days=keep_days
    )
    return rep, eq


def _prepare_out(cfg: ExperimentConfig, out_dir) -> Path:
    out = Path(out_dir if out_dir is not None else cfg.output_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.echo").write_text(dump_config(cfg))
    return out


def _run_scenario(cfg: ExperimentConfig, toll: TollProfile | None, out_dir, jobs: int) -> dict:
    out = _prepare_out(cfg, out_dir)
    population = build_population(cfg.population)
    _write_csv(
        out / "population.csv",
        ["id", "L", "theta", "sde", "sdl", "t_star"],
        ((int(r[0]),) + tuple(float(x) for x in r[1:]) for r in population_table(population)),
    )
    tasks = [
        (cfg, toll, r, cfg.trajectory_days if r == 0 else ())
        for r in range(cfg.replications)
    ]
    if jobs > 1 and cfg.replications > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = dict(pool.map(_run_equilibrium_rep, tasks))
    else:
        results = dict(map(_run_equilibrium_rep, tasks))

    summaries = []
    for rep in range(cfg.replications):
        eq = results[rep]
        name = "days.csv" if cfg.replications == 1 else f"days_{rep}.csv"
        _days_csv(out / name, eq)
        summaries.append(_scenario_summary(eq, population, toll, cfg.dynamics.toll_scale))

    # dumps come from replication 0; days past early convergence are skipped
    for day, traj in sorted(results[0].kept_trajectories.items()):
        _trajectory_csv(out / f"trajectory_day_{day}.csv", traj)

    summary = dict(summaries[0])
    summary["n_replications"] = cfg.replications
    if cfg.replications > 1:
        summary["replications"] = summaries
        summary["mean_welfare"] = float(np.mean([s["welfare"] for s in summaries]))
        summary["std_welfare"] = float(np.std([s["welfare"] for s in summaries]))
    _write_json(out / "summary.json", summary)
    return summary


def run_nte(cfg: ExperimentConfig, out_dir=None, jobs: int = 1) -> dict:
    """No-toll baseline to equilibrium; writes days.csv and summary.json."""
    if cfg.toll_profile is not None:
        raise ConfigurationError("config defines a fixed toll; use the toll mode")
    return _run_scenario(cfg, None, out_dir, jobs)


def run_fixed_toll(cfg: ExperimentConfig, out_dir=None, jobs: int = 1) -> dict:
    """Fixed-toll run to equilibrium, with the CS/revenue split in the summary."""
    if cfg.toll_profile is None:
        raise ConfigurationError("config defines no fixed toll profile")
    return _run_scenario(cfg, cfg.toll_profile, out_dir, jobs)


def make_welfare_objective(cfg: ExperimentConfig, dynamics: DayToDayConfig):
    """Map a decision vector to equilibrium welfare per capita (DKK)."""
    population = build_population(cfg.population)

    def objective(vector: np.ndarray) -> float:
        toll = from_vector(vector, cfg.toll_k)
        eq = run_day_to_day(population, cfg.network, toll, dynamics)
        return welfare_todp(eq, population, toll, dynamics.toll_scale).welfare_per_capita

    return objective


def _run_campaign_rep(args) -> tuple[int, BOTrace]:
    cfg, rep = args
    dynamics = _replication_dynamics(cfg, rep)
    objective = make_welfare_objective(cfg, dynamics)
    bo_cfg = dataclasses.replace(
        cfg.bo, seed=cfg.bo.seed + rep, objective_seed=dynamics.seed
    )
    bounds = cfg.toll_bounds.as_array(cfg.toll_k)
    return rep, run_bo(objective, bounds, bo_cfg)


def _trace_csv(path: Path, trace: BOTrace) -> None:
    dims = len(trace.evaluations[0][0])
    header = ["iteration"] + [f"x{i}" for i in range(dims)] + ["objective", "incumbent"]
    rows = []
    for i, (x, y, _) in enumerate(trace.evaluations):
        rows.append((i,) + tuple(float(v) for v in x) + (float(y), float(trace.incumbent_series[i])))
    _write_csv(path, header, rows)


def run_optimize(cfg: ExperimentConfig, out_dir=None, jobs: int = 1) -> dict:
    """Seeded toll-optimization campaigns; one BO trace per replication."""
    if cfg.toll_bounds is None or cfg.bo is None:
        raise ConfigurationError("optimize mode needs [toll] bounds (k, ranges) and [bo]")
    out = _prepare_out(cfg, out_dir)
    tasks = [(cfg, r) for r in range(cfg.replications)]
    if jobs > 1 and cfg.replications > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = dict(pool.map(_run_campaign_rep, tasks))
    else:
        results = dict(map(_run_campaign_rep, tasks))

    best_objectives = []
    reps = []
    for rep in range(cfg.replications):
        trace = results[rep]
        _trace_csv(out / f"bo_trace_{rep}.csv", trace)
        vec, obj = trace.final_best
        best_objectives.append(obj)
        reps.append(
            {
                "best_vector": [float(v) for v in vec],
                "best_objective": float(obj),
                "seed": cfg.bo.seed + rep,
                "objective_seed": cfg.dynamics.seed + rep,
            }
        )
    best_rep = int(np.argmax(best_objectives))
    summary = {
        "best_vector": reps[best_rep]["best_vector"],
        "best_objective": reps[best_rep]["best_objective"],
        "mean": float(np.mean(best_objectives)),
        "std": float(np.std(best_objectives)),
        "n_replications": cfg.replications,
        "replications": reps,
    }
    _write_json(out / "summary.json", summary)
    return summary
