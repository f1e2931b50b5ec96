"""Experiment configuration files.

Configs are TOML with one section per subsystem ([population], [network],
[dynamics], [toll], [bo]) plus a few top-level keys. Unknown keys are
errors. The effective config, with every default materialized, can be
echoed back out as TOML; re-running from the echo reproduces the run.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .bo import BOConfig, DropoutSpec
from .dynamics import DayToDayConfig
from .errors import ConfigurationError
from .mfd import NetworkParams
from .population import PopulationConfig
from .toll import TollBounds, TollProfile, from_vector, to_vector

_TOP_LEVEL_KEYS = {"replications", "output_dir", "trajectory_days"}
_TOLL_FIXED_KEYS = {"amplitude", "mean", "width"}
_TOLL_BOUND_KEYS = {"k", "amplitude_range", "mean_range", "width_range"}


@dataclass
class ExperimentConfig:
    population: PopulationConfig
    network: NetworkParams
    dynamics: DayToDayConfig
    toll_profile: TollProfile | None  # fixed-toll mode
    toll_bounds: TollBounds | None  # optimize mode
    toll_k: int
    bo: BOConfig | None
    replications: int = 1
    output_dir: str | None = None
    trajectory_days: tuple[int, ...] = ()

    @property
    def mode(self) -> str:
        if self.toll_profile is not None:
            return "toll"
        if self.toll_bounds is not None:
            return "optimize"
        return "nte"


def _apply_section(cls, section: dict, name: str, **overrides):
    allowed = {f.name for f in fields(cls)}
    unknown = set(section) - allowed
    if unknown:
        raise ConfigurationError(f"unknown key(s) in [{name}]: {sorted(unknown)}")
    kwargs = dict(section)
    if "penalty_mean" in kwargs:
        kwargs["penalty_mean"] = tuple(kwargs["penalty_mean"])
    if "penalty_bounds" in kwargs:
        kwargs["penalty_bounds"] = tuple(map(tuple, kwargs["penalty_bounds"]))
    if "penalty_cov" in kwargs:
        kwargs["penalty_cov"] = np.asarray(kwargs["penalty_cov"], dtype=float)
    kwargs.update(overrides)
    return cls(**kwargs)


def _parse_toll(section: dict) -> tuple[TollProfile | None, TollBounds | None, int]:
    unknown = set(section) - _TOLL_FIXED_KEYS - _TOLL_BOUND_KEYS
    if unknown:
        raise ConfigurationError(f"unknown key(s) in [toll]: {sorted(unknown)}")
    has_fixed = bool(_TOLL_FIXED_KEYS & set(section))
    has_bounds = bool(_TOLL_BOUND_KEYS & set(section))
    if has_fixed and has_bounds:
        raise ConfigurationError("[toll] mixes fixed parameters with search bounds")
    if has_fixed:
        missing = _TOLL_FIXED_KEYS - set(section)
        if missing:
            raise ConfigurationError(f"[toll] fixed mode needs keys {sorted(missing)}")
        amp, mean, width = section["amplitude"], section["mean"], section["width"]
        if not len(amp) == len(mean) == len(width):
            raise ConfigurationError("[toll] amplitude/mean/width lengths differ")
        flat = np.ravel(np.column_stack([amp, mean, width]))
        return from_vector(flat, len(amp)), None, len(amp)
    if has_bounds:
        k = int(section.get("k", 1))
        if k < 1:
            raise ConfigurationError("[toll] k must be >= 1")
        bounds = TollBounds(
            amplitude_range=tuple(section.get("amplitude_range", (4.0, 30.0))),
            mean_range=tuple(section.get("mean_range", (30.0, 90.0))),
            width_range=tuple(section.get("width_range", (10.0, 50.0))),
        )
        return None, bounds, k
    return None, None, 0


def _parse_bo(section: dict) -> BOConfig:
    allowed = {f.name for f in fields(BOConfig) if f.name not in ("dropout", "objective_seed")}
    allowed |= {"dropout", "dropout_d"}
    unknown = set(section) - allowed
    if unknown:
        raise ConfigurationError(f"unknown key(s) in [bo]: {sorted(unknown)}")
    kwargs = {k: v for k, v in section.items() if k not in ("dropout", "dropout_d")}
    kind = section.get("dropout", "none")
    d = section.get("dropout_d")
    if kind == "none" and d is not None:
        raise ConfigurationError("[bo] dropout_d given but dropout is 'none'")
    kwargs["dropout"] = DropoutSpec(kind, int(d) if d is not None else None)
    return BOConfig(**kwargs)


def load_config(path: str | Path) -> ExperimentConfig:
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> ExperimentConfig:
    known_sections = {"population", "network", "dynamics", "toll", "bo"}
    unknown = set(raw) - known_sections - _TOP_LEVEL_KEYS
    if unknown:
        raise ConfigurationError(f"unknown top-level key(s): {sorted(unknown)}")
    population = _apply_section(PopulationConfig, raw.get("population", {}), "population")
    network = _apply_section(NetworkParams, raw.get("network", {}), "network")
    dynamics = _apply_section(DayToDayConfig, raw.get("dynamics", {}), "dynamics")
    toll_profile, toll_bounds, toll_k = _parse_toll(raw.get("toll", {}))
    bo = _parse_bo(raw["bo"]) if "bo" in raw else None
    if toll_bounds is not None and bo is None:
        bo = BOConfig()
    if bo is not None and toll_bounds is None:
        raise ConfigurationError("[bo] present but [toll] defines no search bounds")
    replications = int(raw.get("replications", 1))
    if replications < 1:
        raise ConfigurationError("replications must be >= 1")
    population.validate()
    dynamics.validate()
    return ExperimentConfig(
        population=population,
        network=network,
        dynamics=dynamics,
        toll_profile=toll_profile,
        toll_bounds=toll_bounds,
        toll_k=toll_k,
        bo=bo,
        replications=replications,
        output_dir=raw.get("output_dir"),
        trajectory_days=tuple(raw.get("trajectory_days", ())),
    )


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise ConfigurationError(f"cannot serialize {type(v)} to TOML")


def _dataclass_section(obj, skip=()) -> dict:
    out = {}
    for f in fields(obj):
        if f.name in skip:
            continue
        out[f.name] = getattr(obj, f.name)
    return out


def config_to_dict(cfg: ExperimentConfig) -> dict:
    raw: dict = {"replications": cfg.replications}
    if cfg.output_dir is not None:
        raw["output_dir"] = cfg.output_dir
    if cfg.trajectory_days:
        raw["trajectory_days"] = list(cfg.trajectory_days)
    raw["population"] = _dataclass_section(cfg.population)
    raw["network"] = _dataclass_section(cfg.network)
    raw["dynamics"] = _dataclass_section(cfg.dynamics)
    if cfg.toll_profile is not None:
        vec = to_vector(cfg.toll_profile).reshape(-1, 3)
        raw["toll"] = {
            "amplitude": vec[:, 0].tolist(),
            "mean": vec[:, 1].tolist(),
            "width": vec[:, 2].tolist(),
        }
    elif cfg.toll_bounds is not None:
        raw["toll"] = {
            "k": cfg.toll_k,
            "amplitude_range": list(cfg.toll_bounds.amplitude_range),
            "mean_range": list(cfg.toll_bounds.mean_range),
            "width_range": list(cfg.toll_bounds.width_range),
        }
    if cfg.bo is not None:
        bo = _dataclass_section(cfg.bo, skip=("dropout", "objective_seed"))
        bo["dropout"] = cfg.bo.dropout.kind
        if cfg.bo.dropout.d is not None:
            bo["dropout_d"] = cfg.bo.dropout.d
        raw["bo"] = bo
    return raw


def dump_config(cfg: ExperimentConfig) -> str:
    """Render the effective config as TOML text."""
    raw = config_to_dict(cfg)
    lines = []
    for key, value in raw.items():
        if not isinstance(value, dict):
            lines.append(f"{key} = {_toml_value(value)}")
    for section in ("population", "network", "dynamics", "toll", "bo"):
        if section not in raw:
            continue
        lines.append("")
        lines.append(f"[{section}]")
        for key, value in raw[section].items():
            lines.append(f"{key} = {_toml_value(value)}")
    return "\n".join(lines) + "\n"
