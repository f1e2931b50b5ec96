"""Command-line front end: ``tollopt {nte,toll,optimize}``."""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .config import load_config
from .errors import TollOptError
from .experiments import run_fixed_toll, run_nte, run_optimize

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

_RUNNERS = {"nte": run_nte, "toll": run_fixed_toll, "optimize": run_optimize}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tollopt",
        description="Time-of-day road pricing experiments on a single-reservoir network.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("nte", "run the no-toll baseline to equilibrium"),
        ("toll", "run a fixed time-of-day toll to equilibrium"),
        ("optimize", "optimize the toll profile by Bayesian optimization"),
    ):
        cmd = sub.add_parser(name, help=doc)
        cmd.add_argument("--config", required=True, help="TOML config file")
        cmd.add_argument("--out", default=None, help="output directory")
        cmd.add_argument("--seed", type=int, default=None, help="override the dynamics/optimizer seeds")
        cmd.add_argument("--replications", type=int, default=None, help="override the replication count")
        cmd.add_argument("--jobs", type=int, default=1, help="worker processes for replications")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.dynamics = dataclasses.replace(cfg.dynamics, seed=args.seed)
            if cfg.bo is not None:
                cfg.bo = dataclasses.replace(cfg.bo, seed=args.seed)
        if args.replications is not None:
            cfg = dataclasses.replace(cfg, replications=args.replications)
        if cfg.mode != args.command:
            raise TollOptError(
                f"config resolves to the '{cfg.mode}' mode but the "
                f"'{args.command}' subcommand was given"
            )
        summary = _RUNNERS[args.command](cfg, out_dir=args.out, jobs=args.jobs)
    except TollOptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    if args.command == "optimize":
        print(f"best objective: {summary['best_objective']:.4f} DKK "
              f"(mean {summary['mean']:.4f}, std {summary['std']:.4f} "
              f"over {summary['n_replications']} replications)")
        print(f"best vector: {summary['best_vector']}")
    else:
        print(f"welfare per capita: {summary['welfare']:.4f} DKK "
              f"(CS {summary['consumer_surplus']:.4f}, RR {summary['revenue']:.4f})")
        print(f"peak accumulation: {summary['peak_accumulation']}, "
              f"days to converge: {summary['days_to_converge']}, "
              f"converged: {summary['converged']}")
        if not summary["converged"]:
            return EXIT_RUNTIME + 1  # distinct non-convergence exit code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
