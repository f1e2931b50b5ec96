import json
from pathlib import Path

import numpy as np
import pytest

from tollopt import ConfigurationError, config_from_dict, dump_config, load_config
from tollopt.cli import main
from tollopt.experiments import run_fixed_toll, run_nte, run_optimize

TINY = """
replications = 1
trajectory_days = [0]

[population]
n_travelers = 120
seed = 1

[network]
n_jam = 146.0

[dynamics]
seed = 1
max_days = 25
convergence_tol = 4.0
stable_days = 3
"""

TINY_TOLL = TINY + """
[toll]
amplitude = [11.0]
mean = [80.0]
width = [18.0]
"""

TINY_OPT = TINY + """
[toll]
k = 1
amplitude_range = [4.0, 30.0]
mean_range = [30.0, 90.0]
width_range = [10.0, 50.0]

[bo]
n_init = 4
budget = 6
acq_probe_points = 32
fit_restarts = 2
seed = 1
"""


def write(tmp_path, text, name="cfg.toml"):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestConfig:
    def test_defaults_materialize(self):
        cfg = config_from_dict({})
        assert cfg.mode == "nte"
        assert cfg.population.n_travelers == 3700
        assert cfg.network.n_jam == 4500.0
        assert cfg.dynamics.learning_weight == 0.7

    def test_unknown_top_level_key_rejected(self):
        with pytest.raises(ConfigurationError):
            config_from_dict({"notakey": 1})

    def test_unknown_section_key_rejected(self):
        with pytest.raises(ConfigurationError):
            config_from_dict({"population": {"n_travellers": 10}})
        with pytest.raises(ConfigurationError):
            config_from_dict({"dynamics": {"learning_rate": 0.5}})
        with pytest.raises(ConfigurationError):
            config_from_dict({"toll": {"amp": [1.0]}})

    def test_mixed_toll_section_rejected(self):
        with pytest.raises(ConfigurationError):
            config_from_dict({"toll": {"amplitude": [1.0], "mean": [50.0], "width": [10.0], "k": 1}})

    def test_bo_without_bounds_rejected(self):
        with pytest.raises(ConfigurationError):
            config_from_dict({"bo": {"n_init": 4}})

    def test_echo_round_trip(self, tmp_path):
        path = write(tmp_path, TINY_OPT)
        cfg = load_config(path)
        echo = tmp_path / "echo.toml"
        echo.write_text(dump_config(cfg))
        cfg2 = load_config(echo)
        assert dump_config(cfg2) == dump_config(cfg)
        assert cfg2.bo.n_init == 4
        assert cfg2.toll_bounds == cfg.toll_bounds

    def test_mode_detection(self, tmp_path):
        assert load_config(write(tmp_path, TINY)).mode == "nte"
        assert load_config(write(tmp_path, TINY_TOLL)).mode == "toll"
        assert load_config(write(tmp_path, TINY_OPT)).mode == "optimize"


class TestRunners:
    def test_nte_outputs_and_reproducibility(self, tmp_path):
        cfg = load_config(write(tmp_path, TINY))
        out1, out2 = tmp_path / "a", tmp_path / "b"
        s1 = run_nte(cfg, out_dir=out1)
        s2 = run_nte(cfg, out_dir=out2)
        for name in ("config.echo", "population.csv", "days.csv", "summary.json",
                     "trajectory_day_0.csv"):
            assert (out1 / name).exists()
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
        assert s1 == s2
        assert "welfare" in s1 and "peak_accumulation" in s1

    def test_echo_rerun_is_identical(self, tmp_path):
        cfg = load_config(write(tmp_path, TINY))
        out1 = tmp_path / "a"
        run_nte(cfg, out_dir=out1)
        cfg2 = load_config(out1 / "config.echo")
        out2 = tmp_path / "b"
        run_nte(cfg2, out_dir=out2)
        assert (out1 / "days.csv").read_bytes() == (out2 / "days.csv").read_bytes()
        assert (out1 / "summary.json").read_bytes() == (out2 / "summary.json").read_bytes()

    def test_zero_toll_matches_nte_summary(self, tmp_path):
        base = load_config(write(tmp_path, TINY))
        zero = load_config(write(tmp_path, TINY + "\n[toll]\namplitude = [0.0]\nmean = [60.0]\nwidth = [20.0]\n", "z.toml"))
        s_nte = run_nte(base, out_dir=tmp_path / "nte")
        s_zero = run_fixed_toll(zero, out_dir=tmp_path / "zero")
        assert s_zero["welfare"] == pytest.approx(s_nte["welfare"], abs=1e-12)
        assert s_zero["revenue"] == 0.0
        assert s_zero["peak_accumulation"] == s_nte["peak_accumulation"]

    def test_fixed_toll_splits_surplus_and_revenue(self, tmp_path):
        cfg = load_config(write(tmp_path, TINY_TOLL))
        s = run_fixed_toll(cfg, out_dir=tmp_path / "toll")
        assert s["revenue"] > 0
        assert s["welfare"] == pytest.approx(s["consumer_surplus"] + s["revenue"], abs=1e-9)

    def test_wrong_mode_rejected(self, tmp_path):
        cfg = load_config(write(tmp_path, TINY_TOLL))
        with pytest.raises(ConfigurationError):
            run_nte(cfg)
        with pytest.raises(ConfigurationError):
            run_optimize(cfg)

    def test_optimize_writes_traces_and_aggregate(self, tmp_path):
        cfg = load_config(write(tmp_path, TINY_OPT.replace("replications = 1", "replications = 2")))
        out = tmp_path / "opt"
        s = run_optimize(cfg, out_dir=out)
        assert (out / "bo_trace_0.csv").exists()
        assert (out / "bo_trace_1.csv").exists()
        header = (out / "bo_trace_0.csv").read_text().splitlines()[0]
        assert header == "iteration,x0,x1,x2,objective,incumbent"
        assert s["n_replications"] == 2
        assert len(s["replications"]) == 2
        assert s["best_objective"] == max(r["best_objective"] for r in s["replications"])
        assert s["std"] >= 0
        saved = json.loads((out / "summary.json").read_text())
        assert saved["best_vector"] == s["best_vector"]

    def test_replication_seeds_shift(self, tmp_path):
        cfg = load_config(write(tmp_path, TINY.replace("replications = 1", "replications = 2")))
        out = tmp_path / "reps"
        s = run_nte(cfg, out_dir=out)
        assert (out / "days_0.csv").exists() and (out / "days_1.csv").exists()
        assert (out / "days_0.csv").read_bytes() != (out / "days_1.csv").read_bytes()
        assert "mean_welfare" in s and "std_welfare" in s


class TestCLI:
    def test_nte_subcommand(self, tmp_path, capsys):
        path = write(tmp_path, TINY)
        code = main(["nte", "--config", str(path), "--out", str(tmp_path / "out")])
        assert code == 0
        assert "welfare per capita" in capsys.readouterr().out

    def test_mode_mismatch_fails_loud(self, tmp_path, capsys):
        path = write(tmp_path, TINY_TOLL)
        code = main(["nte", "--config", str(path), "--out", str(tmp_path / "out")])
        assert code == 2
        assert "subcommand" in capsys.readouterr().err

    def test_seed_override_changes_results(self, tmp_path):
        path = write(tmp_path, TINY)
        main(["nte", "--config", str(path), "--out", str(tmp_path / "a"), "--seed", "9"])
        main(["nte", "--config", str(path), "--out", str(tmp_path / "b"), "--seed", "10"])
        assert (tmp_path / "a/days.csv").read_bytes() != (tmp_path / "b/days.csv").read_bytes()

    def test_optimize_subcommand(self, tmp_path, capsys):
        path = write(tmp_path, TINY_OPT)
        code = main(["optimize", "--config", str(path), "--out", str(tmp_path / "out")])
        assert code == 0
        out = capsys.readouterr().out
        assert "best objective" in out

    def test_jobs_flag_parallel_replications(self, tmp_path):
        path = write(tmp_path, TINY.replace("replications = 1", "replications = 2"))
        code = main(["nte", "--config", str(path), "--out", str(tmp_path / "par"), "--jobs", "2"])
        assert code == 0
        serial = tmp_path / "ser"
        main(["nte", "--config", str(path), "--out", str(serial)])
        assert (tmp_path / "par/days_0.csv").read_bytes() == (serial / "days_0.csv").read_bytes()
        assert (tmp_path / "par/days_1.csv").read_bytes() == (serial / "days_1.csv").read_bytes()

    def test_missing_config_file(self, tmp_path, capsys):
        code = main(["nte", "--config", str(tmp_path / "nope.toml")])
        assert code == 3
