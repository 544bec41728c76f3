import filecmp
import json
import os

import numpy as np
import pytest

from neuropop import cli, trainer
from neuropop.config import ExperimentConfig
from neuropop.errors import ConfigurationError


def parse_run(argv):
    return cli.build_parser().parse_args(["run"] + argv)


class TestParseCli:
    def test_flag_overrides(self):
        args = parse_run(["--layers", "2", "--scheme", "all", "--seed", "42",
                          "--out", "x"])
        cfg = cli.resolve_config(args)
        assert cfg.num_layers == 2
        assert cfg.scheme == "all"
        assert cfg.base_seed == 42
        assert cfg.layer_width == ExperimentConfig().layer_width

    def test_bad_scheme_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            parse_run(["--scheme", "bogus", "--out", "x"])
        assert excinfo.value.code == 2
        assert "scheme" in capsys.readouterr().err

    def test_non_numeric_count_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            parse_run(["--layers", "two", "--out", "x"])
        assert excinfo.value.code == 2
        assert "layers" in capsys.readouterr().err

    def test_missing_out_is_usage_error(self):
        with pytest.raises(SystemExit) as excinfo:
            parse_run(["--layers", "2"])
        assert excinfo.value.code == 2

    def test_defaults_without_flags_or_file(self):
        cfg = cli.resolve_config(parse_run(["--out", "x"]))
        assert cfg == ExperimentConfig()

    def test_file_then_flag_precedence(self, tmp_path):
        path = tmp_path / "cfg.json"
        file_cfg = ExperimentConfig(num_layers=5, layer_width=3)
        file_cfg.save(path)
        args = parse_run(["--config", str(path), "--layers", "2", "--out", "x"])
        cfg = cli.resolve_config(args)
        assert cfg.num_layers == 2      # flag beats file
        assert cfg.layer_width == 3     # file beats default


class TestConfigFile:
    def test_round_trip_random_configs(self, tmp_path):
        rng = np.random.Generator(np.random.PCG64(0))
        for i in range(100):
            cfg = ExperimentConfig(
                num_layers=int(rng.integers(1, 6)),
                layer_width=int(rng.integers(1, 30)),
                step_size=float(rng.uniform(1e-4, 0.5)),
                discount=float(rng.uniform(0, 1)),
                scheme=["task", "all", "bio-then-all"][int(rng.integers(3))],
                w_activity=float(rng.uniform(0, 2)),
                base_seed=int(rng.integers(1 << 31)),
            )
            path = tmp_path / f"c{i}.json"
            cfg.save(path)
            assert ExperimentConfig.load(path) == cfg

    def test_save_then_load_then_save_is_stable(self, tmp_path):
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        cfg = ExperimentConfig(step_size=0.037)
        cfg.save(p1)
        ExperimentConfig.load(p1).save(p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "c.json"
        data = ExperimentConfig().to_dict()
        data["lerning_rate"] = 0.1
        path.write_text(json.dumps(data))
        with pytest.raises(ConfigurationError, match="lerning_rate"):
            ExperimentConfig.load(path)

    def test_all_defaults_explicit_in_file(self, tmp_path):
        path = tmp_path / "c.json"
        ExperimentConfig().save(path)
        saved = json.loads(path.read_text())
        assert set(saved) == set(ExperimentConfig().to_dict())


def tiny_experiment(tmp_path, name, **kw):
    cfg = ExperimentConfig(num_layers=1, layer_width=3, hidden_dim=4,
                           max_episodes=20, num_runs=2, window=5,
                           solve_threshold=450.0, **kw)
    summary = trainer.run_experiment(cfg)
    out = tmp_path / name
    cli.write_results(str(out), summary)
    return out, summary


class TestWriteResults:
    def test_row_counts(self, tmp_path):
        out, summary = tiny_experiment(tmp_path, "a")
        lines = (out / "episodes.csv").read_text().strip().split("\n")
        expected = sum(len(r.returns) for r in summary.results)
        assert len(lines) == expected + 1
        assert lines[0] == "run,episode,steps,task_return,mean_last_window"

    def test_archive_complete(self, tmp_path):
        out, _ = tiny_experiment(tmp_path, "a")
        for name in ("config.json", "episodes.csv", "summary.csv"):
            assert (out / name).exists()

    def test_config_echo_reproduces_config(self, tmp_path):
        out, summary = tiny_experiment(tmp_path, "a")
        assert ExperimentConfig.load(out / "config.json") == summary.config

    def test_rerun_is_byte_identical(self, tmp_path):
        out_a, _ = tiny_experiment(tmp_path, "a", base_seed=9)
        out_b, _ = tiny_experiment(tmp_path, "b", base_seed=9)
        for name in ("config.json", "episodes.csv", "summary.csv"):
            assert filecmp.cmp(out_a / name, out_b / name, shallow=False)

    def test_summary_schema(self, tmp_path):
        out, summary = tiny_experiment(tmp_path, "a")
        row = cli.read_summary(str(out))
        assert row["scheme"] == summary.config.scheme
        assert int(row["layers"]) == summary.config.num_layers
        assert int(row["solved"]) == summary.solved_count
        assert float(row["mean_episodes_to_solve"]) == summary.mean_episodes_to_solve


class TestEmitTable:
    def test_single_cell(self):
        text = cli.format_table([{"scheme": "all", "layers": "1",
                                  "mean_episodes_to_solve": "1480.0"}])
        assert "1,480" in text
        assert text.count("—") == 2  # other schemes missing for 1 layer

    def test_empty_grid(self):
        text = cli.format_table([])
        assert "—" in text

    def test_full_grid_layout(self):
        rows = []
        for scheme in ("all", "bio-then-all", "task"):
            for layers, mean in (("1", "100.0"), ("2", "200.0")):
                rows.append({"scheme": scheme, "layers": layers,
                             "mean_episodes_to_solve": mean})
        lines = cli.format_table(rows).split("\n")
        assert len(lines) == 4
        assert lines[1].startswith("All")
        assert lines[2].startswith("Bio->All")
        assert lines[3].startswith("Task")
        assert "—" not in "".join(lines)


class TestMain:
    def test_end_to_end_run_and_table(self, tmp_path, capsys):
        out = tmp_path / "arch"
        code = cli.main(["run", "--out", str(out), "--layers", "1",
                         "--width", "3", "--hidden-dim", "4",
                         "--episodes", "10", "--runs", "1", "--window", "5",
                         "--threshold", "450", "--quiet"])
        assert code == 0
        assert (out / "summary.csv").exists()
        code = cli.main(["table", str(out)])
        assert code == 0
        assert "All" in capsys.readouterr().out

    def test_missing_archive_is_runtime_error(self, tmp_path, capsys):
        code = cli.main(["table", str(tmp_path / "nope")])
        assert code == 1
