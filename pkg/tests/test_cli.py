from dataclasses import replace

import pytest
from click.testing import CliRunner

from platonav import cli
from platonav.errors import OptimizationFailed
from platonav.eval.config import dump_config
from platonav.eval.experiment import METRICS_FILE, snapshot_path


@pytest.fixture
def config_file(tiny_config, tmp_path):
    path = tmp_path / "tiny.pbtxt"
    path.write_text(dump_config(replace(tiny_config, iterations=1)))
    return path


def test_run_writes_metrics(config_file, tmp_path):
    out = tmp_path / "run"
    result = CliRunner().invoke(cli.main, ["run", "--config", str(config_file), "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert (out / METRICS_FILE).exists()
    assert "Metrics written" in result.output


def test_run_several_seeds_uses_subdirectories(config_file, tmp_path):
    out = tmp_path / "seeds"
    result = CliRunner().invoke(cli.main, ["run", "--config", str(config_file), "--out", str(out),
                                           "--seed", "1", "--seed", "2"])
    assert result.exit_code == 0, result.output
    assert (out / "seed_1" / METRICS_FILE).exists()
    assert (out / "seed_2" / METRICS_FILE).exists()


def test_unknown_key_exits_with_config_error(tmp_path):
    path = tmp_path / "bad.pbtxt"
    path.write_text('method: "plato"\nbogus: 1\n')
    result = CliRunner().invoke(cli.main, ["run", "--config", str(path), "--out", str(tmp_path / "x")])
    assert result.exit_code == 2


def test_bad_lambda_list_exits_with_config_error(config_file, tmp_path):
    result = CliRunner().invoke(cli.main, ["sweep", "--config", str(config_file), "--lambda", "0,abc",
                                           "--out", str(tmp_path / "sweep")])
    assert result.exit_code == 2


def test_numerical_failure_exits_with_three(config_file, tmp_path, monkeypatch):
    def failing_run(*args, **kwargs):
        raise OptimizationFailed("Q_uu indefinite")

    monkeypatch.setattr(cli, "run_experiment", failing_run)
    result = CliRunner().invoke(cli.main, ["run", "--config", str(config_file), "--out", str(tmp_path / "x")])
    assert result.exit_code == 3


@pytest.mark.parametrize("option", ["--episodes", "--max-steps"])
def test_eval_rejects_a_zero_count(config_file, option):
    result = CliRunner().invoke(cli.main, ["eval", "--policy", str(config_file),
                                           "--config", str(config_file), option, "0"])
    assert result.exit_code == 2
    assert option in result.output


def test_eval_and_summary(config_file, tmp_path):
    out = tmp_path / "run"
    runner = CliRunner()
    assert runner.invoke(cli.main, ["run", "--config", str(config_file), "--out", str(out)]).exit_code == 0
    evaluated = runner.invoke(cli.main, ["eval", "--policy", str(snapshot_path(out, 1)),
                                         "--config", str(config_file), "--episodes", "2", "--max-steps", "5"])
    assert evaluated.exit_code == 0, evaluated.output
    assert "MTTF" in evaluated.output
    summary = runner.invoke(cli.main, ["summary", str(out / METRICS_FILE)])
    assert summary.exit_code == 0, summary.output
    assert "mttf" in summary.output


def test_sweep_prints_a_table(config_file, tmp_path):
    result = CliRunner().invoke(cli.main, ["sweep", "--config", str(config_file), "--lambda", "0,10",
                                           "--out", str(tmp_path / "sweep")])
    assert result.exit_code == 0, result.output
    assert "lambda" in result.output
    assert (tmp_path / "sweep" / "lambda_10" / METRICS_FILE).exists()


def test_export_world(tmp_path):
    path = tmp_path / "forest.pbtxt"
    path.write_text('world { generator: "forest" }\n')
    result = CliRunner().invoke(cli.main, ["export-world", "--config", str(path)])
    assert result.exit_code == 0, result.output
    assert result.output.startswith("# variant forest")
    assert "circle" in result.output
