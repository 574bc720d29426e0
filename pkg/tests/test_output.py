from platonav.eval.metrics import CSV_COLUMNS, MetricsRecord, parse_metrics_csv
from platonav.output.base import MemoryMetricsChannel
from platonav.output.console import ConsoleMetricsChannel
from platonav.output.csv_output import CsvMetricsChannel


def record(iteration):
    return MetricsRecord(iteration=iteration, training_crashes=2, laps=0, planner_faults=1, learner_actions=0,
                         dataset_size=400 * iteration, training_loss=0.25, mean_kl=float("nan"),
                         kl_exceedance_fraction=float("nan"), mean_teacher_cost=12.5,
                         mean_normalized_cost=0.01, mttf=7.5, eval_crash_rate=0.3, wall_clock=99.0)


def test_csv_channel_writes_header_and_rows(tmp_path):
    channel = CsvMetricsChannel(tmp_path / "out" / "metrics.csv", CSV_COLUMNS)
    channel.publish(record(1))
    channel.publish(record(2))
    channel.close()
    text = (tmp_path / "out" / "metrics.csv").read_text()
    assert "99" not in text
    rows = parse_metrics_csv(text)
    assert [r["dataset_size"] for r in rows] == [400.0, 800.0]
    assert rows[0]["mttf"] == 7.5


def test_memory_channel_collects_columns():
    channel = MemoryMetricsChannel()
    channel.publish(record(1))
    channel.publish(record(2))
    assert channel.column("iteration") == [1, 2]


def test_console_channel_prints_a_block(capsys):
    ConsoleMetricsChannel(label="seed 3").publish(record(4))
    out = capsys.readouterr().out
    assert "ITERATION 4 (seed 3)" in out
    assert "MTTF: 7.50 s" in out
