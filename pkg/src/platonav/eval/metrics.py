from dataclasses import dataclass

CSV_COLUMNS = (
    "iteration", "training_crashes", "laps", "planner_faults", "learner_actions",
    "dataset_size", "training_loss", "mean_kl", "kl_exceedance_fraction",
    "mean_teacher_cost", "mean_normalized_cost", "mttf", "eval_crash_rate",
)


@dataclass(frozen=True)
class MetricsRecord:
    """
    One row of the metrics file. wall_clock is kept for logs only and is not
    part of the CSV, so reruns produce identical files.
    """
    iteration: int
    training_crashes: int
    laps: int
    planner_faults: int
    learner_actions: int
    dataset_size: int
    training_loss: float
    mean_kl: float
    kl_exceedance_fraction: float
    mean_teacher_cost: float
    mean_normalized_cost: float
    mttf: float
    eval_crash_rate: float
    wall_clock: float = 0.0
    snapshot: str = ""

    def row(self):
        """CSV cells in CSV_COLUMNS order"""
        return [_cell(getattr(self, name)) for name in CSV_COLUMNS]


def _cell(value):
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".12g")


def parse_metrics_csv(text):
    """Rows of a metrics CSV as dicts of floats keyed by column"""
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        return []
    header = lines[0].split(",")
    return [dict(zip(header, (float(v) for v in line.split(",")))) for line in lines[1:]]
