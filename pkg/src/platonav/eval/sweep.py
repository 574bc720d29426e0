"""KL-weight sweeps: one experiment per λ, summarized in sweep_summary.csv."""

import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import ContractViolation
from ..output.base import MemoryMetricsChannel
from .experiment import run_experiment

logger = logging.getLogger("PlatoNav.eval")

SUMMARY_FILE = "sweep_summary.csv"
SUMMARY_COLUMNS = ("kl_weight", "mean_teacher_cost", "training_crashes", "final_mttf", "mean_kl")


@dataclass(frozen=True)
class SweepPoint:
    kl_weight: float
    mean_teacher_cost: float
    training_crashes: int
    final_mttf: float
    mean_kl: float

    def row(self):
        return [format(self.kl_weight, ".12g"), format(self.mean_teacher_cost, ".12g"),
                str(self.training_crashes), format(self.final_mttf, ".12g"), format(self.mean_kl, ".12g")]


def _nanmean(values):
    values = np.array(values, dtype=float)
    values = values[np.isfinite(values)]
    return float(values.mean()) if values.size else float("nan")


def _run_point(args):
    config, kl_weight, out_dir = args
    channel = MemoryMetricsChannel()
    run_experiment(config.with_kl_weight(kl_weight), out_dir, channels=[channel])
    return SweepPoint(
        kl_weight=float(kl_weight),
        mean_teacher_cost=_nanmean(channel.column("mean_teacher_cost")),
        training_crashes=int(sum(channel.column("training_crashes"))),
        final_mttf=channel.records[-1].mttf if channel.records else float("nan"),
        mean_kl=_nanmean(channel.column("mean_kl")),
    )


def point_directory(out_dir, kl_weight):
    return Path(out_dir) / f"lambda_{format(float(kl_weight), 'g')}"


def lambda_sweep(base_config, kl_weights, out_dir, workers=1):
    """
    Run base_config once per KL weight with the shared master seed.

    Args:
        base_config: ExperimentConfig
        kl_weights: Nonempty list of λ values
        out_dir: Parent directory; each λ gets lambda_<value>/
        workers: Parallel processes (1 runs in-process)

    Returns:
        List of SweepPoint in the order of kl_weights
    """
    kl_weights = list(kl_weights)
    if not kl_weights:
        raise ContractViolation("need at least one KL weight")
    out_dir = Path(out_dir)
    jobs = [(base_config, w, point_directory(out_dir, w)) for w in kl_weights]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_run_point, jobs))
    else:
        points = [_run_point(job) for job in jobs]

    out_dir.mkdir(parents=True, exist_ok=True)
    with (out_dir / SUMMARY_FILE).open("w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        for point in points:
            writer.writerow(point.row())
    logger.info(f"Sweep over {len(points)} KL weights written to {out_dir / SUMMARY_FILE}")
    return points
