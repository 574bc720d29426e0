"""
Experiment system: runs a training method, evaluates every iteration's
policy, writes snapshots and fans metrics records out to output channels.
"""

import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import List

import numpy as np

from ..learners.methods import run_training
from ..learners.run_state import derived_seed
from ..output.base import MetricsChannel
from ..output.csv_output import CsvMetricsChannel
from ..policy.snapshot import save_policy
from .config import dump_config
from .evaluation import evaluate_policy
from .metrics import CSV_COLUMNS, MetricsRecord

logger = logging.getLogger("PlatoNav.eval")

EVAL_SEED_TAG = 2
METRICS_FILE = "metrics.csv"
CONFIG_FILE = "config.pbtxt"
SNAPSHOT_DIR = "snapshots"


def snapshot_path(out_dir, iteration):
    return Path(out_dir) / SNAPSHOT_DIR / f"policy_iter_{iteration:03d}.pbtxt"


@dataclass
class ExperimentResult:
    state: object
    records: List[MetricsRecord]
    metrics_path: Path


class ExperimentRunner:
    """
    Runs one configured experiment into an output directory.

    Args:
        config: ExperimentConfig
        out_dir: Directory for metrics.csv, config.pbtxt and snapshots/
        channels: Extra MetricsChannel instances to publish records to
    """

    def __init__(self, config, out_dir, channels=None):
        self.config = config
        self.out_dir = Path(out_dir)
        self.output_channels = []
        self.records = []
        for channel in channels or ():
            self._register_output_channel(channel)

    def _register_output_channel(self, channel):
        if isinstance(channel, MetricsChannel):
            self.output_channels.append(channel)
            logger.debug(f"Registered output channel: {channel.__class__.__name__}")
            return True
        logger.warning(f"Invalid output channel: {type(channel).__name__}")
        return False

    def run(self):
        self.out_dir.mkdir(parents=True, exist_ok=True)
        (self.out_dir / CONFIG_FILE).write_text(dump_config(self.config))
        metrics_path = self.out_dir / METRICS_FILE
        csv_channel = CsvMetricsChannel(metrics_path, CSV_COLUMNS)
        self.output_channels.insert(0, csv_channel)
        self._started = time.perf_counter()
        logger.info(f"Starting {self.config.method} run (seed {self.config.seed}) into {self.out_dir}")
        try:
            state = run_training(self.config, self.config.method, callbacks=[self._on_iteration])
            if self.config.iterations == 0:
                save_policy(state.policy, snapshot_path(self.out_dir, 0))
        finally:
            for channel in self.output_channels:
                channel.close()
        return ExperimentResult(state=state, records=self.records, metrics_path=metrics_path)

    def _on_iteration(self, state, summary):
        i = summary.iteration
        path = save_policy(state.policy, snapshot_path(self.out_dir, i))
        rng = np.random.default_rng(derived_seed(self.config.seed, EVAL_SEED_TAG, i))
        generator = self.config.world.generator_for_iteration(i)
        evaluation = evaluate_policy(state.policy, self.config, self.config.evaluation.episodes,
                                     self.config.evaluation.max_steps, rng, generator)
        record = MetricsRecord(
            iteration=i,
            training_crashes=summary.training_crashes,
            laps=summary.laps,
            planner_faults=summary.planner_faults,
            learner_actions=summary.learner_actions,
            dataset_size=summary.dataset_size,
            training_loss=summary.training_loss,
            mean_kl=summary.mean_kl,
            kl_exceedance_fraction=summary.kl_exceedance_fraction,
            mean_teacher_cost=summary.mean_teacher_cost,
            mean_normalized_cost=summary.mean_normalized_cost,
            mttf=evaluation.mttf,
            eval_crash_rate=evaluation.crash_rate,
            wall_clock=time.perf_counter() - self._started,
            snapshot=str(path),
        )
        logger.info(f"Iteration {i}: MTTF {record.mttf:.2f}s, eval crash rate {record.eval_crash_rate:.0%}")
        self.records.append(record)
        for channel in self.output_channels:
            try:
                channel.publish(record)
            except OSError as e:
                logger.error(f"Error publishing to {channel.__class__.__name__}: {e}")


def run_experiment(config, out_dir, channels=None):
    """
    Train, evaluate each iteration and write metrics.csv plus snapshots.

    Returns:
        ExperimentResult
    """
    return ExperimentRunner(config, out_dir, channels).run()
