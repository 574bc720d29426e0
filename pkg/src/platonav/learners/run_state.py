"""
State of one training run: policy, aggregated data, per-step provenance and
per-iteration summaries.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

logger = logging.getLogger("PlatoNav.learners")

STREAM_NAMES = ("init", "mixing", "action", "dynamics", "observation", "respawn", "label", "training", "commands")


class ActionSource(Enum):
    TEACHER = "teacher"
    SUPERVISOR = "supervisor"
    LEARNER = "learner"
    FALLBACK = "fallback"


@dataclass(frozen=True)
class ProvenanceEntry:
    """Who produced the executed action and the label of one step"""
    iteration: int
    step: int
    executed: ActionSource
    label: Optional[ActionSource]
    learner_queries: int


class RunStreams:
    """
    Independent random streams of a run, spawned from one master seed.

    Each concern owns a stream, so switching methods changes only what a
    stream's draws are used for, never how many are drawn.
    """

    def __init__(self, seed):
        children = np.random.SeedSequence(seed).spawn(len(STREAM_NAMES))
        for name, child in zip(STREAM_NAMES, children):
            setattr(self, name, np.random.default_rng(child))


def derived_seed(*keys):
    """Deterministic 31-bit seed from integer keys"""
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1)[0] >> 1)


@dataclass
class IterationStats:
    """Counters filled while an iteration's steps run"""
    training_crashes: int = 0
    laps: int = 0
    planner_faults: int = 0
    learner_actions: int = 0
    learner_queries: int = 0
    steps: int = 0
    kl_samples: List[float] = field(default_factory=list)
    teacher_costs: List[float] = field(default_factory=list)
    normalized_costs: List[float] = field(default_factory=list)


@dataclass(frozen=True)
class IterationSummary:
    """Per-iteration training metrics"""
    iteration: int
    training_crashes: int
    laps: int
    planner_faults: int
    learner_actions: int
    learner_queries: int
    dataset_size: int
    training_loss: float
    mean_kl: float
    kl_exceedance_fraction: float
    mean_teacher_cost: float
    mean_normalized_cost: float
    kl_samples: Tuple[float, ...] = ()


def _mean(values):
    return float(np.mean(values)) if values else float("nan")


def summarize(iteration, stats, dataset_size, training_loss, kl_bound):
    kl = np.array(stats.kl_samples, dtype=float)
    exceedance = float(np.mean(kl > kl_bound)) if kl.size else float("nan")
    return IterationSummary(
        iteration=iteration,
        training_crashes=stats.training_crashes,
        laps=stats.laps,
        planner_faults=stats.planner_faults,
        learner_actions=stats.learner_actions,
        learner_queries=stats.learner_queries,
        dataset_size=dataset_size,
        training_loss=training_loss,
        mean_kl=_mean(stats.kl_samples),
        kl_exceedance_fraction=exceedance,
        mean_teacher_cost=_mean(stats.teacher_costs),
        mean_normalized_cost=_mean(stats.normalized_costs),
        kl_samples=tuple(stats.kl_samples),
    )


class TrainingRunState:
    """
    Mutable state of a training run.

    Args:
        policy: Current learner
        dataset: DemoDataset shared by all iterations
        streams: RunStreams of the run
    """

    def __init__(self, policy, dataset, streams):
        self.iteration = 0
        self.policy = policy
        self.dataset = dataset
        self.streams = streams
        self.provenance = []
        self.history = []
        self.policies = [policy.copy()]
        self.iteration_callbacks = []

    def register_iteration_callback(self, callback):
        """
        Register a consumer of finished iterations

        Args:
            callback: Callable (state, summary), invoked after each iteration's training
        """
        if callable(callback):
            self.iteration_callbacks.append(callback)
            return True
        return False

    def record_step(self, step, executed, label, learner_queries):
        self.provenance.append(ProvenanceEntry(self.iteration, step, executed, label, learner_queries))

    def finish_iteration(self, summary):
        self.history.append(summary)
        self.policies.append(self.policy.copy())
        logger.info(
            f"Iteration {summary.iteration}: crashes={summary.training_crashes} laps={summary.laps} "
            f"faults={summary.planner_faults} data={summary.dataset_size} loss={summary.training_loss:.4g}"
        )
        for callback in self.iteration_callbacks:
            callback(self, summary)

    def executed_by(self, source):
        """Number of executed actions that came from source"""
        return sum(1 for entry in self.provenance if entry.executed is source)

    def labelled_by(self, source):
        return sum(1 for entry in self.provenance if entry.label is source)
