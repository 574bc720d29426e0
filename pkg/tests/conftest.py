import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "src"))

from platonav.env.sensors.base import SensorConfig  # noqa: E402
from platonav.env.worlds import WorldConfig  # noqa: E402
from platonav.eval.config import EvaluationConfig, ExperimentConfig  # noqa: E402
from platonav.policy.network import PolicyConfig  # noqa: E402
from platonav.policy.training import TrainingConfig  # noqa: E402
from platonav.trajopt.ilqg import MpcConfig  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_config():
    """A few short iterations in an empty world with a small network"""
    return ExperimentConfig(
        method="plato",
        seed=7,
        iterations=2,
        steps_per_iteration=12,
        sensor=SensorConfig(beam_count=5),
        world=WorldConfig(generator="empty"),
        mpc=MpcConfig(horizon=6, max_iterations=4, kl_weight=1.0),
        policy=PolicyConfig(hidden_sizes=(8,)),
        training=TrainingConfig(epochs=3, batch_size=16),
        evaluation=EvaluationConfig(episodes=2, max_steps=10),
    )
