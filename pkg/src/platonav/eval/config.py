"""
Experiment configuration and its text file format.

Example file:

    method: "plato"
    seed: 3
    iterations: 15
    mpc { kl_weight: 1 }
    world {
      generator: "forest"
      forest { extent: 20 avg_spacing: 6.5 }
    }
"""

from dataclasses import dataclass, replace
from pathlib import Path

from ..env.cost import TaskCost
from ..env.sensors.base import SensorConfig
from ..env.vehicle import VehicleConfig
from ..env.worlds import WorldConfig
from ..errors import ConfigError
from ..learners.commands import CommandConfig
from ..learners.methods import METHODS
from ..learners.schedule import SCHEDULE_VARIANTS
from ..output.text_format import DataclassDocument
from ..policy.network import PolicyConfig
from ..policy.training import TrainingConfig
from ..trajopt.ilqg import MpcConfig


@dataclass(frozen=True)
class EvaluationConfig:
    """
    Args:
        episodes: Evaluation flights per checkpoint
        max_steps: Step cap per flight
    """
    episodes: int = 10
    max_steps: int = 600

    def __post_init__(self):
        if self.episodes < 1 or self.max_steps < 1:
            raise ConfigError("episodes and max_steps must be at least 1", field="evaluation")


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Everything one run needs.

    Args:
        method: "plato", "dagger", "coaching" or "supervised"
        schedule: β schedule variant for dagger and coaching
        seed: Master seed
        iterations: N
        steps_per_iteration: T
        kl_bound: ε_λθ against which realized per-step KL is monitored
        vehicle: VehicleConfig
        sensor: SensorConfig
        cost: TaskCost
        world: WorldConfig
        mpc: MpcConfig (kl_weight is λ)
        policy: PolicyConfig
        training: TrainingConfig
        commands: CommandConfig
        evaluation: EvaluationConfig
    """
    method: str = "plato"
    schedule: str = "linear-full"
    seed: int = 0
    iterations: int = 15
    steps_per_iteration: int = 400
    kl_bound: float = 1.0
    vehicle: VehicleConfig = VehicleConfig()
    sensor: SensorConfig = SensorConfig()
    cost: TaskCost = TaskCost()
    world: WorldConfig = WorldConfig()
    mpc: MpcConfig = MpcConfig(kl_weight=1.0)
    policy: PolicyConfig = PolicyConfig()
    training: TrainingConfig = TrainingConfig()
    commands: CommandConfig = CommandConfig()
    evaluation: EvaluationConfig = EvaluationConfig()

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"unknown method '{self.method}'", field="method")
        if self.schedule not in SCHEDULE_VARIANTS:
            raise ConfigError(f"unknown schedule '{self.schedule}'", field="schedule")
        if self.iterations < 0:
            raise ConfigError("iterations must be nonnegative", field="iterations")
        if self.steps_per_iteration < 1:
            raise ConfigError("steps_per_iteration must be at least 1", field="steps_per_iteration")
        if self.kl_bound <= 0.0:
            raise ConfigError("kl_bound must be positive", field="kl_bound")

    def with_kl_weight(self, kl_weight):
        return replace(self, mpc=replace(self.mpc, kl_weight=float(kl_weight)))


_DOCUMENT = DataclassDocument(ExperimentConfig)


def dump_config(config):
    """Text form of a config; loading it gives back an equal config"""
    return _DOCUMENT.dumps(config)


def parse_config(text):
    return _DOCUMENT.loads(text)


def load_config(path):
    """
    Read an experiment config file.

    Raises:
        ConfigError: unreadable file, unknown key, bad value (with line/field)
    """
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    return parse_config(text)
