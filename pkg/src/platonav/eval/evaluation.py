import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..env.obstacles import crash_check
from ..env.sensors.factory import observe
from ..env.vehicle import step
from ..env.worlds import build_field, respawn
from ..errors import ContractViolation, SimulationDiverged
from ..learners.commands import VelocityCommander

logger = logging.getLogger("PlatoNav.eval")


@dataclass(frozen=True)
class EvaluationResult:
    """
    Args:
        mttf: Mean survival time in seconds
        survival_times: Per-episode survival in seconds
        crashes: Episodes that ended in a collision
    """
    mttf: float
    survival_times: Tuple[float, ...]
    crashes: int

    @property
    def crash_rate(self):
        return self.crashes / len(self.survival_times)


def mean_time_to_failure(survival_times):
    return float(np.mean(survival_times))


def evaluate_policy(policy, config, episodes, max_steps, rng, generator=None):
    """
    Fly the learner alone (mean action, no teacher) on freshly seeded fields.

    Each episode draws a new field seed from rng and respawns in it. An
    episode ends at a crash, when a canyon run leaves the corridor (counted as
    surviving the full length), or after max_steps.

    Args:
        policy: GaussianMlpPolicy
        config: ExperimentConfig supplying vehicle, sensor, cost, world and commands
        episodes: Number of episodes, at least 1
        max_steps: Step cap per episode
        rng: numpy Generator owned by the caller
        generator: World generator name; the config's default generator when omitted

    Returns:
        EvaluationResult
    """
    if episodes < 1:
        raise ContractViolation("need at least one evaluation episode")
    generator = generator or config.world.generator
    dt = config.vehicle.dt
    clearance = 2.0 * config.cost.d_safe
    survival, crashes = [], 0

    for episode in range(episodes):
        field = build_field(config.world, generator, int(rng.integers(2 ** 31)), config.vehicle.radius)
        vehicle = respawn(field, rng, clearance)
        commander = VelocityCommander(config.commands, rng) if config.commands.enabled else None
        steps, crashed = max_steps, False
        for t in range(max_steps):
            command = commander.update(vehicle) if commander is not None else None
            observation = observe(field, vehicle, config.sensor, rng, command)
            u = policy.mean(observation)
            try:
                vehicle = step(vehicle, u, dt, config.vehicle.control_noise, rng, config.vehicle)
            except SimulationDiverged:
                steps, crashed = t + 1, True
                break
            if crash_check(field, vehicle, config.vehicle.radius):
                steps, crashed = t + 1, True
                break
            if field.out_of_course(vehicle.position):
                break
        survival.append(steps * dt)
        crashes += int(crashed)
        logger.debug(f"Evaluation episode {episode}: survived {steps * dt:.2f}s")
    return EvaluationResult(mttf=mean_time_to_failure(survival), survival_times=tuple(survival),
                            crashes=crashes)
