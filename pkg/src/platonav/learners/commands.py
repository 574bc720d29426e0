import logging
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError

logger = logging.getLogger("PlatoNav.learners")


@dataclass(frozen=True)
class CommandConfig:
    """
    Velocity-command conditioning.

    Args:
        enabled: Append commands to observations and track them in the cost
        forward_min: Lower bound of the forward (+x) command in m/s
        forward_max: Upper bound of the forward command in m/s
        lateral_max: Bound on the sideways (±y) command in m/s
        tolerance: Speed error below which the command counts as reached
    """
    enabled: bool = False
    forward_min: float = 1.0
    forward_max: float = 2.5
    lateral_max: float = 1.0
    tolerance: float = 0.1

    def __post_init__(self):
        if not 0.0 < self.forward_min <= self.forward_max:
            raise ConfigError("need 0 < forward_min <= forward_max", field="commands.forward_min")
        if self.lateral_max < 0.0 or self.tolerance <= 0.0:
            raise ConfigError("lateral_max must be >= 0 and tolerance > 0", field="commands.tolerance")


class VelocityCommander:
    """
    Samples velocity commands uniformly and draws a new one whenever the
    vehicle is within tolerance of the current command

    Args:
        config: CommandConfig
        rng: numpy Generator reserved for commands
    """

    def __init__(self, config, rng):
        self.config = config
        self.rng = rng
        self.command = self._sample()
        self.reached = 0

    def _sample(self):
        c = self.config
        return np.array([
            self.rng.uniform(c.forward_min, c.forward_max),
            self.rng.uniform(-c.lateral_max, c.lateral_max),
        ])

    def update(self, state):
        """Current command after checking whether state reached the previous one"""
        error = np.asarray(state.linear_velocity, dtype=float) - self.command
        if np.linalg.norm(error) < self.config.tolerance:
            self.reached += 1
            self.command = self._sample()
            logger.debug(f"Command reached, next command {self.command.tolist()}")
        return self.command.copy()
