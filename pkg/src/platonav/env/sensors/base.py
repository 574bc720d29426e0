"""
Observation record and the sensor configuration shared by all observation sources.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ...errors import ConfigError
from ..vehicle import wrap_angle

OBSERVATION_MODES = ("laser", "full-state", "state-distance-map")


@dataclass(frozen=True)
class SensorConfig:
    """
    Observation settings.

    Args:
        mode: "laser", "full-state" or "state-distance-map"
        beam_count: Laser beams in the fan
        fan_angle: Total fan width in radians
        max_range: Laser range in meters
        laser_noise_fraction: Range noise std as a fraction of max_range
        state_noise: Std of the noise on velocity, heading and position channels
        map_cells: Side of the body-frame distance grid (state-distance-map mode)
        map_resolution: Grid spacing in meters
    """
    mode: str = "laser"
    beam_count: int = 15
    fan_angle: float = math.pi
    max_range: float = 10.0
    laser_noise_fraction: float = 0.01
    state_noise: float = 0.01
    map_cells: int = 5
    map_resolution: float = 1.0

    def __post_init__(self):
        if self.mode not in OBSERVATION_MODES:
            raise ConfigError(f"unknown observation mode '{self.mode}'", field="sensor.mode")
        if self.beam_count < 1:
            raise ConfigError("beam_count must be at least 1", field="sensor.beam_count")
        if self.max_range <= 0.0 or self.fan_angle <= 0.0:
            raise ConfigError("max_range and fan_angle must be positive", field="sensor.max_range")
        if self.laser_noise_fraction < 0.0 or self.state_noise < 0.0:
            raise ConfigError("noise scales must be nonnegative", field="sensor.state_noise")
        if self.map_cells < 1 or self.map_resolution <= 0.0:
            raise ConfigError("map_cells and map_resolution must be positive", field="sensor.map_cells")


@dataclass(frozen=True)
class Observation:
    """
    What the learner sees at one step.

    Channels that a mode does not produce are empty arrays or None.
    as_vector concatenates the present channels in a fixed order:
    laser ranges, position, heading, linear velocity, angular velocity,
    distance map, commanded velocity.
    """
    laser_ranges: np.ndarray
    linear_velocity: np.ndarray
    angular_velocity: float
    heading: float
    commanded_velocity: Optional[np.ndarray] = None
    position: Optional[np.ndarray] = None
    distance_map: Optional[np.ndarray] = None

    def as_vector(self):
        parts = [np.asarray(self.laser_ranges, dtype=float).reshape(-1)]
        if self.position is not None:
            parts.append(np.asarray(self.position, dtype=float))
        parts.append(np.array([self.heading], dtype=float))
        parts.append(np.asarray(self.linear_velocity, dtype=float))
        parts.append(np.array([self.angular_velocity], dtype=float))
        if self.distance_map is not None:
            parts.append(np.asarray(self.distance_map, dtype=float).reshape(-1))
        if self.commanded_velocity is not None:
            parts.append(np.asarray(self.commanded_velocity, dtype=float))
        return np.concatenate(parts)

    @property
    def dimension(self):
        return self.as_vector().shape[0]


class ObservationSource:
    """Base class for observation sources"""

    def __init__(self, config):
        self.config = config

    def observe(self, field, state, rng=None):
        """
        Build an Observation of state in field
        Must be implemented by subclasses
        """
        raise NotImplementedError("Subclasses must implement observe")

    def dimension(self):
        """Length of Observation.as_vector() without a command"""
        raise NotImplementedError("Subclasses must implement dimension")

    def _noisy_state(self, state, rng):
        """Heading, velocity and angular velocity with state noise drawn from rng"""
        heading = state.heading
        velocity = np.array(state.linear_velocity, dtype=float)
        omega = state.angular_velocity
        if rng is not None:
            noise = self.config.state_noise * rng.standard_normal(4)
            heading = wrap_angle(heading + noise[0])
            velocity = velocity + noise[1:3]
            omega += noise[3]
        return float(heading), velocity, float(omega)
