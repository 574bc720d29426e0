import numpy as np

from ..obstacles import raycast_laser
from .base import Observation, ObservationSource


class LaserSource(ObservationSource):
    """Laser fan plus noisy heading and velocities"""

    def observe(self, field, state, rng=None):
        c = self.config
        ranges = raycast_laser(field, state, c.beam_count, c.fan_angle, c.max_range)
        if rng is not None:
            ranges = ranges + c.laser_noise_fraction * c.max_range * rng.standard_normal(c.beam_count)
            ranges = np.clip(ranges, 0.0, c.max_range)
        heading, velocity, omega = self._noisy_state(state, rng)
        return Observation(laser_ranges=ranges, linear_velocity=velocity,
                           angular_velocity=omega, heading=heading)

    def dimension(self):
        return self.config.beam_count + 4
