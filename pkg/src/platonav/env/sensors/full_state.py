import numpy as np

from .base import Observation, ObservationSource


class FullStateSource(ObservationSource):
    """
    Oracle observation: the full vehicle state, position wrapped into the
    field's tile when the field is periodic
    """

    def observe(self, field, state, rng=None):
        position = field.wrap(np.array(state.position, dtype=float))
        if rng is not None:
            position = position + self.config.state_noise * rng.standard_normal(2)
        heading, velocity, omega = self._noisy_state(state, rng)
        return Observation(laser_ranges=np.zeros(0), linear_velocity=velocity,
                           angular_velocity=omega, heading=heading, position=position)

    def dimension(self):
        return 6


class DistanceMapSource(FullStateSource):
    """
    Full state plus signed distances on a body-frame grid around the vehicle,
    clipped to the laser range
    """

    def __init__(self, config):
        super().__init__(config)
        n = config.map_cells
        offsets = (np.arange(n) - 0.5 * (n - 1)) * config.map_resolution
        gx, gy = np.meshgrid(offsets, offsets, indexing="ij")
        self._grid = np.stack([gx.ravel(), gy.ravel()], axis=1)

    def observe(self, field, state, rng=None):
        base = super().observe(field, state, rng)
        cos_h, sin_h = np.cos(state.heading), np.sin(state.heading)
        rotation = np.array([[cos_h, -sin_h], [sin_h, cos_h]])
        points = np.asarray(state.position, dtype=float) + self._grid @ rotation.T
        distances, _ = field.signed_distances(points)
        distances = np.clip(distances, -self.config.max_range, self.config.max_range)
        if rng is not None:
            distances = distances + self.config.state_noise * rng.standard_normal(len(distances))
        return Observation(laser_ranges=base.laser_ranges, linear_velocity=base.linear_velocity,
                           angular_velocity=base.angular_velocity, heading=base.heading,
                           position=base.position, distance_map=distances)

    def dimension(self):
        return 6 + self.config.map_cells ** 2
