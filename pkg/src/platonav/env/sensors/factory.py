"""Observation source selection by configured mode."""

from dataclasses import replace

import numpy as np

from .base import SensorConfig
from .full_state import DistanceMapSource, FullStateSource
from .laser import LaserSource

SOURCES = {
    "laser": LaserSource,
    "full-state": FullStateSource,
    "state-distance-map": DistanceMapSource,
}


def make_source(config):
    return SOURCES[config.mode](config)


def observation_dim(config, with_command=False):
    """Length of the observation vector for a sensor configuration"""
    return make_source(config).dimension() + (2 if with_command else 0)


def observe(field, state, config=None, rng=None, command=None):
    """
    Observe a vehicle state.

    Args:
        field: ObstacleField
        state: VehicleState
        config: SensorConfig (defaults to the laser fan)
        rng: numpy Generator for observation noise; None for a noise-free reading
        command: Optional commanded velocity appended to the observation

    Returns:
        Observation
    """
    config = config or SensorConfig()
    observation = make_source(config).observe(field, state, rng)
    if command is not None:
        observation = replace(observation, commanded_velocity=np.asarray(command, dtype=float).copy())
    return observation
