import math

import numpy as np
import pytest

from platonav.env.obstacles import FieldVariant, ObstacleField, raycast_laser
from platonav.env.sensors.base import OBSERVATION_MODES, SensorConfig
from platonav.env.sensors.factory import observation_dim, observe
from platonav.env.vehicle import VehicleState
from platonav.errors import ConfigError

FIELD = ObstacleField(FieldVariant.FOREST, circles=[(3.0, 0.0, 0.5), (-1.0, 4.0, 0.5)])
STATE = VehicleState(position=(0.5, 0.2), heading=0.3, linear_velocity=(1.0, -0.2), angular_velocity=0.4)


def test_noise_free_laser_matches_raycast():
    config = SensorConfig()
    obs = observe(FIELD, STATE, config)
    expected = raycast_laser(FIELD, STATE, config.beam_count, config.fan_angle, config.max_range)
    assert np.array_equal(obs.laser_ranges, expected)
    assert obs.heading == STATE.heading
    assert obs.position is None


def test_noisy_laser_stays_in_range(rng):
    config = SensorConfig(laser_noise_fraction=0.2)
    for _ in range(20):
        obs = observe(FIELD, STATE, config, rng)
        assert np.all((obs.laser_ranges >= 0.0) & (obs.laser_ranges <= config.max_range))


def test_full_state_vector_is_the_state():
    obs = observe(ObstacleField(FieldVariant.EMPTY), STATE, SensorConfig(mode="full-state"))
    assert np.array_equal(obs.as_vector(), STATE.to_vector())


def test_full_state_wraps_position_in_periodic_fields():
    field = ObstacleField(FieldVariant.FOREST, extent=10.0)
    state = VehicleState(position=(12.0, -7.0))
    obs = observe(field, state, SensorConfig(mode="full-state"))
    assert np.allclose(obs.position, (2.0, 3.0))


def test_distance_map_reads_signed_distance():
    config = SensorConfig(mode="state-distance-map", map_cells=3, map_resolution=1.0)
    state = VehicleState(position=(0.0, 0.0))
    obs = observe(FIELD, state, config)
    assert obs.distance_map.shape == (9,)
    # centre cell sits on the vehicle
    assert obs.distance_map[4] == pytest.approx(FIELD.signed_distance((0.0, 0.0)))


@pytest.mark.parametrize("mode", OBSERVATION_MODES)
@pytest.mark.parametrize("with_command", [False, True])
def test_observation_dimension_matches_vector(mode, with_command, rng):
    config = SensorConfig(mode=mode, beam_count=7)
    command = (1.0, 0.5) if with_command else None
    obs = observe(FIELD, STATE, config, rng, command)
    assert obs.as_vector().shape == (observation_dim(config, with_command),)


def test_command_is_last():
    obs = observe(FIELD, STATE, SensorConfig(), command=(2.0, -1.0))
    assert np.array_equal(obs.as_vector()[-2:], (2.0, -1.0))


def test_observations_are_reproducible():
    a = observe(FIELD, STATE, SensorConfig(), np.random.default_rng(3)).as_vector()
    b = observe(FIELD, STATE, SensorConfig(), np.random.default_rng(3)).as_vector()
    assert np.array_equal(a, b)


def test_sensor_config_validation():
    with pytest.raises(ConfigError):
        SensorConfig(mode="sonar")
    with pytest.raises(ConfigError):
        SensorConfig(beam_count=0)
    with pytest.raises(ConfigError):
        SensorConfig(fan_angle=-math.pi)


def test_heading_noise_wraps_across_the_branch_cut(rng):
    state = VehicleState(heading=math.pi - 1e-3)
    config = SensorConfig(mode="full-state", state_noise=0.5)
    headings = [observe(ObstacleField(FieldVariant.EMPTY), state, config, rng).heading for _ in range(200)]
    assert all(-math.pi < h <= math.pi for h in headings)
    assert any(h < 0.0 for h in headings)
