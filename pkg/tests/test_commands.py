import numpy as np
import pytest

from platonav.env.vehicle import VehicleState
from platonav.errors import ConfigError
from platonav.learners.commands import CommandConfig, VelocityCommander


def test_commands_stay_in_bounds():
    config = CommandConfig(enabled=True)
    rng = np.random.default_rng(0)
    for _ in range(100):
        command = VelocityCommander(config, rng).command
        assert config.forward_min <= command[0] <= config.forward_max
        assert abs(command[1]) <= config.lateral_max


def test_command_is_kept_until_reached():
    commander = VelocityCommander(CommandConfig(enabled=True), np.random.default_rng(1))
    first = commander.command.copy()
    assert np.array_equal(commander.update(VehicleState()), first)
    assert commander.reached == 0
    on_target = VehicleState(linear_velocity=tuple(first))
    second = commander.update(on_target)
    assert commander.reached == 1
    assert not np.array_equal(second, first)


def test_commands_are_reproducible():
    a = VelocityCommander(CommandConfig(enabled=True), np.random.default_rng(5)).command
    b = VelocityCommander(CommandConfig(enabled=True), np.random.default_rng(5)).command
    assert np.array_equal(a, b)


def test_command_config_validation():
    with pytest.raises(ConfigError):
        CommandConfig(forward_min=2.0, forward_max=1.0)
    with pytest.raises(ConfigError):
        CommandConfig(tolerance=0.0)
