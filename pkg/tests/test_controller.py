import numpy as np
import pytest

from platonav.errors import ContractViolation, NumericalError
from platonav.trajopt.controller import LinearGaussianController

from lq_problems import LinearDynamics


def make_controller(rng, horizon=4, n=3, m=2):
    return LinearGaussianController(
        gains=rng.normal(size=(horizon, m, n)),
        nominal_states=rng.normal(size=(horizon + 1, n)),
        nominal_controls=rng.normal(size=(horizon, m)),
        covariances=np.tile(np.eye(m), (horizon, 1, 1)),
    )


def test_mean_matches_gain_offset_form(rng):
    controller = make_controller(rng)
    for t in range(controller.horizon):
        x = rng.normal(size=3)
        expected = controller.gains[t] @ x + controller.offsets[t]
        assert np.allclose(controller.action_mean(t, x), expected)


def test_action_distribution_uses_covariance(rng):
    controller = make_controller(rng)
    action = controller.action_distribution(0, controller.nominal_states[0])
    assert np.allclose(action.mean, controller.nominal_controls[0])
    assert np.array_equal(action.covariance, np.eye(2))


def test_shifted_drops_first_and_repeats_last(rng):
    controller = make_controller(rng)
    shifted = controller.shifted()
    assert shifted.horizon == controller.horizon
    assert np.array_equal(shifted.nominal_controls[:-1], controller.nominal_controls[1:])
    assert np.array_equal(shifted.nominal_controls[-1], controller.nominal_controls[-1])
    assert np.array_equal(shifted.gains[0], controller.gains[1])


def test_shifted_propagates_last_state_with_dynamics(rng):
    controller = make_controller(rng)
    dynamics = LinearDynamics(np.eye(3), np.ones((3, 2)))
    shifted = controller.shifted(dynamics)
    expected = dynamics.step(controller.nominal_states[-1], controller.nominal_controls[-1])
    assert np.allclose(shifted.nominal_states[-1], expected)


def test_arrays_are_read_only(rng):
    controller = make_controller(rng)
    with pytest.raises(ValueError):
        controller.gains[0, 0, 0] = 1.0


def test_rejects_indefinite_covariance(rng):
    with pytest.raises(NumericalError):
        LinearGaussianController(np.zeros((1, 2, 3)), np.zeros((2, 3)), np.zeros((1, 2)),
                                 [np.diag([1.0, -1.0])])


def test_rejects_inconsistent_horizons():
    with pytest.raises(ContractViolation):
        LinearGaussianController(np.zeros((2, 2, 3)), np.zeros((2, 3)), np.zeros((1, 2)),
                                 np.tile(np.eye(2), (1, 1, 1)))
    with pytest.raises(ContractViolation):
        LinearGaussianController(np.zeros((0, 2, 3)), np.zeros((1, 3)), np.zeros((0, 2)),
                                 np.zeros((0, 2, 2)))
