import numpy as np
import pytest

from platonav.env.cost import TaskCost, TaskCostModel
from platonav.env.obstacles import FieldVariant, ObstacleField
from platonav.env.vehicle import VehicleDynamics, VehicleState
from platonav.gaussian import Gaussian, kl_divergence
from platonav.trajopt.ilqg import MpcConfig
from platonav.trajopt.mpc import mpc_star_plan, mpc_teacher_plan

from lq_problems import LinearDynamics, QuadraticCost


EMPTY = ObstacleField(FieldVariant.EMPTY)


class FixedLearner:
    def __init__(self, mean, covariance):
        self.action = Gaussian(mean, covariance)

    def forward(self, observation):
        return self.action


def lq_problem():
    rng = np.random.default_rng(9)
    A = np.eye(4) + 0.05 * rng.standard_normal((4, 4))
    B = rng.standard_normal((4, 2))
    return LinearDynamics(A, B), QuadraticCost(np.eye(4), 0.5 * np.eye(2)), rng.standard_normal(4)


def test_zero_weight_teacher_equals_supervisor():
    dynamics, cost, x0 = lq_problem()
    config = MpcConfig(horizon=10, kl_weight=0.0)
    learner = FixedLearner([1.0, -1.0], np.eye(2))
    star = mpc_star_plan(x0, dynamics, cost, config)
    teacher = mpc_teacher_plan(x0, None, learner, dynamics, cost, config)
    assert np.array_equal(star.action.mean, teacher.action.mean)
    assert np.array_equal(star.action.covariance, teacher.action.covariance)
    assert star.cost == teacher.cost


def test_huge_weight_pins_teacher_to_learner():
    dynamics, cost, x0 = lq_problem()
    learner = FixedLearner([0.3, -0.2], 0.5 * np.eye(2))
    teacher = mpc_teacher_plan(x0, None, learner, dynamics, cost, MpcConfig(horizon=10, kl_weight=1e8))
    assert np.allclose(teacher.action.mean, learner.action.mean, atol=1e-3)
    assert kl_divergence(teacher.action, learner.action) < 1e-3


def test_first_step_covariance_blends_temperature_and_learner_precision():
    dynamics, cost, x0 = lq_problem()
    weight = 4.0
    learner = FixedLearner([0.0, 0.0], 2.0 * np.eye(2))
    star = mpc_star_plan(x0, dynamics, cost, MpcConfig(horizon=10))
    teacher = mpc_teacher_plan(x0, None, learner, dynamics, cost, MpcConfig(horizon=10, kl_weight=weight))
    # star covariance is Q_uu⁻¹ at temperature 1
    quu = np.linalg.inv(star.action.covariance)
    expected = (1.0 + weight) * np.linalg.inv(quu + weight * learner.action.precision())
    assert np.allclose(teacher.action.covariance, expected, rtol=1e-8)


def test_kl_to_learner_shrinks_as_weight_grows_on_lq():
    dynamics, cost, x0 = lq_problem()
    learner = FixedLearner([0.5, 0.5], np.eye(2))
    kls = [kl_divergence(mpc_teacher_plan(x0, None, learner, dynamics, cost,
                                          MpcConfig(horizon=10, kl_weight=w)).action, learner.action)
           for w in (0.0, 1.0, 10.0, 100.0, 1000.0)]
    for before, after in zip(kls, kls[1:]):
        assert after <= before + 1e-12


def test_kl_to_learner_shrinks_as_weight_grows_on_vehicle():
    dynamics = VehicleDynamics()
    cost = TaskCostModel(TaskCost(weight_velocity=100.0, weight_heading=10.0, weight_angvel=25.0), EMPTY)
    learner = FixedLearner([0.0, 0.0], np.eye(2))
    x = VehicleState.at_rest((0.0, 0.0))
    kls = [kl_divergence(mpc_teacher_plan(x, None, learner, dynamics, cost,
                                          MpcConfig(horizon=15, kl_weight=w)).action, learner.action)
           for w in (0.0, 1.0, 10.0, 100.0, 1000.0)]
    for before, after in zip(kls, kls[1:]):
        assert after <= before * (1.0 + 1e-6) + 1e-9


def test_supervisor_hovers_when_already_on_target():
    state = VehicleState(linear_velocity=(1.5, 0.0))
    plan = mpc_star_plan(state, VehicleDynamics(), TaskCostModel(TaskCost(), EMPTY), MpcConfig())
    assert np.allclose(plan.action.mean, 0.0, atol=1e-4)
    assert plan.cost == pytest.approx(0.0, abs=1e-9)


def test_teacher_cost_excludes_the_penalty():
    dynamics, cost, x0 = lq_problem()
    learner = FixedLearner([3.0, 3.0], np.eye(2))
    teacher = mpc_teacher_plan(x0, None, learner, dynamics, cost, MpcConfig(horizon=10, kl_weight=10.0))
    controller = teacher.controller
    assert teacher.cost == pytest.approx(cost.trajectory_cost(controller.nominal_states,
                                                              controller.nominal_controls))
