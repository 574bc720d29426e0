import numpy as np
import pytest

from platonav.env.cost import TaskCost, TaskCostModel
from platonav.env.obstacles import FieldVariant, ObstacleField
from platonav.env.vehicle import VehicleDynamics, VehicleState
from platonav.errors import ConfigError, OptimizationFailed
from platonav.trajopt.controller import LinearGaussianController
from platonav.trajopt.cost_model import QuadraticCostModel
from platonav.trajopt.ilqg import MpcConfig, backward_pass, max_entropy_ilqg

from lq_problems import LinearDynamics, QuadraticCost


def random_lq(rng, n, m=2):
    A = np.eye(n) + 0.1 * rng.standard_normal((n, n))
    B = 0.5 * rng.standard_normal((n, m))
    M = rng.standard_normal((n, n))
    Q = M @ M.T / n + 0.1 * np.eye(n)
    N = rng.standard_normal((m, m))
    R = N @ N.T / m + 0.5 * np.eye(m)
    return A, B, Q, R


def riccati(A, B, Q, R, Qf, horizon):
    """Textbook finite-horizon discrete Riccati recursion"""
    P = Qf
    gains, values = [None] * horizon, [None] * (horizon + 1)
    values[horizon] = P
    for t in range(horizon - 1, -1, -1):
        K = -np.linalg.solve(R + B.T @ P @ B, B.T @ P @ A)
        P = Q + A.T @ P @ A + A.T @ P @ B @ K
        P = 0.5 * (P + P.T)
        gains[t], values[t] = K, P
    return gains, values


class ZeroCost:
    def __init__(self, n, m):
        self.n, self.m = n, m

    def trajectory_cost(self, xs, us):
        return 0.0

    def quadratize(self, xs, us):
        horizon = len(us)
        return QuadraticCostModel(
            l=np.zeros(horizon + 1), lx=np.zeros((horizon + 1, self.n)), lu=np.zeros((horizon, self.m)),
            lxx=np.zeros((horizon + 1, self.n, self.n)), luu=np.zeros((horizon, self.m, self.m)),
            lux=np.zeros((horizon, self.m, self.n)),
        )


def test_gains_match_riccati_on_random_lq_problems():
    rng = np.random.default_rng(2024)
    horizon = 20
    for _ in range(50):
        n = int(rng.integers(4, 7))
        A, B, Q, R = random_lq(rng, n)
        controller = max_entropy_ilqg(rng.standard_normal(n), QuadraticCost(Q, R, 2.0 * Q),
                                      LinearDynamics(A, B), MpcConfig(horizon=horizon))
        gains, _ = riccati(A, B, Q, R, 2.0 * Q, horizon)
        for t in range(horizon):
            assert np.allclose(controller.gains[t], gains[t], rtol=1e-6, atol=1e-8)


def test_backward_pass_value_hessians_match_riccati(rng):
    n, m, horizon = 4, 2, 10
    A, B, Q, R = random_lq(rng, n, m)
    cost = QuadraticCost(Q, R)
    xs = rng.standard_normal((horizon + 1, n))
    us = rng.standard_normal((horizon, m))
    result = backward_pass(np.tile(A, (horizon, 1, 1)), np.tile(B, (horizon, 1, 1)),
                           cost.quadratize(xs, us), np.ones(horizon))
    gains, values = riccati(A, B, Q, R, Q, horizon)
    for t in range(horizon + 1):
        assert np.allclose(result.value_hessians[t], values[t], rtol=1e-6, atol=1e-9)
    for t in range(horizon):
        assert np.allclose(result.gains[t], gains[t], rtol=1e-6, atol=1e-9)
        expected_cov = np.linalg.inv(R + B.T @ values[t + 1] @ B)
        assert np.allclose(result.covariances[t], expected_cov, rtol=1e-8)


def test_lq_first_action_is_riccati_optimal(rng):
    n = 4
    A, B, Q, R = random_lq(rng, n)
    x0 = rng.standard_normal(n)
    controller = max_entropy_ilqg(x0, QuadraticCost(Q, R), LinearDynamics(A, B), MpcConfig(horizon=12))
    gains, _ = riccati(A, B, Q, R, Q, 12)
    assert np.allclose(controller.action_mean(0, x0), gains[0] @ x0, atol=1e-6)


def test_zero_cost_keeps_the_warm_start(rng):
    n, m, horizon = 3, 2, 6
    dynamics = LinearDynamics(np.eye(n), 0.1 * rng.standard_normal((n, m)))
    us = rng.standard_normal((horizon, m))
    xs = [np.ones(n)]
    for u in us:
        xs.append(dynamics.step(xs[-1], u))
    warm = LinearGaussianController(np.zeros((horizon, m, n)), xs, us, np.tile(np.eye(m), (horizon, 1, 1)))
    controller = max_entropy_ilqg(np.ones(n), ZeroCost(n, m), dynamics, MpcConfig(horizon=horizon),
                                  warm_start=warm)
    assert np.allclose(controller.nominal_controls, us)
    assert controller.cost == 0.0


def test_vanishing_temperature_gives_vanishing_covariance(rng):
    A, B, Q, R = random_lq(rng, 4)
    controller = max_entropy_ilqg(np.ones(4), QuadraticCost(Q, R), LinearDynamics(A, B),
                                  MpcConfig(horizon=8, temperature=1e-12))
    assert max(np.linalg.norm(c) for c in controller.covariances) < 1e-9


def test_covariance_scales_with_temperature(rng):
    A, B, Q, R = random_lq(rng, 4)
    cold = max_entropy_ilqg(np.ones(4), QuadraticCost(Q, R), LinearDynamics(A, B), MpcConfig(horizon=8))
    hot = max_entropy_ilqg(np.ones(4), QuadraticCost(Q, R), LinearDynamics(A, B),
                           MpcConfig(horizon=8, temperature=3.0))
    assert np.allclose(hot.covariances, 3.0 * cold.covariances)
    assert np.allclose(hot.gains, cold.gains)


def test_indefinite_control_cost_fails():
    A = np.eye(2)
    B = np.eye(2)
    cost = QuadraticCost(np.eye(2), -1e9 * np.eye(2))
    with pytest.raises(OptimizationFailed):
        max_entropy_ilqg(np.ones(2), cost, LinearDynamics(A, B), MpcConfig(horizon=5))


def _closed_loop_cost(controller, x0, dynamics, cost):
    xs, us = [np.asarray(x0, dtype=float)], []
    for t in range(controller.horizon):
        u = dynamics.clamp(controller.nominal_controls[t]
                           + controller.gains[t] @ dynamics.state_difference(xs[-1], controller.nominal_states[t]))
        us.append(u)
        xs.append(dynamics.step(xs[-1], u))
    return cost.trajectory_cost(np.array(xs), np.array(us))


def test_warm_start_never_increases_cost():
    field = ObstacleField(FieldVariant.FOREST, circles=[(3.0, 0.4, 0.5), (6.0, -1.0, 0.5)])
    cost = TaskCostModel(TaskCost(weight_velocity=100.0, weight_heading=10.0, weight_angvel=25.0,
                                  weight_obstacle=3000.0), field)
    dynamics = VehicleDynamics()
    config = MpcConfig(horizon=15, max_iterations=10)
    x = VehicleState(linear_velocity=(1.0, 0.0)).to_vector()
    controller = max_entropy_ilqg(x, cost, dynamics, config)
    for _ in range(5):
        x = dynamics.step(x, controller.action_mean(0, x))
        warm = controller.shifted(dynamics)
        controller = max_entropy_ilqg(x, cost, dynamics, config, warm_start=warm)
        assert controller.cost <= _closed_loop_cost(warm, x, dynamics, cost) + 1e-9
        for covariance in controller.covariances:
            assert np.all(np.linalg.eigvalsh(covariance) > 0.0)


def test_mpc_config_validation():
    with pytest.raises(ConfigError):
        MpcConfig(horizon=0)
    with pytest.raises(ConfigError):
        MpcConfig(kl_weight=-1.0)
    with pytest.raises(ConfigError):
        MpcConfig(regularization_min=1.0, regularization_max=0.5)
