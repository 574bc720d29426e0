"""
Maximum-entropy iLQG.

Alternates linearization/quadratization along a nominal trajectory, an
entropy-regularized LQR backward pass and a backtracking forward pass. The
backward pass yields the stochastic controller N(K_t x + k_t, Σ_t) with
Σ_t = temperature_t · Q_uu⁻¹.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from ..errors import ConfigError, NumericalError, OptimizationFailed, SimulationDiverged
from .controller import LinearGaussianController

logger = logging.getLogger("PlatoNav.trajopt")


@dataclass(frozen=True)
class MpcConfig:
    """
    Planner settings.

    Args:
        horizon: Planning horizon H in steps
        kl_weight: λ, weight of the KL penalty toward the learner
        temperature: Entropy temperature scaling Σ_t
        max_iterations: iLQG iteration cap
        convergence_tolerance: Stop when the relative cost improvement falls below this
        regularization_min: First nonzero Levenberg-Marquardt damping
        regularization_max: Damping above which planning fails
        regularization_factor: Multiplier between damping levels
        line_search_shrink: Step shrink factor
        line_search_trials: Maximum forward-pass trials per iteration
        fd_epsilon: Finite-difference perturbation for dynamics linearization
    """
    horizon: int = 15
    kl_weight: float = 0.0
    temperature: float = 1.0
    max_iterations: int = 20
    convergence_tolerance: float = 1e-6
    regularization_min: float = 1e-6
    regularization_max: float = 1e6
    regularization_factor: float = 10.0
    line_search_shrink: float = 0.5
    line_search_trials: int = 10
    fd_epsilon: float = 1e-5

    def __post_init__(self):
        if self.horizon < 1:
            raise ConfigError("horizon must be at least 1", field="mpc.horizon")
        if self.kl_weight < 0.0:
            raise ConfigError("kl_weight must be nonnegative", field="mpc.kl_weight")
        if self.temperature <= 0.0:
            raise ConfigError("temperature must be positive", field="mpc.temperature")
        if self.max_iterations < 1 or self.line_search_trials < 1:
            raise ConfigError("iteration counts must be positive", field="mpc.max_iterations")
        if not 0.0 < self.regularization_min < self.regularization_max:
            raise ConfigError("need 0 < regularization_min < regularization_max",
                              field="mpc.regularization_min")
        if self.regularization_factor <= 1.0:
            raise ConfigError("regularization_factor must exceed 1", field="mpc.regularization_factor")
        if not 0.0 < self.line_search_shrink < 1.0:
            raise ConfigError("line_search_shrink must be in (0, 1)", field="mpc.line_search_shrink")
        if self.convergence_tolerance <= 0.0 or self.fd_epsilon <= 0.0:
            raise ConfigError("tolerances must be positive", field="mpc.convergence_tolerance")


@dataclass(frozen=True)
class KlPenalty:
    """
    Quadratic penalty ½ λ (u - μ)ᵀ P (u - μ) on the first control.

    Together with the raised first-step temperature (temperature + λ) this is
    the u-dependent part of λ·KL(π‖N(μ, P⁻¹)).
    """
    weight: float
    mean: np.ndarray
    precision: np.ndarray

    def value(self, u):
        e = u - self.mean
        return 0.5 * self.weight * float(e @ self.precision @ e)


class PenalizedCost:
    """Trajectory cost with a KL penalty on the first control"""

    def __init__(self, cost, penalty):
        self.cost = cost
        self.penalty = penalty

    def trajectory_cost(self, xs, us):
        return self.cost.trajectory_cost(xs, us) + self.penalty.value(np.asarray(us)[0])

    def quadratize(self, xs, us):
        model = self.cost.quadratize(xs, us)
        p = self.penalty
        weighted = p.weight * p.precision
        model.l[0] += p.value(np.asarray(us)[0])
        model.lu[0] = model.lu[0] + weighted @ (us[0] - p.mean)
        model.luu[0] = model.luu[0] + weighted
        return model


@dataclass
class BackwardPassResult:
    """
    Output of one backward pass.

    Args:
        gains: K_t (H, m, n)
        feedforward: k-updates (H, m)
        covariances: Σ_t (H, m, m)
        value_gradients: V_x at t = 0..H (H+1, n)
        value_hessians: V_xx at t = 0..H (H+1, n, n)
        expected_reduction: (Σ k·Q_u, Σ ½ k·Q_uu·k), the predicted linear and quadratic decrease terms
    """
    gains: np.ndarray
    feedforward: np.ndarray
    covariances: np.ndarray
    value_gradients: np.ndarray
    value_hessians: np.ndarray
    expected_reduction: tuple


def backward_pass(A, B, model, temperatures, regularization=0.0):
    """
    Entropy-regularized LQR backward pass.

    Args:
        A: Dynamics state Jacobians (H, n, n)
        B: Dynamics control Jacobians (H, n, m)
        model: QuadraticCostModel along the nominal trajectory
        temperatures: Per-step entropy temperatures (H,)
        regularization: Levenberg-Marquardt damping μ added to Q_uu

    Returns:
        BackwardPassResult

    Raises:
        NumericalError: if a damped Q_uu is not positive definite
    """
    horizon, n, m = B.shape[0], B.shape[1], B.shape[2]
    gains = np.zeros((horizon, m, n))
    feedforward = np.zeros((horizon, m))
    covariances = np.zeros((horizon, m, m))
    Vx = np.zeros((horizon + 1, n))
    Vxx = np.zeros((horizon + 1, n, n))
    Vx[horizon] = model.lx[horizon]
    Vxx[horizon] = model.lxx[horizon]
    linear_term = quadratic_term = 0.0

    for t in range(horizon - 1, -1, -1):
        At, Bt = A[t], B[t]
        Qx = model.lx[t] + At.T @ Vx[t + 1]
        Qu = model.lu[t] + Bt.T @ Vx[t + 1]
        Qxx = model.lxx[t] + At.T @ Vxx[t + 1] @ At
        Quu = model.luu[t] + Bt.T @ Vxx[t + 1] @ Bt
        Qux = model.lux[t] + Bt.T @ Vxx[t + 1] @ At
        Quu_reg = Quu + regularization * np.eye(m)
        try:
            factor = linalg.cho_factor(Quu_reg, lower=True)
        except linalg.LinAlgError as e:
            raise NumericalError(f"Q_uu not positive definite at t={t}", np.linalg.cond(Quu_reg)) from e

        K = -linalg.cho_solve(factor, Qux)
        k = -linalg.cho_solve(factor, Qu)
        gains[t], feedforward[t] = K, k
        covariances[t] = temperatures[t] * linalg.cho_solve(factor, np.eye(m))
        covariances[t] = 0.5 * (covariances[t] + covariances[t].T)

        Vx[t] = Qx + K.T @ Quu @ k + K.T @ Qu + Qux.T @ k
        V = Qxx + K.T @ Quu @ K + K.T @ Qux + Qux.T @ K
        Vxx[t] = 0.5 * (V + V.T)
        linear_term += float(k @ Qu)
        quadratic_term += 0.5 * float(k @ Quu @ k)

    return BackwardPassResult(gains, feedforward, covariances, Vx, Vxx, (linear_term, quadratic_term))


def _rollout(x0, dynamics, nominal_xs, nominal_us, gains, feedforward, alpha):
    """Closed-loop forward pass u_t = ū_t + α k_t + K_t (x_t - x̄_t)"""
    horizon = len(nominal_us)
    xs = np.zeros((horizon + 1, len(x0)))
    us = np.zeros_like(nominal_us)
    xs[0] = x0
    for t in range(horizon):
        u = nominal_us[t] + alpha * feedforward[t] + gains[t] @ dynamics.state_difference(xs[t], nominal_xs[t])
        us[t] = dynamics.clamp(u)
        xs[t + 1] = dynamics.step(xs[t], us[t])
    return xs, us


def _initial_trajectory(x0, dynamics, horizon, warm_start):
    if warm_start is not None:
        return _rollout(x0, dynamics, warm_start.nominal_states, warm_start.nominal_controls,
                        warm_start.gains, np.zeros_like(warm_start.nominal_controls), 0.0)
    zero_gains = np.zeros((horizon, dynamics.control_dim, dynamics.state_dim))
    return _rollout(x0, dynamics, np.zeros((horizon + 1, dynamics.state_dim)),
                    np.zeros((horizon, dynamics.control_dim)), zero_gains,
                    np.zeros((horizon, dynamics.control_dim)), 0.0)


def max_entropy_ilqg(x0, cost, dynamics, config, warm_start=None, kl_penalty=None):
    """
    Optimize a linear-Gaussian controller from x0.

    Args:
        x0: Initial state vector
        cost: Object with trajectory_cost(xs, us) and quadratize(xs, us)
        dynamics: Object with step, linearize, clamp, state_difference,
            state_dim and control_dim
        config: MpcConfig
        warm_start: Optional LinearGaussianController; its closed-loop rollout
            from x0 is the initial nominal trajectory
        kl_penalty: Optional KlPenalty on the first control; raises the
            first-step temperature by its weight

    Returns:
        LinearGaussianController whose nominal trajectory cost is no higher
        than the warm start's; `cost` holds that value

    Raises:
        OptimizationFailed: Q_uu stays indefinite at maximum damping
        SimulationDiverged: a rollout left the finite range
    """
    x0 = np.asarray(x0, dtype=float)
    if not np.all(np.isfinite(x0)):
        raise SimulationDiverged("planner called from a non-finite state")
    horizon = warm_start.horizon if warm_start is not None else config.horizon
    if kl_penalty is not None:
        cost = PenalizedCost(cost, kl_penalty)
    temperatures = np.full(horizon, config.temperature)
    if kl_penalty is not None:
        temperatures[0] += kl_penalty.weight

    xs, us = _initial_trajectory(x0, dynamics, horizon, warm_start)
    current = cost.trajectory_cost(xs, us)
    regularization = 0.0
    done = False

    for iteration in range(config.max_iterations + 1):
        A, B = dynamics.linearize(xs[:-1], us)
        model = cost.quadratize(xs, us)
        while True:
            try:
                result = backward_pass(A, B, model, temperatures, regularization)
                break
            except NumericalError as e:
                regularization = max(config.regularization_min, regularization * config.regularization_factor)
                if regularization > config.regularization_max:
                    raise OptimizationFailed(
                        f"Q_uu indefinite at maximum regularization: {e}", e.condition_number
                    ) from e
        if done or iteration == config.max_iterations:
            break

        alpha = 1.0
        accepted = False
        for _ in range(config.line_search_trials):
            new_xs, new_us = _rollout(x0, dynamics, xs, us, result.gains, result.feedforward, alpha)
            candidate = cost.trajectory_cost(new_xs, new_us)
            if candidate < current:
                accepted = True
                break
            alpha *= config.line_search_shrink
        if not accepted:
            break

        improvement = (current - candidate) / max(abs(current), np.finfo(float).tiny)
        xs, us, current = new_xs, new_us, candidate
        if regularization > config.regularization_min:
            regularization /= config.regularization_factor
        else:
            regularization = 0.0
        done = improvement < config.convergence_tolerance

    logger.debug(f"iLQG finished after {iteration} iterations with cost {current:.6g}")
    return LinearGaussianController(
        result.gains, xs, us, result.covariances,
        state_difference=dynamics.state_difference, cost=current,
    )
