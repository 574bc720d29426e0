"""
Receding-horizon policies built on max-entropy iLQG: the locally optimal
supervisor π* and the KL-penalized teacher π_λ.
"""

from dataclasses import dataclass

import numpy as np

from ..env.vehicle import VehicleState
from ..gaussian import Gaussian
from .controller import LinearGaussianController
from .ilqg import KlPenalty, max_entropy_ilqg


@dataclass(frozen=True)
class PlanResult:
    """
    Args:
        action: First-step action distribution
        controller: Full optimized controller (warm start for the next step)
        cost: Task cost of the nominal trajectory, KL penalty excluded
    """
    action: Gaussian
    controller: LinearGaussianController
    cost: float


def _state_vector(x):
    return x.to_vector() if isinstance(x, VehicleState) else np.asarray(x, dtype=float)


def _plan(x, dynamics, cost, config, warm_start, penalty):
    x0 = _state_vector(x)
    controller = max_entropy_ilqg(x0, cost, dynamics, config, warm_start=warm_start, kl_penalty=penalty)
    task_cost = controller.cost if penalty is None else cost.trajectory_cost(
        controller.nominal_states, controller.nominal_controls
    )
    return PlanResult(action=controller.action_distribution(0, x0), controller=controller, cost=task_cost)


def mpc_star_plan(x, dynamics, cost, config, warm_start=None):
    """
    Supervisor action distribution π*(u|x): the planner without a KL term.

    Args:
        x: VehicleState or state vector
        dynamics: Planner dynamics model
        cost: Trajectory cost model
        config: MpcConfig (kl_weight is ignored)
        warm_start: Optional previous controller, already shifted

    Returns:
        PlanResult; action.precision() is the label precision
    """
    return _plan(x, dynamics, cost, config, warm_start, None)


def mpc_teacher_plan(x, observation, learner, dynamics, cost, config, warm_start=None):
    """
    Teacher action distribution π_λ(u|x, θ).

    The first step carries λ·KL(π‖π_θ(·|o)); later steps are unpenalized.
    With λ = 0 this is mpc_star_plan exactly.

    Args:
        x: VehicleState or state vector
        observation: Observation (or vector) the learner sees at x
        learner: Policy with forward(observation) -> Gaussian
        dynamics: Planner dynamics model
        cost: Trajectory cost model
        config: MpcConfig; kl_weight is λ
        warm_start: Optional previous controller, already shifted

    Returns:
        PlanResult
    """
    if config.kl_weight == 0.0:
        return _plan(x, dynamics, cost, config, warm_start, None)
    learner_action = learner.forward(observation)
    penalty = KlPenalty(weight=config.kl_weight, mean=learner_action.mean,
                        precision=learner_action.precision())
    return _plan(x, dynamics, cost, config, warm_start, penalty)
