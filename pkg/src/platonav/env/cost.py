"""
Task cost: fly at a target velocity and heading with little control effort
while keeping clear of obstacles.
"""

import math
from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np

from ..errors import ConfigError
from ..trajopt.cost_model import QuadraticCostModel
from .vehicle import CONTROL_DIM, HEADING, OMEGA, STATE_DIM, VX, VY, VehicleState, wrap_angle


@dataclass(frozen=True)
class TaskCost:
    """
    Weights and targets of the stage cost

        L(x, u) = w_v |v - v_target|² + w_h wrap(θ - θ_target)² + w_ω ω²
                  + w_u |u - u_hover|² + w_o max(d_safe - sd(p), 0)

    Args:
        target_linear_velocity: World-frame velocity target (m/s)
        target_heading: Heading target (rad)
        weight_velocity: w_v
        weight_heading: w_h
        weight_angvel: w_ω
        weight_control: w_u
        weight_obstacle: w_o
        d_safe: Hinge margin (m)
        hover_control: Control the effort term is measured against
        normalization_scale: s in the squashed cost 1 - exp(-L / s)
    """
    target_linear_velocity: Tuple[float, ...] = (1.5, 0.0)
    target_heading: float = 0.0
    weight_velocity: float = 1e3
    weight_heading: float = 1e4
    weight_angvel: float = 250.0
    weight_control: float = 5.0 ** -3
    weight_obstacle: float = 1e3
    d_safe: float = 0.75
    hover_control: Tuple[float, ...] = (0.0, 0.0)
    normalization_scale: float = 1e3

    def __post_init__(self):
        weights = (self.weight_velocity, self.weight_heading, self.weight_angvel,
                   self.weight_control, self.weight_obstacle)
        if any(w < 0.0 for w in weights):
            raise ConfigError("cost weights must be nonnegative", field="cost")
        if self.d_safe <= 0.0:
            raise ConfigError("d_safe must be positive", field="cost.d_safe")
        if self.normalization_scale <= 0.0:
            raise ConfigError("normalization_scale must be positive", field="cost.normalization_scale")
        if len(self.target_linear_velocity) != 2 or len(self.hover_control) != CONTROL_DIM:
            raise ConfigError("targets must be 2-vectors", field="cost.target_linear_velocity")

    def with_command(self, velocity):
        """Copy tracking a commanded velocity, facing along it"""
        vx, vy = float(velocity[0]), float(velocity[1])
        return replace(self, target_linear_velocity=(vx, vy), target_heading=math.atan2(vy, vx))


def _as_vector(x):
    if isinstance(x, VehicleState):
        return x.to_vector()
    return np.asarray(x, dtype=float)


def stage_costs(cost, field, xs, us):
    """
    Vectorized stage cost.

    Args:
        cost: TaskCost
        field: ObstacleField
        xs: States (k, 6)
        us: Controls (k, 2)

    Returns:
        Array (k,) of nonnegative costs
    """
    xs = np.atleast_2d(xs)
    us = np.atleast_2d(us)
    velocity_error = xs[:, VX:VY + 1] - np.asarray(cost.target_linear_velocity)
    heading_error = wrap_angle(xs[:, HEADING] - cost.target_heading)
    control_error = us - np.asarray(cost.hover_control)
    distances, _ = field.signed_distances(xs[:, :2])
    hinge = np.maximum(cost.d_safe - distances, 0.0)
    return (
        cost.weight_velocity * np.sum(velocity_error ** 2, axis=1)
        + cost.weight_heading * heading_error ** 2
        + cost.weight_angvel * xs[:, OMEGA] ** 2
        + cost.weight_control * np.sum(control_error ** 2, axis=1)
        + cost.weight_obstacle * hinge
    )


def stage_cost(cost, field, x, u):
    """Stage cost L(x, u) for a single state (VehicleState or vector) and control"""
    return float(stage_costs(cost, field, _as_vector(x)[None], np.asarray(u, dtype=float)[None])[0])


def normalized_cost(cost, field, x, u, scale=None):
    """Squashed cost 1 - exp(-L / s) in [0, 1]"""
    scale = cost.normalization_scale if scale is None else scale
    return float(-np.expm1(-stage_cost(cost, field, x, u) / scale))


class TaskCostModel:
    """
    Trajectory cost over a fixed obstacle field in the form the planner consumes.

    The terminal cost is the stage cost evaluated at the hover control.
    The obstacle hinge contributes its gradient but no curvature.
    """

    def __init__(self, cost, field):
        self.cost = cost
        self.field = field

    def _terminal_controls(self, count):
        return np.tile(np.asarray(self.cost.hover_control, dtype=float), (count, 1))

    def trajectory_cost(self, xs, us):
        """Sum of stage costs over us plus the terminal cost at xs[-1]"""
        xs = np.asarray(xs, dtype=float)
        us = np.asarray(us, dtype=float)
        stages = stage_costs(self.cost, self.field, xs[:-1], us) if len(us) else np.zeros(0)
        terminal = stage_costs(self.cost, self.field, xs[-1:], self._terminal_controls(1))
        return float(np.sum(stages) + terminal[0])

    def quadratize(self, xs, us):
        """Gradients and Hessians of the stage and terminal terms along (xs, us)"""
        c = self.cost
        xs = np.asarray(xs, dtype=float)
        us = np.asarray(us, dtype=float)
        horizon = us.shape[0]
        controls = np.vstack([us, self._terminal_controls(1)])

        l = stage_costs(c, self.field, xs, controls)
        lx = np.zeros((horizon + 1, STATE_DIM))
        lxx = np.zeros((horizon + 1, STATE_DIM, STATE_DIM))

        lx[:, VX:VY + 1] = 2.0 * c.weight_velocity * (xs[:, VX:VY + 1] - np.asarray(c.target_linear_velocity))
        lx[:, HEADING] = 2.0 * c.weight_heading * wrap_angle(xs[:, HEADING] - c.target_heading)
        lx[:, OMEGA] = 2.0 * c.weight_angvel * xs[:, OMEGA]
        distances, gradients = self.field.signed_distances(xs[:, :2])
        active = (c.d_safe - distances) > 0.0
        lx[active, :2] -= c.weight_obstacle * gradients[active]

        lxx[:, VX, VX] = lxx[:, VY, VY] = 2.0 * c.weight_velocity
        lxx[:, HEADING, HEADING] = 2.0 * c.weight_heading
        lxx[:, OMEGA, OMEGA] = 2.0 * c.weight_angvel

        lu = 2.0 * c.weight_control * (us - np.asarray(c.hover_control))
        luu = np.tile(2.0 * c.weight_control * np.eye(CONTROL_DIM), (horizon, 1, 1))
        lux = np.zeros((horizon, CONTROL_DIM, STATE_DIM))
        return QuadraticCostModel(l=l, lx=lx, lu=lu, lxx=lxx, luu=luu, lux=lux)
