"""
Planar vehicle dynamics.

The vehicle is a rigid body in the plane driven by a forward thrust along its
heading and a turning torque. A side-slip drag removes velocity across the
heading so the vehicle steers like a skidding boat rather than drifting.

State vector layout: [px, py, heading, vx, vy, omega].
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..errors import ConfigError, ContractViolation, SimulationDiverged

logger = logging.getLogger("PlatoNav.env")

PX, PY, HEADING, VX, VY, OMEGA = range(6)
STATE_DIM = 6
CONTROL_DIM = 2
MAX_DT = 0.1


def wrap_angle(angle):
    """Wrap angles (scalar or array) into (-pi, pi]; in-range values pass through bit-exact"""
    angle = np.asarray(angle, dtype=float)
    outside = (angle > np.pi) | (angle <= -np.pi)
    wrapped = np.where(outside, np.pi - np.mod(np.pi - angle, 2.0 * np.pi), angle)
    return wrapped if wrapped.ndim else float(wrapped)


@dataclass(frozen=True)
class VehicleConfig:
    """
    Physical parameters of the planar vehicle.

    Args:
        dt: Integration step in seconds, in (0, 0.1]
        radius: Collision radius in meters
        control_min: Lower corner of the (thrust, torque) box
        control_max: Upper corner of the (thrust, torque) box
        lateral_drag: Side-slip damping rate in 1/s
        control_noise: Std of the additive control noise during simulation
    """
    dt: float = 0.05
    radius: float = 0.25
    control_min: Tuple[float, ...] = (-4.0, -12.0)
    control_max: Tuple[float, ...] = (4.0, 12.0)
    lateral_drag: float = 4.0
    control_noise: float = 0.1

    def __post_init__(self):
        if not 0.0 < self.dt <= MAX_DT:
            raise ConfigError(f"dt must be in (0, {MAX_DT}], got {self.dt}", field="vehicle.dt")
        if self.radius <= 0.0:
            raise ConfigError("radius must be positive", field="vehicle.radius")
        if len(self.control_min) != CONTROL_DIM or len(self.control_max) != CONTROL_DIM:
            raise ConfigError("control bounds must have two entries", field="vehicle.control_min")
        if any(lo >= hi for lo, hi in zip(self.control_min, self.control_max)):
            raise ConfigError("control_min must be below control_max", field="vehicle.control_min")
        if self.lateral_drag < 0.0 or self.control_noise < 0.0:
            raise ConfigError("drag and noise must be nonnegative", field="vehicle.lateral_drag")


@dataclass(frozen=True)
class VehicleState:
    """
    Full physical state available to the teacher.

    Args:
        position: (x, y) in meters
        heading: Radians in (-pi, pi]
        linear_velocity: (vx, vy) in m/s, world frame
        angular_velocity: rad/s
    """
    position: Tuple[float, float] = (0.0, 0.0)
    heading: float = 0.0
    linear_velocity: Tuple[float, float] = (0.0, 0.0)
    angular_velocity: float = 0.0

    def to_vector(self):
        return np.array([
            self.position[0], self.position[1], self.heading,
            self.linear_velocity[0], self.linear_velocity[1], self.angular_velocity,
        ], dtype=float)

    @classmethod
    def from_vector(cls, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (STATE_DIM,):
            raise ContractViolation(f"state vector must have shape ({STATE_DIM},), got {x.shape}")
        return cls(
            position=(float(x[PX]), float(x[PY])),
            heading=float(x[HEADING]),
            linear_velocity=(float(x[VX]), float(x[VY])),
            angular_velocity=float(x[OMEGA]),
        )

    @classmethod
    def at_rest(cls, position, heading=0.0):
        return cls(position=(float(position[0]), float(position[1])), heading=float(wrap_angle(heading)))

    def is_finite(self):
        return bool(np.all(np.isfinite(self.to_vector())))


def hover_control():
    """Control that keeps a vehicle at rest (and a cruising vehicle cruising)"""
    return np.zeros(CONTROL_DIM)


def clamp_control(u, config):
    return np.clip(u, config.control_min, config.control_max)


def integrate(x, u, dt, lateral_drag):
    """
    Semi-implicit Euler step of the noise-free planar dynamics.

    Works on single vectors or on batches with leading dimensions.

    Args:
        x: States, shape (..., 6)
        u: Controls, shape (..., 2), already clamped
        dt: Step in seconds
        lateral_drag: Side-slip damping rate

    Returns:
        Successor states, shape (..., 6)
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    cos_h = np.cos(x[..., HEADING])
    sin_h = np.sin(x[..., HEADING])
    lateral_speed = -sin_h * x[..., VX] + cos_h * x[..., VY]
    ax = u[..., 0] * cos_h + lateral_drag * lateral_speed * sin_h
    ay = u[..., 0] * sin_h - lateral_drag * lateral_speed * cos_h

    out = np.empty(np.broadcast(x[..., 0], u[..., 0]).shape + (STATE_DIM,))
    out[..., VX] = x[..., VX] + dt * ax
    out[..., VY] = x[..., VY] + dt * ay
    out[..., OMEGA] = x[..., OMEGA] + dt * u[..., 1]
    out[..., HEADING] = wrap_angle(x[..., HEADING] + dt * out[..., OMEGA])
    out[..., PX] = x[..., PX] + dt * out[..., VX]
    out[..., PY] = x[..., PY] + dt * out[..., VY]
    return out


def step(state, control, dt, noise_scale=0.0, rng=None, config=None):
    """
    Advance the vehicle one step.

    Control noise N(0, noise_scale² I) is added before clamping and integration.

    Args:
        state: VehicleState
        control: (thrust, torque)
        dt: Step in seconds, in (0, 0.1]
        noise_scale: Std of the additive control noise
        rng: numpy Generator, required when noise_scale > 0
        config: VehicleConfig supplying bounds and drag

    Returns:
        Successor VehicleState
    """
    config = config or VehicleConfig()
    if not 0.0 < dt <= MAX_DT:
        raise ContractViolation(f"dt must be in (0, {MAX_DT}], got {dt}")
    if not state.is_finite():
        raise ContractViolation("cannot step a non-finite state")
    u = np.asarray(control, dtype=float).reshape(CONTROL_DIM)
    if rng is not None:
        u = u + noise_scale * rng.standard_normal(CONTROL_DIM)
    elif noise_scale > 0.0:
        raise ContractViolation("noise_scale > 0 requires an rng")
    x_next = integrate(state.to_vector(), clamp_control(u, config), dt, config.lateral_drag)
    if not np.all(np.isfinite(x_next)):
        logger.error(f"Simulation diverged from state {state}")
        raise SimulationDiverged("non-finite state after dynamics step", state=state)
    return VehicleState.from_vector(x_next)


def linearize_dynamics(x, u, dt, config=None, epsilon=1e-5):
    """
    Central finite-difference linearization of the noise-free step map.

    f(x + dx, u + du) ≈ A dx + B du + c with c = f(x, u).

    Args:
        x: State vector (6,) or VehicleState
        u: Control (2,)
        dt: Step in seconds
        config: VehicleConfig supplying bounds and drag
        epsilon: Perturbation size

    Returns:
        Tuple (A (6x6), B (6x2), c (6,))
    """
    config = config or VehicleConfig()
    if isinstance(x, VehicleState):
        x = x.to_vector()
    A, B = _finite_difference_jacobians(
        np.asarray(x, dtype=float)[None], np.asarray(u, dtype=float)[None], dt, config, epsilon
    )
    c = integrate(x, clamp_control(u, config), dt, config.lateral_drag)
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
        raise SimulationDiverged("non-finite Jacobian", state=VehicleState.from_vector(x))
    return A[0], B[0], c


def _finite_difference_jacobians(xs, us, dt, config, epsilon):
    """Jacobians for a batch of (x, u) pairs; shapes (H, 6), (H, 2) -> (H, 6, 6), (H, 6, 2)"""
    n, m = STATE_DIM, CONTROL_DIM
    z = np.concatenate([xs, us], axis=-1)
    perturb = epsilon * np.eye(n + m)
    z_plus = z[:, None, :] + perturb[None]
    z_minus = z[:, None, :] - perturb[None]
    lo, hi = np.asarray(config.control_min), np.asarray(config.control_max)
    f_plus = integrate(z_plus[..., :n], np.clip(z_plus[..., n:], lo, hi), dt, config.lateral_drag)
    f_minus = integrate(z_minus[..., :n], np.clip(z_minus[..., n:], lo, hi), dt, config.lateral_drag)
    diff = f_plus - f_minus
    diff[..., HEADING] = wrap_angle(diff[..., HEADING])
    jac = np.swapaxes(diff / (2.0 * epsilon), -1, -2)
    return jac[..., :n], jac[..., n:]


class VehicleDynamics:
    """
    Noise-free step map of the vehicle in the form consumed by the planner.

    Args:
        config: VehicleConfig
        epsilon: Finite-difference perturbation for linearization
    """

    state_dim = STATE_DIM
    control_dim = CONTROL_DIM

    def __init__(self, config=None, epsilon=1e-5):
        self.config = config or VehicleConfig()
        self.epsilon = epsilon

    def step(self, x, u):
        x_next = integrate(x, clamp_control(u, self.config), self.config.dt, self.config.lateral_drag)
        if not np.all(np.isfinite(x_next)):
            raise SimulationDiverged("planner rollout diverged", state=VehicleState.from_vector(x))
        return x_next

    def clamp(self, u):
        return clamp_control(u, self.config)

    def state_difference(self, x, x_ref):
        delta = np.asarray(x, dtype=float) - x_ref
        delta[..., HEADING] = wrap_angle(delta[..., HEADING])
        return delta

    def linearize(self, xs, us):
        """Jacobians along a trajectory; xs (H, 6), us (H, 2) -> A (H, 6, 6), B (H, 6, 2)"""
        return _finite_difference_jacobians(
            np.asarray(xs, dtype=float), np.asarray(us, dtype=float),
            self.config.dt, self.config, self.epsilon,
        )
