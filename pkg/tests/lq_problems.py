"""
Linear dynamics and quadratic costs: linear-quadratic problems for which the
planner's backward pass reduces to the discrete Riccati recursion.
"""

import numpy as np

from platonav.errors import ContractViolation
from platonav.trajopt.cost_model import QuadraticCostModel


class LinearDynamics:
    """x' = A x + B u (+ c)"""

    def __init__(self, A, B, c=None):
        self.A = np.asarray(A, dtype=float)
        self.B = np.asarray(B, dtype=float)
        self.c = np.zeros(self.A.shape[0]) if c is None else np.asarray(c, dtype=float)
        if self.A.shape[0] != self.A.shape[1] or self.B.shape[0] != self.A.shape[0]:
            raise ContractViolation(f"incompatible shapes A{self.A.shape}, B{self.B.shape}")

    @property
    def state_dim(self):
        return self.A.shape[0]

    @property
    def control_dim(self):
        return self.B.shape[1]

    def step(self, x, u):
        return self.A @ x + self.B @ u + self.c

    def linearize(self, xs, us):
        horizon = len(us)
        return np.tile(self.A, (horizon, 1, 1)), np.tile(self.B, (horizon, 1, 1))

    def clamp(self, u):
        return u

    def state_difference(self, x, x_ref):
        return x - x_ref


class QuadraticCost:
    """
    Σ_t ½ (x_t - x̂)ᵀQ(x_t - x̂) + ½ u_tᵀR u_t + ½ (x_H - x̂)ᵀQ_f(x_H - x̂)

    Args:
        Q: Stage state weight (n x n, PSD)
        R: Control weight (m x m, PD)
        Qf: Terminal weight, Q when omitted
        target: x̂, zero when omitted
    """

    def __init__(self, Q, R, Qf=None, target=None):
        self.Q = np.asarray(Q, dtype=float)
        self.R = np.asarray(R, dtype=float)
        self.Qf = self.Q if Qf is None else np.asarray(Qf, dtype=float)
        self.target = np.zeros(self.Q.shape[0]) if target is None else np.asarray(target, dtype=float)

    def _state_terms(self, xs):
        e = xs - self.target
        weights = np.concatenate([np.tile(self.Q, (len(xs) - 1, 1, 1)), self.Qf[None]], axis=0)
        values = 0.5 * np.einsum("ti,tij,tj->t", e, weights, e)
        return values, np.einsum("tij,tj->ti", weights, e), weights

    def trajectory_cost(self, xs, us):
        values, _, _ = self._state_terms(np.asarray(xs, dtype=float))
        us = np.asarray(us, dtype=float)
        return float(np.sum(values) + 0.5 * np.einsum("ti,ij,tj->", us, self.R, us))

    def quadratize(self, xs, us):
        xs = np.asarray(xs, dtype=float)
        us = np.asarray(us, dtype=float)
        values, lx, lxx = self._state_terms(xs)
        l = values.copy()
        l[:-1] += 0.5 * np.einsum("ti,ij,tj->t", us, self.R, us)
        horizon = len(us)
        return QuadraticCostModel(
            l=l, lx=lx, lu=us @ self.R.T, lxx=lxx,
            luu=np.tile(self.R, (horizon, 1, 1)),
            lux=np.zeros((horizon, self.R.shape[0], self.Q.shape[0])),
        )
