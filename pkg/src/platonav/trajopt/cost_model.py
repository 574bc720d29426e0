"""Second-order cost expansions along a trajectory."""

from dataclasses import dataclass

import numpy as np

from ..errors import ContractViolation


@dataclass
class QuadraticCostModel:
    """
    Per-timestep second-order expansion of a trajectory cost.

    Index t < H holds the stage terms, index H the terminal terms (state only).

    Args:
        l: Cost values, shape (H+1,)
        lx: State gradients, shape (H+1, n)
        lu: Control gradients, shape (H, m)
        lxx: State Hessians, shape (H+1, n, n)
        luu: Control Hessians, shape (H, m, m)
        lux: Cross terms, shape (H, m, n)
    """
    l: np.ndarray
    lx: np.ndarray
    lu: np.ndarray
    lxx: np.ndarray
    luu: np.ndarray
    lux: np.ndarray

    def __post_init__(self):
        horizon = self.lu.shape[0]
        if self.l.shape != (horizon + 1,) or self.lx.shape[0] != horizon + 1:
            raise ContractViolation("terminal terms must extend the stage terms by one step")
        if self.luu.shape[0] != horizon or self.lux.shape[0] != horizon:
            raise ContractViolation("stage terms must share the horizon")
        self.lxx = 0.5 * (self.lxx + np.swapaxes(self.lxx, -1, -2))
        self.luu = 0.5 * (self.luu + np.swapaxes(self.luu, -1, -2))

    @property
    def horizon(self):
        return self.lu.shape[0]

    @property
    def total(self):
        return float(np.sum(self.l))

    def copy(self):
        return QuadraticCostModel(
            self.l.copy(), self.lx.copy(), self.lu.copy(),
            self.lxx.copy(), self.luu.copy(), self.lux.copy(),
        )
