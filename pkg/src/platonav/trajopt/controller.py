"""Time-varying linear-Gaussian controllers."""

import numpy as np

from ..errors import ContractViolation, NumericalError
from ..gaussian import Gaussian


def _subtract(a, b):
    return a - b


class LinearGaussianController:
    """
    Time-varying controller N(K_t x + k_t, Σ_t) around a nominal trajectory.

    The mean is evaluated as ū_t + K_t (x - x̄_t), which equals K_t x + k_t
    with k_t = ū_t - K_t x̄_t; the difference form lets angle states wrap.

    Args:
        gains: K, shape (H, m, n)
        nominal_states: x̄, shape (H+1, n)
        nominal_controls: ū, shape (H, m)
        covariances: Σ, shape (H, m, m)
        state_difference: Callable (x, x̄) -> x - x̄; plain subtraction by default
        cost: Cost of the nominal trajectory, if known
    """

    def __init__(self, gains, nominal_states, nominal_controls, covariances,
                 state_difference=None, cost=None):
        self.gains = np.array(gains, dtype=float)
        self.nominal_states = np.array(nominal_states, dtype=float)
        self.nominal_controls = np.array(nominal_controls, dtype=float)
        self.covariances = np.array(covariances, dtype=float)
        self.state_difference = state_difference or _subtract
        self.cost = cost

        horizon = self.nominal_controls.shape[0]
        if horizon < 1:
            raise ContractViolation("controller horizon must be at least 1")
        if (self.gains.shape[0] != horizon or self.covariances.shape[0] != horizon
                or self.nominal_states.shape[0] != horizon + 1):
            raise ContractViolation("controller arrays disagree on the horizon")
        for t, cov in enumerate(self.covariances):
            try:
                np.linalg.cholesky(cov)
            except np.linalg.LinAlgError as e:
                raise NumericalError(f"controller covariance at t={t} is not positive definite") from e
        for array in (self.gains, self.nominal_states, self.nominal_controls, self.covariances):
            array.setflags(write=False)

    @property
    def horizon(self):
        return self.nominal_controls.shape[0]

    @property
    def offsets(self):
        """k_t = ū_t - K_t x̄_t"""
        return self.nominal_controls - np.einsum("tmn,tn->tm", self.gains, self.nominal_states[:-1])

    def action_mean(self, t, x):
        delta = self.state_difference(np.asarray(x, dtype=float), self.nominal_states[t])
        return self.nominal_controls[t] + self.gains[t] @ delta

    def action_distribution(self, t, x):
        return Gaussian(self.action_mean(t, x), self.covariances[t])

    def shifted(self, dynamics=None):
        """
        Warm start for the next replanning step: drop the first step and repeat
        the last one. With dynamics, the appended nominal state is propagated
        instead of repeated.
        """
        def advance(array):
            return np.concatenate([array[1:], array[-1:]], axis=0)

        states = advance(self.nominal_states)
        if dynamics is not None:
            states[-1] = dynamics.step(states[-2], self.nominal_controls[-1])
        return LinearGaussianController(
            advance(self.gains), states, advance(self.nominal_controls),
            advance(self.covariances), state_difference=self.state_difference,
        )
